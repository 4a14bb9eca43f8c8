#include "dicke/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dicke/errors.hpp"

namespace dicke {

void ModelParams::validate() const {
    if (N < 1) throw std::invalid_argument("N must be >= 1, got " + std::to_string(N));
    if (!std::isfinite(omega) || omega <= 0.0) throw std::invalid_argument("omega must be positive and finite");
    if (!std::isfinite(g)) throw std::invalid_argument("g must be finite");
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("v must be non-negative and finite");
}

ModelParams ModelParams::from_u(int N, double omega, double u, double v) {
    if (!(u >= 0.0)) throw std::invalid_argument("u must be non-negative");
    ModelParams p{N, omega, std::sqrt(u * omega), v};
    p.validate();
    return p;
}

BasisIndex::BasisIndex(int N, int fock_cutoff) : N_(N), M_(fock_cutoff) {
    if (N < 1) throw std::invalid_argument("BasisIndex: N must be >= 1");
    if (fock_cutoff < 0) throw std::invalid_argument("BasisIndex: fock cutoff must be >= 0");
}

std::size_t BasisIndex::flat(int n, int two_m) const {
    if (n < 0 || n > M_) throw std::out_of_range("BasisIndex: boson number out of range");
    if (two_m < -N_ || two_m > N_ || (two_m + N_) % 2 != 0)
        throw std::out_of_range("BasisIndex: 2m out of range or wrong parity");
    return static_cast<std::size_t>(n) * spin_dim() + static_cast<std::size_t>((two_m + N_) / 2);
}

BasisIndex::State BasisIndex::state(std::size_t flat) const {
    if (flat >= total_dim()) throw std::out_of_range("BasisIndex: flat index out of range");
    const auto n = static_cast<int>(flat / spin_dim());
    const auto j = static_cast<int>(flat % spin_dim());
    return {n, 2 * j - N_};
}

SpinOperatorSet collective_spin_matrices(double S) {
    const double twice = 2.0 * S;
    if (!std::isfinite(S) || twice < 1.0 || twice != std::floor(twice) || twice > 1e6)
        throw std::invalid_argument("spin quantum number must be a positive half-integer");

    const auto dim = static_cast<Eigen::Index>(twice) + 1;
    SpinOperatorSet set;
    set.S = S;
    set.Sz = Eigen::MatrixXd::Zero(dim, dim);
    set.Sp = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        const double m = static_cast<double>(j) - S;
        set.Sz(j, j) = m;
        if (j + 1 < dim) set.Sp(j + 1, j) = std::sqrt(S * (S + 1.0) - m * (m + 1.0));
    }
    set.Sm = set.Sp.transpose();
    set.Sx = 0.5 * (set.Sp + set.Sm);
    // S_y = (S+ - S-) / 2i = i (S- - S+) / 2
    set.Sy_imag = 0.5 * (set.Sm - set.Sp);
    return set;
}

SparseOperator build_full_hamiltonian(const ModelParams& p, int fock_cutoff, std::size_t max_nonzeros) {
    p.validate();
    const BasisIndex basis(p.N, fock_cutoff);
    const std::size_t spin_dim = basis.spin_dim();
    const std::size_t bosons = basis.boson_dim();

    const std::size_t estimate = basis.total_dim() + 2 * (bosons - 1) * spin_dim +
                                 (spin_dim > 2 ? 2 * bosons * (spin_dim - 2) : 0);
    if (estimate > max_nonzeros)
        throw ResourceError("Hamiltonian with N=" + std::to_string(p.N) + ", M=" + std::to_string(fock_cutoff) +
                            " needs ~" + std::to_string(estimate) + " nonzeros (limit " +
                            std::to_string(max_nonzeros) + ")");

    const SpinOperatorSet spin = collective_spin_matrices(p.S());
    const Eigen::MatrixXd sx2 = spin.Sx * spin.Sx;

    SymmetricBuilder builder(basis.total_dim());
    builder.reserve(estimate);
    for (int n = 0; n <= fock_cutoff; ++n) {
        const std::size_t block = static_cast<std::size_t>(n) * spin_dim;
        for (std::size_t j = 0; j < spin_dim; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            builder.add_diagonal(block + j, p.omega * n - p.v * sx2(jj, jj));
            if (j + 2 < spin_dim && p.v != 0.0) builder.add_pair(block + j, block + j + 2, -p.v * sx2(jj + 2, jj));
            const double m = spin.Sz(jj, jj);
            if (n < fock_cutoff && p.g != 0.0 && m != 0.0)
                builder.add_pair(block + j, block + spin_dim + j, p.g * std::sqrt(n + 1.0) * m);
        }
    }
    return std::move(builder).build(max_nonzeros);
}

Eigen::MatrixXd polaron_spin_hamiltonian(const ModelParams& p) {
    p.validate();
    const SpinOperatorSet spin = collective_spin_matrices(p.S());
    return -p.u() * (spin.Sz * spin.Sz) - p.v * (spin.Sx * spin.Sx);
}

Eigen::MatrixXd SymmetryOperator::real_matrix() const {
    if (!is_real()) throw std::logic_error("symmetry operator carries a factor of i for odd N");
    const double sign = phase_quarter_turns % 4 == 0 ? 1.0 : -1.0;
    return sign * real_part.to_dense();
}

SymmetryOperator symmetry_operator(const ModelParams& p, int fock_cutoff) {
    p.validate();
    const BasisIndex basis(p.N, fock_cutoff);
    SymmetricBuilder builder(basis.total_dim());
    for (int n = 0; n <= fock_cutoff; ++n) {
        const double parity = n % 2 == 0 ? 1.0 : -1.0;
        for (int two_m = -p.N; two_m <= 0; two_m += 2)
            builder.add_pair(basis.flat(n, two_m), basis.flat(n, -two_m), parity);
    }
    // (-i)^N = i^{-N}
    return {std::move(builder).build(), (4 - p.N % 4) % 4};
}

} // namespace dicke
