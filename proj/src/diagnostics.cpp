#include "dicke/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dicke {

namespace {

constexpr double kClip = 1e-12;

double clipped_difference(double hi, double lo, const char* what) {
    const double diff = hi - lo;
    if (diff >= 0.0) return diff;
    if (diff >= -kClip) return 0.0;
    throw std::invalid_argument(std::string("splitting_and_gap: eigenvalues not ascending (") + what + ")");
}

} // namespace

SplittingGap splitting_and_gap(std::span<const double> eigenvalues) {
    if (eigenvalues.size() < 3)
        throw std::invalid_argument("splitting_and_gap: need at least 3 eigenvalues, got " +
                                    std::to_string(eigenvalues.size()));
    return {clipped_difference(eigenvalues[1], eigenvalues[0], "E1 < E0"),
            clipped_difference(eigenvalues[2], eigenvalues[1], "E2 < E1")};
}

DegeneracyReport degeneracy_classes(std::span<const double> eigenvalues, double cluster_tol) {
    DegeneracyReport report;
    double first = 0.0;
    double previous = 0.0;
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
        const double e = eigenvalues[i];
        if (i > 0 && e - previous <= cluster_tol) {
            ++report.classes.back().multiplicity;
            report.max_intra_class_spread = std::max(report.max_intra_class_spread, e - first);
        } else {
            report.classes.push_back({e, 1});
            first = e;
        }
        previous = e;
    }
    report.pairing_ok = !report.classes.empty() &&
                        std::all_of(report.classes.begin(), report.classes.end(),
                                    [](const DegeneracyClass& c) { return c.multiplicity % 2 == 0; });
    return report;
}

double default_cluster_tol(std::span<const double> eigenvalues) {
    if (eigenvalues.empty()) return 0.0;
    return 1e-10 * std::abs(eigenvalues.front());
}

int initial_cutoff(const ModelParams& p) {
    const double shift = p.g * p.S() / p.omega;
    return static_cast<int>(std::ceil(4.0 * shift * shift)) + 10;
}

namespace {

SpectrumResult solve_at_cutoff(const ModelParams& p, int cutoff, const ConvergenceOptions& opts) {
    const SparseOperator H = build_full_hamiltonian(p, cutoff);
    SolverOptions solver = opts.solver;
    solver.k = opts.k;
    return lowest_spectrum(H, solver);
}

double max_shift(const std::vector<double>& a, const std::vector<double>& b) {
    double out = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) out = std::max(out, std::abs(a[i] - b[i]));
    return out;
}

} // namespace

ConvergenceReport converge_cutoff(const ModelParams& p, const ConvergenceOptions& opts) {
    p.validate();
    if (!(opts.tol > 0.0)) throw std::invalid_argument("converge_cutoff: tol must be positive");
    if (opts.k < 1) throw std::invalid_argument("converge_cutoff: k must be >= 1");

    ConvergenceReport report;
    report.tol = opts.tol;
    const auto spin_dim = static_cast<std::size_t>(p.N) + 1;

    int cutoff = initial_cutoff(p);
    while (true) {
        const std::size_t dim = spin_dim * (static_cast<std::size_t>(cutoff) + 1);
        if (dim > opts.max_dim)
            throw CutoffConvergenceError("converge_cutoff: cutoff M=" + std::to_string(cutoff) + " (dim " +
                                             std::to_string(dim) + ") exceeds max_dim " +
                                             std::to_string(opts.max_dim) + " before convergence",
                                         std::move(report.history));
        SpectrumResult spectrum = solve_at_cutoff(p, cutoff, opts);
        report.history.push_back({cutoff, spectrum.eigenvalues});
        report.spectrum = std::move(spectrum);

        const auto steps = report.history.size();
        if (steps >= 2 && max_shift(report.history[steps - 2].energies, report.history[steps - 1].energies) < opts.tol) {
            report.M_star = report.history[steps - 2].M;
            report.converged = report.spectrum.converged;
            return report;
        }
        cutoff *= 2;
    }
}

std::vector<double> polaron_ladder_spectrum(const ModelParams& p, int k) {
    if (k < 1) throw std::invalid_argument("polaron_ladder_spectrum: k must be >= 1");
    const Eigen::MatrixXd spin = polaron_spin_hamiltonian(p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(spin, Eigen::EigenvaluesOnly);
    std::vector<double> merged;
    merged.reserve(static_cast<std::size_t>(spin.rows()) * static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < spin.rows(); ++i)
        for (int n = 0; n < k; ++n) merged.push_back(solver.eigenvalues()(i) + p.omega * n);
    std::sort(merged.begin(), merged.end());
    merged.resize(static_cast<std::size_t>(k));
    return merged;
}

OracleReport oracle_spectrum_equivalence(const ModelParams& p, int k, double tol, const ConvergenceOptions& opts) {
    ConvergenceOptions conv = opts;
    conv.k = k;
    const ConvergenceReport converged = converge_cutoff(p, conv);

    OracleReport report;
    report.M_star = converged.M_star;
    report.full = converged.spectrum.eigenvalues;
    report.reference = polaron_ladder_spectrum(p, k);
    report.max_abs_deviation = max_shift(report.full, report.reference);
    report.pass = converged.converged && report.max_abs_deviation < tol;
    return report;
}

double symmetry_commutator_norm(const Eigen::MatrixXd& H, const Eigen::MatrixXd& R) {
    if (H.rows() != H.cols() || R.rows() != R.cols() || H.rows() != R.rows())
        throw std::invalid_argument("symmetry_commutator_norm: dimension mismatch");
    const double scale = H.norm();
    if (scale == 0.0) return 0.0;
    return (H * R - R * H).norm() / scale;
}

double symmetry_commutator_norm(const SparseOperator& H, const SymmetryOperator& R) {
    if (H.dim() != R.real_part.dim()) throw std::invalid_argument("symmetry_commutator_norm: dimension mismatch");
    // |i^q| = 1, so the phase drops out of the norm.
    const Eigen::MatrixXd P = R.real_part.to_dense();
    Eigen::MatrixXd HP(P.rows(), P.cols());
    H.apply(P, HP);
    const double scale = H.frobenius_norm();
    if (scale == 0.0) return 0.0;
    // P is symmetric, so P H = (H P)^T.
    return (HP - HP.transpose()).norm() / scale;
}

Eigen::VectorXd equatorial_coherent_state(int N, bool phi_zero) {
    if (N < 1) throw std::invalid_argument("equatorial_coherent_state: N must be >= 1");
    // c_m = sqrt(C(N, S + m)) / 2^S, with an extra (-1)^(S - m) for phi = pi.
    Eigen::VectorXd state(N + 1);
    double log_binom = 0.0;   // log C(N, j)
    for (int j = 0; j <= N; ++j) {
        if (j > 0) log_binom += std::log(static_cast<double>(N - j + 1)) - std::log(static_cast<double>(j));
        const double amplitude = std::exp(0.5 * log_binom - 0.5 * N * std::log(2.0));
        const bool flip = !phi_zero && (N - j) % 2 == 1;   // S - m = N - j
        state(j) = flip ? -amplitude : amplitude;
    }
    return state / state.norm();
}

CatOverlap cat_overlap(const Eigen::MatrixXd& ground_pair, const ModelParams& p, int fock_cutoff) {
    p.validate();
    const BasisIndex basis(p.N, fock_cutoff);
    if (ground_pair.cols() != 2 || static_cast<std::size_t>(ground_pair.rows()) != basis.total_dim())
        throw std::invalid_argument("cat_overlap: expected a " + std::to_string(basis.total_dim()) + " x 2 matrix");
    const Eigen::Matrix2d gram = ground_pair.transpose() * ground_pair;
    if ((gram - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() > 1e-8)
        throw std::invalid_argument("cat_overlap: ground pair is not orthonormal");

    const Eigen::VectorXd zero = equatorial_coherent_state(p.N, true);
    const Eigen::VectorXd pi = equatorial_coherent_state(p.N, false);
    const auto spin_dim = static_cast<Eigen::Index>(basis.spin_dim());

    // Boson vacuum occupies the first spin block.
    auto weight = [&](const Eigen::VectorXd& spin_part) {
        const Eigen::Vector2d overlaps = ground_pair.topRows(spin_dim).transpose() * spin_part;
        return overlaps.squaredNorm();
    };
    const double root_half = std::sqrt(0.5);
    return {weight(root_half * (zero + pi)), weight(root_half * (zero - pi))};
}

} // namespace dicke
