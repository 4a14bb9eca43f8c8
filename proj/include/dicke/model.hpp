#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "dicke/sparse.hpp"

namespace dicke {

// Extended Dicke model  H = omega a^dag a + g (a^dag + a) S_z - v S_x^2
// with hbar = 1. All energies share one (arbitrary) angular-frequency unit.
struct ModelParams {
    int N = 1;          // atom count
    double omega = 1.0; // cavity frequency
    double g = 0.0;     // atom-field coupling
    double v = 0.0;     // atom-atom S_x^2 interaction

    double S() const noexcept { return 0.5 * N; }
    double u() const noexcept { return g * g / omega; }

    // Throws std::invalid_argument on N < 1, omega <= 0, v < 0 or non-finite values.
    void validate() const;

    // Coupling chosen so that g^2/omega == u (g >= 0).
    static ModelParams from_u(int N, double omega, double u, double v);
};

// Flat index of the product state |n> (x) |S, m>, boson-major with m ascending:
//   flat = n * (N + 1) + (m + S).
// m is carried as the integer 2m to stay exact for half-integer spin.
class BasisIndex {
public:
    struct State {
        int n;
        int two_m;
    };

    BasisIndex(int N, int fock_cutoff);

    int atoms() const noexcept { return N_; }
    int fock_cutoff() const noexcept { return M_; }
    std::size_t spin_dim() const noexcept { return static_cast<std::size_t>(N_) + 1; }
    std::size_t boson_dim() const noexcept { return static_cast<std::size_t>(M_) + 1; }
    std::size_t total_dim() const noexcept { return spin_dim() * boson_dim(); }

    std::size_t flat(int n, int two_m) const;
    State state(std::size_t flat) const;

private:
    int N_;
    int M_;
};

// Collective spin matrices in the |S, m> basis, m ascending from -S.
// S_y is purely imaginary here; it is kept as Sy_imag with S_y = i * Sy_imag.
struct SpinOperatorSet {
    double S = 0.5;
    Eigen::MatrixXd Sx;
    Eigen::MatrixXd Sy_imag;
    Eigen::MatrixXd Sz;
    Eigen::MatrixXd Sp;
    Eigen::MatrixXd Sm;

    Eigen::Index dim() const noexcept { return Sz.rows(); }
};

// Throws std::invalid_argument unless 2S is a positive integer.
SpinOperatorSet collective_spin_matrices(double S);

// Sparse Hamiltonian in the truncated basis n = 0..fock_cutoff.
// Throws ResourceError if the nonzero count would exceed max_nonzeros.
SparseOperator build_full_hamiltonian(const ModelParams& p, int fock_cutoff,
                                      std::size_t max_nonzeros = kDefaultMaxNonzeros);

// -u S_z^2 - v S_x^2, dense (N+1)x(N+1).
Eigen::MatrixXd polaron_spin_hamiltonian(const ModelParams& p);

// R = exp(i pi a^dag a) (x) exp(-i pi S_x) = i^phase_quarter_turns * real_part.
// exp(-i pi S_x)|m> = (-i)^{2S} |-m>, so real_part is the boson parity times the
// m -> -m flip and the phase is (-i)^N. R is real (eigenvalues +-1) for even N
// and i times a real matrix (eigenvalues +-i) for odd N.
struct SymmetryOperator {
    SparseOperator real_part;
    int phase_quarter_turns = 0;

    bool is_real() const noexcept { return phase_quarter_turns % 2 == 0; }
    // Only valid when is_real(); throws std::logic_error otherwise.
    Eigen::MatrixXd real_matrix() const;
};

SymmetryOperator symmetry_operator(const ModelParams& p, int fock_cutoff);

} // namespace dicke
