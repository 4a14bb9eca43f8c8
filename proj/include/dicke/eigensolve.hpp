#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dicke/sparse.hpp"

namespace dicke {

enum class SolverKind { dense, lanczos };

const char* to_string(SolverKind kind) noexcept;

struct SolverOptions {
    int k = 6;
    double residual_tol = 1e-10;      // relative to the spectral-norm estimate
    std::size_t max_iterations = 0;   // block steps; 0 means 10 * dim
    int block_size = 4;
    std::size_t dense_threshold = 4000;
    std::uint64_t seed = 0x5eed;
    bool want_vectors = false;

    void validate(std::size_t dim) const;
};

struct SpectrumResult {
    std::vector<double> eigenvalues;              // ascending, length k
    std::optional<Eigen::MatrixXd> eigenvectors;  // dim x k, orthonormal columns
    SolverKind solver = SolverKind::dense;
    std::size_t iterations = 0;
    std::vector<double> residual_norms;
    bool converged = false;
};

// Full symmetric eigendecomposition. Throws ResourceError when the dimension
// exceeds opts.dense_threshold unless allow_large is set.
SpectrumResult dense_spectrum(const Eigen::MatrixXd& H, const SolverOptions& opts,
                              bool allow_large = false);
SpectrumResult dense_spectrum(const Eigen::MatrixXd& H, int k);

// Lowest k eigenpairs by block Lanczos with full reorthogonalization and thick
// restarts. Rank-deficient blocks are refilled with fresh random directions, so
// every copy of a degenerate level is found. On non-convergence within
// max_iterations the best Ritz pairs are returned with converged = false.
SpectrumResult lanczos_lowest(const SparseOperator& H, const SolverOptions& opts);

// Dense below opts.dense_threshold, Lanczos above.
SpectrumResult lowest_spectrum(const SparseOperator& H, const SolverOptions& opts);

} // namespace dicke
