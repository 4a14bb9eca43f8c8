#include "dicke/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "dicke/errors.hpp"

namespace dicke {

const char* to_string(SolverKind kind) noexcept {
    return kind == SolverKind::dense ? "dense" : "lanczos";
}

void SolverOptions::validate(std::size_t dim) const {
    if (k < 1) throw std::invalid_argument("solver: k must be >= 1");
    if (static_cast<std::size_t>(k) > dim)
        throw std::invalid_argument("solver: k=" + std::to_string(k) + " exceeds dimension " + std::to_string(dim));
    if (block_size < 2) throw std::invalid_argument("solver: block_size must be >= 2");
    if (!(residual_tol > 0.0)) throw std::invalid_argument("solver: residual_tol must be positive");
}

namespace {

std::vector<double> residuals(const Eigen::MatrixXd& H, const Eigen::VectorXd& values, const Eigen::MatrixXd& vectors) {
    std::vector<double> out(static_cast<std::size_t>(values.size()));
    for (Eigen::Index i = 0; i < values.size(); ++i)
        out[static_cast<std::size_t>(i)] = (H * vectors.col(i) - values(i) * vectors.col(i)).norm();
    return out;
}

} // namespace

SpectrumResult dense_spectrum(const Eigen::MatrixXd& H, const SolverOptions& opts, bool allow_large) {
    if (H.rows() != H.cols()) throw std::invalid_argument("dense_spectrum: matrix not square");
    const auto dim = static_cast<std::size_t>(H.rows());
    opts.validate(dim);
    if (dim > opts.dense_threshold && !allow_large)
        throw ResourceError("dense_spectrum: dimension " + std::to_string(dim) + " above dense threshold " +
                            std::to_string(opts.dense_threshold));
    const double scale = std::max(H.norm(), 1.0);
    if ((H - H.transpose()).norm() > 1e-12 * scale) throw std::invalid_argument("dense_spectrum: matrix not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw std::runtime_error("dense_spectrum: eigendecomposition failed");

    const auto k = static_cast<Eigen::Index>(opts.k);
    const Eigen::VectorXd values = solver.eigenvalues().head(k);
    const Eigen::MatrixXd vectors = solver.eigenvectors().leftCols(k);

    SpectrumResult result;
    result.eigenvalues.assign(values.data(), values.data() + k);
    result.residual_norms = residuals(H, values, vectors);
    result.solver = SolverKind::dense;
    result.iterations = 1;
    result.converged = true;
    if (opts.want_vectors) result.eigenvectors = vectors;
    return result;
}

SpectrumResult dense_spectrum(const Eigen::MatrixXd& H, int k) {
    SolverOptions opts;
    opts.k = k;
    return dense_spectrum(H, opts);
}

namespace {

// Orthonormal Krylov basis with its image under H, grown one block at a time.
class KrylovBasis {
public:
    KrylovBasis(Eigen::Index dim, Eigen::Index capacity) : Q_(dim, capacity), HQ_(dim, capacity), T_(capacity, capacity) {}

    Eigen::Index size() const { return cols_; }
    Eigen::Index capacity() const { return Q_.cols(); }
    auto basis() const { return Q_.leftCols(cols_); }
    auto image() const { return HQ_.leftCols(cols_); }
    auto projection() const { return T_.topLeftCorner(cols_, cols_); }

    // Orthogonalize v against the basis (two classical Gram-Schmidt passes) and
    // against `extra` leading columns of `block`. Returns the remaining norm.
    double orthogonalize(Eigen::Ref<Eigen::VectorXd> v, const Eigen::MatrixXd& block, Eigen::Index extra) const {
        for (int pass = 0; pass < 2; ++pass) {
            if (cols_ > 0) v -= basis() * (basis().transpose() * v);
            if (extra > 0) v -= block.leftCols(extra) * (block.leftCols(extra).transpose() * v);
        }
        return v.norm();
    }

    // Appends the block and its image; fills the new rows/columns of T.
    void append(const Eigen::MatrixXd& block, const Eigen::MatrixXd& image) {
        const Eigen::Index b = block.cols();
        Q_.middleCols(cols_, b) = block;
        HQ_.middleCols(cols_, b) = image;
        const Eigen::MatrixXd coupling = Q_.leftCols(cols_ + b).transpose() * image;
        T_.block(0, cols_, cols_ + b, b) = coupling;
        T_.block(cols_, 0, b, cols_ + b) = coupling.transpose();
        // keep the diagonal block exactly symmetric
        Eigen::MatrixXd diag = T_.block(cols_, cols_, b, b);
        T_.block(cols_, cols_, b, b) = 0.5 * (diag + diag.transpose());
        cols_ += b;
    }

    // Replace the basis by the Ritz vectors basis * Y (Y has orthonormal columns).
    void restart(const Eigen::MatrixXd& Y, const Eigen::VectorXd& ritz_values) {
        const Eigen::Index keep = Y.cols();
        const Eigen::MatrixXd q = basis() * Y;
        const Eigen::MatrixXd hq = image() * Y;
        Q_.leftCols(keep) = q;
        HQ_.leftCols(keep) = hq;
        T_.topLeftCorner(keep, keep) = ritz_values.asDiagonal();
        cols_ = keep;
    }

private:
    Eigen::MatrixXd Q_;
    Eigen::MatrixXd HQ_;
    Eigen::MatrixXd T_;
    Eigen::Index cols_ = 0;
};

class StartVectors {
public:
    explicit StartVectors(std::uint64_t seed) : rng_(seed) {}

    Eigen::VectorXd draw(Eigen::Index dim) {
        Eigen::VectorXd v(dim);
        for (Eigen::Index i = 0; i < dim; ++i) v(i) = uniform_(rng_);
        return v;
    }

private:
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> uniform_{-1.0, 1.0};
};

// Orthonormalizes the columns of `block` against the basis and each other.
// Columns that collapse (the Krylov space has become invariant in that
// direction) are replaced by fresh random vectors; columns that cannot be
// completed because the basis already spans the space are dropped.
Eigen::MatrixXd orthonormal_block(const KrylovBasis& basis, Eigen::MatrixXd block, StartVectors& rng) {
    const Eigen::Index dim = block.rows();
    const Eigen::Index wanted = std::min<Eigen::Index>(block.cols(), dim - basis.size());
    Eigen::MatrixXd out(dim, std::max<Eigen::Index>(wanted, 0));
    Eigen::Index filled = 0;
    for (Eigen::Index c = 0; c < block.cols() && filled < wanted; ++c) {
        Eigen::VectorXd v = block.col(c);
        const double before = v.norm();
        double after = basis.orthogonalize(v, out, filled);
        for (int attempt = 0; attempt < 4 && !(after > 1e-8 * before && after > 0.0); ++attempt) {
            v = rng.draw(dim);
            const double fresh = v.norm();
            after = basis.orthogonalize(v, out, filled);
            if (after > 1e-8 * fresh) break;
        }
        if (!(after > 0.0)) continue;
        out.col(filled++) = v / after;
    }
    return out.leftCols(filled);
}

} // namespace

SpectrumResult lanczos_lowest(const SparseOperator& H, const SolverOptions& opts) {
    const auto dim = static_cast<Eigen::Index>(H.dim());
    opts.validate(H.dim());
    const Eigen::Index k = opts.k;
    const Eigen::Index b = opts.block_size;
    const std::size_t max_iterations = opts.max_iterations > 0 ? opts.max_iterations : 10 * H.dim();

    const Eigen::Index capacity = std::min<Eigen::Index>(dim, std::max<Eigen::Index>(3 * k + 6 * b, 160));
    // Ritz vectors kept across a restart; leaves room for at least two new blocks.
    const Eigen::Index keep = std::min<Eigen::Index>(std::max<Eigen::Index>(k + b, 2 * k), capacity - 2 * b);

    KrylovBasis basis(dim, capacity);
    StartVectors rng(opts.seed);

    Eigen::MatrixXd start(dim, b);
    for (Eigen::Index c = 0; c < b; ++c) start.col(c) = rng.draw(dim);
    Eigen::MatrixXd block = orthonormal_block(basis, std::move(start), rng);

    SpectrumResult result;
    result.solver = SolverKind::lanczos;
    double norm_estimate = 0.0;

    Eigen::VectorXd theta;
    Eigen::MatrixXd Y;
    while (true) {
        Eigen::MatrixXd image(dim, block.cols());
        H.apply(block, image);
        basis.append(block, image);
        ++result.iterations;

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(basis.projection());
        theta = ritz.eigenvalues();
        Y = ritz.eigenvectors();
        norm_estimate = std::max({norm_estimate, std::abs(theta(0)), std::abs(theta(theta.size() - 1))});

        const Eigen::Index have = std::min<Eigen::Index>(k, basis.size());
        const Eigen::MatrixXd Yk = Y.leftCols(have);
        const Eigen::MatrixXd R = basis.image() * Yk - basis.basis() * Yk * theta.head(have).asDiagonal();
        result.residual_norms.assign(static_cast<std::size_t>(have), 0.0);
        bool all_small = have == k;
        const double threshold = opts.residual_tol * std::max(norm_estimate, 1e-300);
        for (Eigen::Index i = 0; i < have; ++i) {
            const double r = R.col(i).norm();
            result.residual_norms[static_cast<std::size_t>(i)] = r;
            all_small = all_small && r <= threshold;
        }

        if (all_small || basis.size() == dim) {
            result.converged = have == k;
            break;
        }
        if (result.iterations >= max_iterations && have == k) break;

        // Next Lanczos block: the part of H * (last block) outside the basis.
        // It spans the residuals of all current Ritz vectors.
        block = orthonormal_block(basis, std::move(image), rng);
        if (basis.size() + block.cols() > basis.capacity()) basis.restart(Y.leftCols(keep), theta.head(keep));
        if (block.cols() == 0) {
            result.converged = false;
            break;
        }
    }

    const Eigen::Index have = std::min<Eigen::Index>(k, basis.size());
    result.eigenvalues.assign(theta.data(), theta.data() + have);
    if (opts.want_vectors) result.eigenvectors = basis.basis() * Y.leftCols(have);
    return result;
}

SpectrumResult lowest_spectrum(const SparseOperator& H, const SolverOptions& opts) {
    if (H.dim() <= opts.dense_threshold) return dense_spectrum(H.to_dense(), opts);
    return lanczos_lowest(H, opts);
}

} // namespace dicke
