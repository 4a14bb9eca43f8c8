#include "dicke/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "dicke/errors.hpp"

namespace dicke {

double SparseOperator::at(std::size_t row, std::size_t col) const {
    if (row >= dim_ || col >= dim_) throw std::out_of_range("SparseOperator::at index out of range");
    const auto first = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[row]);
    const auto last = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[row + 1]);
    const auto it = std::lower_bound(first, last, col);
    if (it == last || *it != col) return 0.0;
    return values_[static_cast<std::size_t>(it - columns_.begin())];
}

void SparseOperator::apply(const Eigen::Ref<const Eigen::MatrixXd>& x, Eigen::Ref<Eigen::MatrixXd> y) const {
    if (static_cast<std::size_t>(x.rows()) != dim_ || y.rows() != x.rows() || y.cols() != x.cols())
        throw std::invalid_argument("SparseOperator::apply shape mismatch");
    y.setZero();
    for (std::size_t r = 0; r < dim_; ++r) {
        for (std::size_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) {
            y.row(static_cast<Eigen::Index>(r)) += values_[p] * x.row(static_cast<Eigen::Index>(columns_[p]));
        }
    }
}

Eigen::VectorXd SparseOperator::apply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(x.size());
    apply(x, y);
    return y;
}

Eigen::MatrixXd SparseOperator::to_dense() const {
    const auto n = static_cast<Eigen::Index>(dim_);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(columns_[p])) = values_[p];
    return out;
}

std::vector<SparseOperator::Entry> SparseOperator::entries() const {
    std::vector<Entry> out;
    out.reserve(values_.size());
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p)
            out.push_back({r, columns_[p], values_[p]});
    return out;
}

double SparseOperator::frobenius_norm() const {
    double sum = 0.0;
    for (double v : values_) sum += v * v;
    return std::sqrt(sum);
}

bool SparseOperator::is_symmetric() const {
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p)
            if (at(columns_[p], r) != values_[p]) return false;
    return true;
}

void SymmetricBuilder::add_diagonal(std::size_t i, double value) {
    if (i >= dim_) throw std::out_of_range("SymmetricBuilder: index out of range");
    pending_.push_back({i, i, value});
}

void SymmetricBuilder::add_pair(std::size_t i, std::size_t j, double value) {
    if (i >= dim_ || j >= dim_) throw std::out_of_range("SymmetricBuilder: index out of range");
    if (i == j) {
        pending_.push_back({i, i, value});
        return;
    }
    pending_.push_back({i, j, value});
    pending_.push_back({j, i, value});
}

SparseOperator SymmetricBuilder::build(std::size_t max_nonzeros) && {
    // Stable sort keeps the insertion order of duplicates, which is the same
    // for (i, j) and (j, i); summing in that order preserves exact symmetry.
    std::stable_sort(pending_.begin(), pending_.end(), [](const auto& a, const auto& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseOperator op;
    op.dim_ = dim_;
    op.row_offsets_.assign(dim_ + 1, 0);
    for (std::size_t p = 0; p < pending_.size();) {
        const auto row = pending_[p].row;
        const auto col = pending_[p].col;
        double sum = 0.0;
        for (; p < pending_.size() && pending_[p].row == row && pending_[p].col == col; ++p) sum += pending_[p].value;
        op.columns_.push_back(col);
        op.values_.push_back(sum);
        ++op.row_offsets_[row + 1];
        if (op.values_.size() > max_nonzeros)
            throw ResourceError("sparse operator exceeds " + std::to_string(max_nonzeros) + " nonzeros");
    }
    for (std::size_t r = 0; r < dim_; ++r) op.row_offsets_[r + 1] += op.row_offsets_[r];
    pending_.clear();
    return op;
}

SparseOperator sparse_from_dense(const Eigen::MatrixXd& dense, double drop_below) {
    if (dense.rows() != dense.cols()) throw std::invalid_argument("sparse_from_dense: matrix not square");
    const auto n = static_cast<std::size_t>(dense.rows());
    SymmetricBuilder builder(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        if (std::abs(dense(ii, ii)) > drop_below) builder.add_diagonal(i, dense(ii, ii));
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            if (dense(ii, jj) != dense(jj, ii))
                throw std::invalid_argument("sparse_from_dense: matrix not symmetric");
            if (std::abs(dense(ii, jj)) > drop_below) builder.add_pair(i, j, dense(ii, jj));
        }
    }
    return std::move(builder).build(std::numeric_limits<std::size_t>::max());
}

} // namespace dicke
