#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dicke {

inline constexpr std::size_t kDefaultMaxNonzeros = 5'000'000;

// Real symmetric matrix in compressed-row form. Both triangles are stored, so
// apply() is a plain CSR product over the full matrix.
class SparseOperator {
public:
    struct Entry {
        std::size_t row;
        std::size_t col;
        double value;
    };

    SparseOperator() = default;

    std::size_t dim() const noexcept { return dim_; }
    std::size_t nonzeros() const noexcept { return values_.size(); }

    std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
    std::span<const std::size_t> columns() const noexcept { return columns_; }
    std::span<const double> values() const noexcept { return values_; }

    // Stored value or 0.
    double at(std::size_t row, std::size_t col) const;

    void apply(const Eigen::Ref<const Eigen::MatrixXd>& x, Eigen::Ref<Eigen::MatrixXd> y) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

    Eigen::MatrixXd to_dense() const;
    std::vector<Entry> entries() const;
    double frobenius_norm() const;
    bool is_symmetric() const;

private:
    friend class SymmetricBuilder;

    std::size_t dim_ = 0;
    std::vector<std::size_t> row_offsets_{0};
    std::vector<std::size_t> columns_;
    std::vector<double> values_;
};

// Accumulates symmetric contributions. Every off-diagonal contribution is
// recorded for (i, j) and (j, i) with the same value, and duplicates are summed
// in insertion order, so the assembled matrix is symmetric bit for bit.
class SymmetricBuilder {
public:
    explicit SymmetricBuilder(std::size_t dim) : dim_(dim) {}

    void reserve(std::size_t contributions) { pending_.reserve(contributions); }
    void add_diagonal(std::size_t i, double value);
    void add_pair(std::size_t i, std::size_t j, double value);

    SparseOperator build(std::size_t max_nonzeros = kDefaultMaxNonzeros) &&;

private:
    std::size_t dim_;
    std::vector<SparseOperator::Entry> pending_;
};

SparseOperator sparse_from_dense(const Eigen::MatrixXd& dense, double drop_below = 0.0);

} // namespace dicke
