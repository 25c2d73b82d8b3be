#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "srf/types.hpp"

namespace srf {

enum class OperatorKind { GeneralDense, EntrySampling };

/// Zero-based position of one observed entry.
struct EntryIndex {
  Index row = 0;
  Index col = 0;
  friend bool operator==(const EntryIndex&, const EntryIndex&) = default;
};

// A linear map from n1 x n2 matrices to R^m. Two representations are
// supported: an explicit m x (n1*n2) matrix acting on the column-stacked
// input, and entry sampling, which reads out the entries listed in omega
// in order. Instances are immutable once constructed.
class AffineOperator {
 public:
  static AffineOperator general_dense(Matrix a, Index n1, Index n2) {
    if (n1 < 1 || n2 < 1)
      throw std::invalid_argument("general_dense: matrix shape must be positive");
    if (a.rows() < 1)
      throw std::invalid_argument("general_dense: operator must have at least one row");
    if (a.cols() != n1 * n2)
      throw std::invalid_argument("general_dense: operator has " + std::to_string(a.cols()) +
                                  " columns but the matrix shape needs " +
                                  std::to_string(n1 * n2));
    require_finite(a, "general_dense");
    AffineOperator op;
    op.kind_ = OperatorKind::GeneralDense;
    op.n1_ = n1;
    op.n2_ = n2;
    op.a_ = std::move(a);
    return op;
  }

  static AffineOperator entry_sampling(Index n1, Index n2, std::vector<EntryIndex> omega) {
    if (n1 < 1 || n2 < 1)
      throw std::invalid_argument("entry_sampling: matrix shape must be positive");
    if (omega.empty())
      throw std::invalid_argument("entry_sampling: omega must be non-empty");
    std::set<std::pair<Index, Index>> seen;
    for (const EntryIndex& e : omega) {
      if (e.row < 0 || e.row >= n1 || e.col < 0 || e.col >= n2)
        throw std::invalid_argument("entry_sampling: index (" + std::to_string(e.row) + ", " +
                                    std::to_string(e.col) + ") is outside a " +
                                    std::to_string(n1) + " x " + std::to_string(n2) + " matrix");
      if (!seen.insert({e.row, e.col}).second)
        throw std::invalid_argument("entry_sampling: duplicate index (" + std::to_string(e.row) +
                                    ", " + std::to_string(e.col) + ")");
    }
    AffineOperator op;
    op.kind_ = OperatorKind::EntrySampling;
    op.n1_ = n1;
    op.n2_ = n2;
    op.omega_ = std::move(omega);
    return op;
  }

  OperatorKind kind() const { return kind_; }
  Index rows() const { return n1_; }
  Index cols() const { return n2_; }
  Index m() const {
    return kind_ == OperatorKind::GeneralDense ? a_.rows()
                                               : static_cast<Index>(omega_.size());
  }

  /// Underlying dense matrix; only meaningful for GeneralDense.
  const Matrix& a_matrix() const {
    if (kind_ != OperatorKind::GeneralDense)
      throw std::invalid_argument("a_matrix: operator is not in dense form");
    return a_;
  }

  const std::vector<EntryIndex>& omega() const {
    if (kind_ != OperatorKind::EntrySampling)
      throw std::invalid_argument("omega: operator is not an entry sampler");
    return omega_;
  }

  Vector apply(const Matrix& x) const {
    check_shape(x, "apply");
    if (kind_ == OperatorKind::GeneralDense) return a_ * vectorize(x);
    Vector y(static_cast<Index>(omega_.size()));
    for (std::size_t k = 0; k < omega_.size(); ++k) y[static_cast<Index>(k)] = x(omega_[k].row, omega_[k].col);
    return y;
  }

  /// Transpose action, mapping R^m back to matrix space. For entry sampling
  /// this scatters y into the omega positions of an otherwise zero matrix.
  Matrix adjoint(const Vector& y) const {
    if (y.size() != m())
      throw std::invalid_argument("adjoint: vector of length " + std::to_string(y.size()) +
                                  " does not match m = " + std::to_string(m()));
    if (kind_ == OperatorKind::GeneralDense)
      return unvectorize(a_.transpose() * y, n1_, n2_);
    Matrix out = Matrix::Zero(n1_, n2_);
    for (std::size_t k = 0; k < omega_.size(); ++k) out(omega_[k].row, omega_[k].col) = y[static_cast<Index>(k)];
    return out;
  }

 private:
  AffineOperator() = default;

  void check_shape(const Matrix& x, const char* what) const {
    if (x.rows() != n1_ || x.cols() != n2_)
      throw std::invalid_argument(std::string(what) + ": expected a " + std::to_string(n1_) +
                                  " x " + std::to_string(n2_) + " matrix, got " +
                                  std::to_string(x.rows()) + " x " + std::to_string(x.cols()));
  }

  OperatorKind kind_ = OperatorKind::GeneralDense;
  Index n1_ = 0;
  Index n2_ = 0;
  Matrix a_;
  std::vector<EntryIndex> omega_;
};

}  // namespace srf
