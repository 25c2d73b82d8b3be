#pragma once

#include <utility>

#include "srf/operators.hpp"
#include "srf/random.hpp"

namespace srf {

// Orthogonal projector onto the affine set {X : A(X) = b}, and onto the
// parallel null space {X : A(X) = 0}. For a dense operator the Cholesky
// factor of A A^T is computed once at construction; each projection is then
// two operator applications plus a triangular solve, and the pseudoinverse
// is never formed. Entry sampling needs no factorization at all: projecting
// just overwrites the observed entries.
class AffineProjector {
 public:
  AffineProjector(AffineOperator op, Vector b) : op_(std::move(op)), b_(std::move(b)) {
    if (b_.size() != op_.m())
      throw std::invalid_argument("projector: b has length " + std::to_string(b_.size()) +
                                  " but the operator produces " + std::to_string(op_.m()) +
                                  " measurements");
    require_finite(b_, "projector");
    if (op_.kind() == OperatorKind::GeneralDense) {
      const Matrix& a = op_.a_matrix();
      gram_llt_.compute(a * a.transpose());
      if (gram_llt_.info() != Eigen::Success)
        throw std::invalid_argument(
            "projector: operator not full row rank (A A^T has a non-positive "
            "Cholesky pivot)");
      condition_estimate_ = 1.0 / gram_llt_.rcond();
      // Exactly dependent rows fail the factorization above; almost
      // dependent ones land here. Past 1e14 the projection formula is
      // meaningless, below that but past 1e12 results degrade, so: error,
      // then warning flag.
      if (!(condition_estimate_ < 1e14))
        throw std::invalid_argument(
            "projector: operator not full row rank (condition of A A^T estimated at " +
            std::to_string(condition_estimate_) + ")");
      if (condition_estimate_ > 1e12)
        ill_conditioned_ = true;
    }
  }

  const AffineOperator& op() const { return op_; }
  const Vector& b() const { return b_; }

  /// True when cond(A A^T) was estimated above 1e12 at construction.
  /// Projections still run; downstream quality is the caller's problem.
  bool ill_conditioned() const { return ill_conditioned_; }
  double condition_estimate() const { return condition_estimate_; }

  /// Nearest matrix (in Frobenius norm) satisfying A(X) = b.
  Matrix project(const Matrix& x) const { return project_impl(x, b_); }

  /// Nearest matrix satisfying A(X) = 0.
  Matrix project_null(const Matrix& x) const {
    return project_impl(x, Vector::Zero(b_.size()));
  }

  /// Minimum Frobenius norm solution of A(X) = b, i.e. project(0).
  Matrix min_frobenius_solution() const {
    return project(Matrix::Zero(op_.rows(), op_.cols()));
  }

  /// A seeded nonzero element of null(A), for probing the operator.
  /// Deterministic in the seed. Requires m < n1 * n2.
  Matrix null_space_sample(std::uint64_t seed) const {
    const Index total = op_.rows() * op_.cols();
    if (op_.m() >= total)
      throw std::invalid_argument("null_space_sample: operator has no null space to sample");
    NormalSampler rng(seed);
    for (int attempt = 0; attempt < 64; ++attempt) {
      Matrix r(op_.rows(), op_.cols());
      for (Index j = 0; j < r.cols(); ++j)
        for (Index i = 0; i < r.rows(); ++i) r(i, j) = rng.normal();
      Matrix z = project_null(r);
      // A fresh Gaussian almost surely has an order-1 component in the null
      // space; the retry loop exists only for pathological conditioning.
      if (z.norm() > 1e-8) return z;
    }
    throw NumericError("null_space_sample: could not draw a nonzero null space element");
  }

 private:
  Matrix project_impl(const Matrix& x, const Vector& target) const {
    require_finite(x, "project");
    if (x.rows() != op_.rows() || x.cols() != op_.cols())
      throw std::invalid_argument("project: expected a " + std::to_string(op_.rows()) + " x " +
                                  std::to_string(op_.cols()) + " matrix, got " +
                                  std::to_string(x.rows()) + " x " + std::to_string(x.cols()));
    if (op_.kind() == OperatorKind::EntrySampling) {
      Matrix out = x;
      const auto& omega = op_.omega();
      for (std::size_t k = 0; k < omega.size(); ++k)
        out(omega[k].row, omega[k].col) = target[static_cast<Index>(k)];
      return out;
    }
    // X + A^T (A A^T)^{-1} (target - A(X)), with A acting on stacked columns.
    const Vector residual = target - op_.apply(x);
    return x + op_.adjoint(gram_llt_.solve(residual));
  }

  AffineOperator op_;
  Vector b_;
  Eigen::LLT<Matrix> gram_llt_;
  bool ill_conditioned_ = false;
  double condition_estimate_ = 1.0;
};

}  // namespace srf
