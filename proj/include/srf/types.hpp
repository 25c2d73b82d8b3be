#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace srf {

// Dense real matrices throughout. Eigen's default storage is column-major,
// so vectorize() below is a flat view of the underlying buffer rather than
// a copy with reordering.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thrown when a numeric kernel (SVD, factorization) fails to produce a
/// usable result. Input validation problems throw std::invalid_argument
/// instead; the two are distinguished at the CLI boundary by exit code.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Relative threshold deciding which singular values count toward the
/// numeric rank. Shared by every module so that rank reports agree.
inline constexpr double kNumericRankRelTol = 1e-9;

inline void require_finite(const Matrix& x, const char* what) {
  if (!x.allFinite())
    throw std::invalid_argument(std::string(what) + ": matrix has non-finite entries");
}

inline void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite())
    throw std::invalid_argument(std::string(what) + ": vector has non-finite entries");
}

/// Column stacking: entry (i, j) of an n1 x n2 matrix lands at index
/// j * n1 + i of the result.
inline Vector vectorize(const Matrix& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

inline Matrix unvectorize(const Vector& v, Index n1, Index n2) {
  if (n1 < 1 || n2 < 1)
    throw std::invalid_argument("unvectorize: target shape must be positive");
  if (v.size() != n1 * n2)
    throw std::invalid_argument("unvectorize: vector of length " + std::to_string(v.size()) +
                                " cannot fill a " + std::to_string(n1) + " x " +
                                std::to_string(n2) + " matrix");
  return Eigen::Map<const Matrix>(v.data(), n1, n2);
}

/// Thin SVD, X = u * sigma.asDiagonal() * v^T with sigma sorted descending.
/// u is n1 x k and v is n2 x k where k = min(n1, n2).
struct SvdTriple {
  Matrix u;
  Vector sigma;
  Matrix v;
};

inline SvdTriple svd(const Matrix& x) {
  require_finite(x, "svd");
  Eigen::BDCSVD<Matrix> dec(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success)
    throw NumericError("svd: decomposition did not converge");
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

/// Singular values only, cheaper than svd() when the factors are not needed.
inline Vector singular_values(const Matrix& x) {
  require_finite(x, "singular_values");
  Eigen::BDCSVD<Matrix> dec(x);
  if (dec.info() != Eigen::Success)
    throw NumericError("singular_values: decomposition did not converge");
  return dec.singularValues();
}

/// Count of singular values above rel_tol times the largest one. Expects
/// the vector sorted descending, as produced by svd() and singular_values().
inline int numeric_rank_sigma(const Vector& sigma, double rel_tol = kNumericRankRelTol) {
  if (sigma.size() == 0) return 0;
  const double cut = rel_tol * sigma[0];
  int r = 0;
  for (Index i = 0; i < sigma.size(); ++i)
    if (sigma[i] > cut) ++r;
  return r;
}

inline int numeric_rank(const Matrix& x, double rel_tol = kNumericRankRelTol) {
  return numeric_rank_sigma(singular_values(x), rel_tol);
}

}  // namespace srf
