#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include "srf/types.hpp"

namespace srf {

enum class FamilyId { Gaussian, Tanh, Rational, Custom };

// A one-dimensional bump used to smooth the rank function. f maps R into
// [0, 1], equals 1 only at 0, is even, and decays to 0. The functions here
// are at unit scale; a width-delta version is f(x / delta), and its
// derivative in x is df(x / delta) / delta. inverse_on_unit(y) returns the
// non-negative x with f(x) = y for y in (0, 1], used for tail thresholds.
// decay_horizon is a precomputed point beyond which f drops below 1e-6.
struct SurrogateFamily {
  FamilyId id = FamilyId::Custom;
  std::string_view name = "custom";
  double (*f)(double) = nullptr;
  double (*df)(double) = nullptr;
  double (*inverse_on_unit)(double) = nullptr;
  double decay_horizon = 0.0;
};

namespace detail {

inline double gaussian_f(double x) { return std::exp(-0.5 * x * x); }
inline double gaussian_df(double x) { return -x * std::exp(-0.5 * x * x); }
inline double gaussian_inv(double y) { return std::sqrt(-2.0 * std::log(y)); }

// 1 - tanh(x^2/2) rewritten as 2/(exp(x^2)+1): the subtraction form is
// quantized at machine epsilon near zero, which wrecks the tail where the
// value is ~1e-13 but still meaningful. exp overflow gives a clean 0.
inline double tanh_f(double x) { return 2.0 / (std::exp(x * x) + 1.0); }
inline double tanh_df(double x) {
  const double s = 1.0 / std::cosh(0.5 * x * x);
  return -x * s * s;
}

// No closed form for the tanh inverse, so bisect. tanh_f is strictly
// decreasing on [0, inf) which makes the bracket maintenance trivial.
inline double tanh_inv(double y) {
  if (y >= 1.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (tanh_f(hi) > y) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval exhausted in doubles
    if (tanh_f(mid) > y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline double rational_f(double x) { return 1.0 / (x * x + 1.0); }
inline double rational_df(double x) {
  const double d = x * x + 1.0;
  return -2.0 * x / (d * d);
}
inline double rational_inv(double y) { return std::sqrt(1.0 / y - 1.0); }

}  // namespace detail

inline SurrogateFamily gaussian_family() {
  return {FamilyId::Gaussian, "gaussian",
          detail::gaussian_f, detail::gaussian_df, detail::gaussian_inv, 6.0};
}

inline SurrogateFamily tanh_family() {
  return {FamilyId::Tanh, "tanh",
          detail::tanh_f, detail::tanh_df, detail::tanh_inv, 5.0};
}

// The rational bump has a fat tail: f(x) < 1e-6 only past x ~ 1000.
inline SurrogateFamily rational_family() {
  return {FamilyId::Rational, "rational",
          detail::rational_f, detail::rational_df, detail::rational_inv, 1.1e3};
}

inline SurrogateFamily family_by_name(std::string_view name) {
  if (name == "gaussian") return gaussian_family();
  if (name == "tanh") return tanh_family();
  if (name == "rational") return rational_family();
  throw std::invalid_argument("unknown surrogate family \"" + std::string(name) +
                              "\"; expected gaussian, tanh, or rational");
}

inline void check_family(const SurrogateFamily& family, const char* what) {
  if (family.f == nullptr || family.df == nullptr || family.inverse_on_unit == nullptr)
    throw std::invalid_argument(std::string(what) + ": family has null function pointers");
}

inline void check_delta(double delta, const char* what) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument(std::string(what) + ": delta must be positive and finite");
}

/// Width-delta bump evaluated at x.
inline double f_eval(const SurrogateFamily& family, double x, double delta) {
  check_family(family, "f_eval");
  check_delta(delta, "f_eval");
  return family.f(x / delta);
}

inline double big_f_from_singular_values(const Vector& sigma, double delta,
                                         const SurrogateFamily& family) {
  double total = 0.0;
  for (Index i = 0; i < sigma.size(); ++i) total += family.f(sigma[i] / delta);
  return total;
}

/// F_delta(X) = sum_i f(sigma_i(X) / delta). As delta shrinks this tends to
/// the number of zero singular values, i.e. min(n1, n2) - rank(X).
inline double big_f(const Matrix& x, double delta, const SurrogateFamily& family) {
  check_family(family, "big_f");
  check_delta(delta, "big_f");
  return big_f_from_singular_values(singular_values(x), delta, family);
}

/// Gradient of big_f with respect to X: U diag(theta) V^T with
/// theta_i = df(sigma_i / delta) / delta. All three built-in families have
/// df(0) = 0, so repeated or zero singular values need no special casing.
inline Matrix grad_big_f(const Matrix& x, double delta, const SurrogateFamily& family) {
  check_family(family, "grad_big_f");
  check_delta(delta, "grad_big_f");
  const SvdTriple t = svd(x);
  Vector theta(t.sigma.size());
  for (Index i = 0; i < t.sigma.size(); ++i)
    theta[i] = family.df(t.sigma[i] / delta) / delta;
  return t.u * theta.asDiagonal() * t.v.transpose();
}

/// Threshold alpha with f(alpha / delta) = 1/n: singular values above it
/// contribute less than 1/n to F_delta. Linear in delta by construction.
inline double alpha_delta(const SurrogateFamily& family, double delta, int n) {
  check_family(family, "alpha_delta");
  check_delta(delta, "alpha_delta");
  if (n < 2)
    throw std::invalid_argument("alpha_delta: n must be at least 2");
  return delta * std::abs(family.inverse_on_unit(1.0 / static_cast<double>(n)));
}

/// Outcome of the structural checks below, one flag per requirement.
struct FamilyValidationReport {
  bool range_in_unit_interval = false;
  bool symmetric = false;
  bool peak_only_at_zero = false;
  bool nonincreasing_from_zero = false;
  bool negative_curvature_at_zero = false;
  bool decays_past_horizon = false;

  bool all_pass() const {
    return range_in_unit_interval && symmetric && peak_only_at_zero &&
           nonincreasing_from_zero && negative_curvature_at_zero && decays_past_horizon;
  }
};

/// Checks a family against the shape requirements on a fixed deterministic
/// grid. Failures are recorded in the report, not thrown, so a bad custom
/// family can be diagnosed clause by clause.
inline FamilyValidationReport validate_family(const SurrogateFamily& family) {
  check_family(family, "validate_family");
  FamilyValidationReport rep;

  constexpr int kHalfPoints = 5000;
  constexpr double kSpan = 50.0;

  rep.range_in_unit_interval = true;
  rep.symmetric = true;
  rep.peak_only_at_zero = std::abs(family.f(0.0) - 1.0) <= 1e-12;
  rep.nonincreasing_from_zero = true;

  double prev = family.f(0.0);
  for (int k = 1; k <= kHalfPoints; ++k) {
    const double x = kSpan * static_cast<double>(k) / kHalfPoints;
    const double fx = family.f(x);
    const double fneg = family.f(-x);
    if (!(fx >= 0.0 && fx <= 1.0) || !(fneg >= 0.0 && fneg <= 1.0))
      rep.range_in_unit_interval = false;
    if (std::abs(fx - fneg) > 1e-12) rep.symmetric = false;
    if (fx >= 1.0) rep.peak_only_at_zero = false;
    if (fx > prev + 1e-12) rep.nonincreasing_from_zero = false;
    prev = fx;
  }

  // Second difference at 0; concavity there is what makes the smoothed
  // objective flatten across small singular values.
  const double h = 1e-4;
  const double second = (family.f(h) - 2.0 * family.f(0.0) + family.f(-h)) / (h * h);
  rep.negative_curvature_at_zero = second < 0.0;

  rep.decays_past_horizon = family.decay_horizon > 0.0;
  for (double scale : {1.0, 1.5, 4.0, 16.0}) {
    const double x = family.decay_horizon * scale;
    if (!(family.f(x) < 1e-6)) rep.decays_past_horizon = false;
  }

  return rep;
}

}  // namespace srf
