#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "srf/projection.hpp"
#include "srf/surrogate.hpp"

namespace srf {

// Null-space geometry diagnostics. The central quantity is the spherical
// ratio ||Z||_*^2 / ||Z||_F^2 of a null space element; its minimum over the
// whole null space governs uniqueness of low-rank solutions and the error
// bounds of the smoothed solver. That minimum is a non-convex program, so
// everything here works with per-element ratios (valid for the same
// inequalities) plus a sampled upper bound on the operator-level constant.

/// Ceiling with a nudge for values sitting on an integer boundary after
/// floating-point arithmetic: ceil_stable(2.0000000000000004) = 2.
inline double ceil_stable(double x) { return std::ceil(x - 1e-12); }

/// (sum sigma_i)^2 / (sum sigma_i^2), always in [1, min(n1, n2)].
/// Equals the rank when all nonzero singular values coincide.
inline double spherical_ratio(const Matrix& z) {
  const Vector sigma = singular_values(z);
  if (sigma[0] == 0.0)
    throw std::invalid_argument("spherical_ratio: zero matrix");
  const double nuc = sigma.sum();
  return (nuc * nuc) / sigma.squaredNorm();
}

/// Sufficient uniqueness condition: a feasible matrix of rank r0 is the
/// unique minimum-rank solution when r0 < delta / 2.
inline bool check_uniqueness_condition(int r0, double delta) {
  if (r0 < 0)
    throw std::invalid_argument("check_uniqueness_condition: rank must be non-negative");
  if (!(delta >= 1.0))
    throw std::invalid_argument("check_uniqueness_condition: delta must be at least 1");
  return static_cast<double>(r0) < delta / 2.0;
}

/// Best (smallest) spherical ratio found by sampling the null space.
struct SspEstimate {
  double delta_upper = 0.0;  // upper bound on the operator-level constant
  Matrix witness;            // the null space element achieving it
  int samples_used = 0;
};

/// Samples num_samples null space directions and refines each one by a few
/// projected gradient steps on the ratio. The result only bounds the true
/// constant from above: it can show that a uniqueness condition FAILS, but
/// never that it holds. Deterministic in the seed; more samples can only
/// lower the bound (sample k always uses sub-seed k).
inline SspEstimate estimate_ssp(const AffineProjector& projector, int num_samples,
                                int descent_steps, std::uint64_t seed) {
  if (num_samples < 1)
    throw std::invalid_argument("estimate_ssp: need at least one sample");
  if (descent_steps < 0)
    throw std::invalid_argument("estimate_ssp: descent_steps must be non-negative");

  double best = std::numeric_limits<double>::infinity();
  Matrix witness;
  const auto consider = [&](const Matrix& z) {
    const double ratio = spherical_ratio(z);
    if (ratio < best) {
      best = ratio;
      witness = z;
    }
  };

  for (int k = 0; k < num_samples; ++k) {
    Matrix z = projector.null_space_sample(derive_seed(seed, static_cast<std::uint64_t>(k)));
    z /= z.norm();
    consider(z);

    Matrix cur = z;
    for (int step = 0; step < descent_steps; ++step) {
      const SvdTriple t = svd(cur);
      const double nuc = t.sigma.sum();
      const double fro2 = t.sigma.squaredNorm();
      // Gradient of (sum sigma)^2 / (sum sigma^2); U V^T is the gradient of
      // the nuclear norm away from repeated singular values and a valid
      // subgradient otherwise, good enough for a refinement heuristic.
      Matrix grad = (2.0 * nuc / fro2) * (t.u * t.v.transpose()) -
                    (2.0 * nuc * nuc / (fro2 * fro2)) * cur;
      grad = projector.project_null(grad);
      const double eta = 0.1 / std::sqrt(static_cast<double>(step) + 1.0);
      cur = projector.project_null(cur - eta * grad);
      const double nrm = cur.norm();
      if (nrm < 1e-12) break;  // collapsed to the origin, abandon this line
      cur /= nrm;
      consider(cur);
    }
  }

  // Recompute from the witness so the two reported fields agree exactly.
  return {spherical_ratio(witness), std::move(witness), num_samples};
}

struct Lemma2Check {
  double lhs = 0.0;    // sum of the selected singular values / ||z||_F
  double rhs = 0.0;    // sqrt(ratio) - sqrt(n - |I|)
  bool holds = false;
};

/// Tail inequality for null space elements: for any subset I of singular
/// value positions (1-based, into the descending order),
/// sum_{i in I} sigma_i / ||z||_F >= sqrt(ratio) - sqrt(n - |I|).
/// Checked with this element's own ratio, which the same proof supports.
inline Lemma2Check check_lemma2(const Matrix& z, const std::vector<int>& index_set) {
  const Vector sigma = singular_values(z);
  if (sigma[0] == 0.0)
    throw std::invalid_argument("check_lemma2: zero matrix");
  const int n = static_cast<int>(sigma.size());
  std::set<int> seen;
  for (int idx : index_set) {
    if (idx < 1 || idx > n)
      throw std::invalid_argument("check_lemma2: index " + std::to_string(idx) +
                                  " outside 1.." + std::to_string(n));
    if (!seen.insert(idx).second)
      throw std::invalid_argument("check_lemma2: duplicate index " + std::to_string(idx));
  }

  const double fro = sigma.norm();
  double selected = 0.0;
  for (int idx : seen) selected += sigma[idx - 1];

  Lemma2Check out;
  out.lhs = selected / fro;
  const double ratio = (sigma.sum() * sigma.sum()) / sigma.squaredNorm();
  out.rhs = std::sqrt(ratio) - std::sqrt(static_cast<double>(n - static_cast<int>(seen.size())));
  out.holds = out.lhs >= out.rhs - 1e-10;
  return out;
}

struct Corollary3Check {
  double delta_z = 0.0;
  double ceil_delta_minus_1 = 0.0;
  int svs_above_alpha = 0;
  bool hypothesis_met = false;  // at most ceil(delta_z - 1) SVs exceed alpha
  bool applicable = false;      // hypothesis met and denominator positive
  double bound = 0.0;           // n * alpha / (sqrt(dz) - sqrt(ceil(dz - 1)))
  bool holds = false;           // ||z||_F <= bound + 1e-10
};

/// Frobenius norm bound for null space elements whose singular values are
/// mostly small: if at most ceil(ratio - 1) of them exceed alpha, then
/// ||z||_F <= n * alpha / (sqrt(ratio) - sqrt(ceil(ratio - 1))).
/// Integer ratios make the denominator vanish; reported as not applicable.
inline Corollary3Check corollary3_bound(const Matrix& z, double alpha) {
  if (!std::isfinite(alpha))
    throw std::invalid_argument("corollary3_bound: alpha must be finite");
  const Vector sigma = singular_values(z);
  if (sigma[0] == 0.0)
    throw std::invalid_argument("corollary3_bound: zero matrix");

  Corollary3Check out;
  const double nuc = sigma.sum();
  out.delta_z = (nuc * nuc) / sigma.squaredNorm();
  out.ceil_delta_minus_1 = ceil_stable(out.delta_z - 1.0);
  for (Index i = 0; i < sigma.size(); ++i)
    if (sigma[i] > alpha) ++out.svs_above_alpha;
  out.hypothesis_met = out.svs_above_alpha <= static_cast<int>(out.ceil_delta_minus_1);

  const double denom = std::sqrt(out.delta_z) - std::sqrt(out.ceil_delta_minus_1);
  if (!out.hypothesis_met || !(denom > 0.0)) return out;

  out.applicable = true;
  out.bound = static_cast<double>(sigma.size()) * alpha / denom;
  out.holds = z.norm() <= out.bound + 1e-10;
  return out;
}

/// Worst-case recovery error of the width-delta smoothed problem under a
/// spherical ratio of ssp_delta, for the Gaussian bump: the threshold there
/// is delta * sqrt(2 ln n). Empty when the denominator degenerates
/// (integer ssp_delta).
inline std::optional<double> corollary4_error_bound(int n, double delta_param,
                                                    double ssp_delta) {
  if (n < 2)
    throw std::invalid_argument("corollary4_error_bound: n must be at least 2");
  if (!(delta_param >= 0.0))
    throw std::invalid_argument("corollary4_error_bound: delta must be non-negative");
  if (!(ssp_delta >= 1.0))
    throw std::invalid_argument("corollary4_error_bound: ssp_delta must be at least 1");
  const double denom = std::sqrt(ssp_delta) - std::sqrt(ceil_stable(ssp_delta - 1.0));
  if (!(denom > 0.0)) return std::nullopt;
  const double alpha = delta_param * std::sqrt(2.0 * std::log(static_cast<double>(n)));
  return static_cast<double>(n) * alpha / denom;
}

// Every quantity appearing in the objective-implies-small-error argument,
// evaluated on a concrete pair (x0, x_hat) with the difference playing the
// role of the null space element. Fields are ordered along the chain.
struct Lemma3ChainReport {
  bool trivial = false;          // x_hat == x0, nothing to check
  int r0 = 0;                    // numeric rank of x0
  double delta_z = 0.0;          // spherical ratio of x0 - x_hat
  double ceil_delta_minus_1 = 0.0;
  double f_delta_xhat = 0.0;
  bool f_geq_n_minus_r0 = false;     // objective at least n - r0
  bool rank_condition_met = false;   // 2 r0 <= ceil(delta_z - 1)
  bool condition16_met = false;      // objective at least n - (ceil - r0)
  double alpha = 0.0;                // f^{-1}(1/n) scaled by delta_param
  int svs_above_alpha_xhat = 0;
  bool xhat_count_ok = false;        // claimed: count <= ceil - r0
  int svs_above_alpha_diff = 0;
  bool diff_count_ok = false;        // claimed: count <= ceil
  bool bound_applicable = false;     // denominator positive
  double bound = 0.0;
  double error_norm = 0.0;
  bool error_within_bound = false;

  /// True when every step that the hypothesis licenses actually verified.
  /// A pair failing the objective condition passes vacuously: the argument
  /// claims nothing about it.
  bool chain_holds() const {
    if (trivial) return true;
    if (!condition16_met) return true;
    if (!(xhat_count_ok && diff_count_ok)) return false;
    return !bound_applicable || error_within_bound;
  }
};

inline Lemma3ChainReport check_lemma3_chain(const Matrix& x0, const Matrix& x_hat,
                                            double delta_param,
                                            const SurrogateFamily& family) {
  if (x0.rows() != x_hat.rows() || x0.cols() != x_hat.cols())
    throw std::invalid_argument("check_lemma3_chain: shapes disagree");
  check_family(family, "check_lemma3_chain");
  check_delta(delta_param, "check_lemma3_chain");

  Lemma3ChainReport rep;
  const Matrix diff = x0 - x_hat;
  rep.error_norm = diff.norm();
  rep.r0 = numeric_rank(x0);
  if (rep.error_norm == 0.0) {
    rep.trivial = true;
    return rep;
  }

  const int n = static_cast<int>(std::min(x0.rows(), x0.cols()));
  const Vector sigma_diff = singular_values(diff);
  const double nuc = sigma_diff.sum();
  rep.delta_z = (nuc * nuc) / sigma_diff.squaredNorm();
  rep.ceil_delta_minus_1 = ceil_stable(rep.delta_z - 1.0);

  const Vector sigma_hat = singular_values(x_hat);
  rep.f_delta_xhat = big_f_from_singular_values(sigma_hat, delta_param, family);
  rep.f_geq_n_minus_r0 = rep.f_delta_xhat >= static_cast<double>(n - rep.r0) - 1e-10;
  rep.rank_condition_met = 2.0 * rep.r0 <= rep.ceil_delta_minus_1;
  const double target = static_cast<double>(n) - (rep.ceil_delta_minus_1 - rep.r0);
  rep.condition16_met = rep.f_delta_xhat >= target - 1e-10;

  // alpha at 1/n; for n = 1 every family gives f^{-1}(1) = 0.
  rep.alpha = delta_param * std::abs(family.inverse_on_unit(1.0 / static_cast<double>(n)));

  for (Index i = 0; i < sigma_hat.size(); ++i)
    if (sigma_hat[i] > rep.alpha) ++rep.svs_above_alpha_xhat;
  rep.xhat_count_ok =
      rep.svs_above_alpha_xhat <= static_cast<int>(rep.ceil_delta_minus_1) - rep.r0;

  for (Index i = 0; i < sigma_diff.size(); ++i)
    if (sigma_diff[i] > rep.alpha) ++rep.svs_above_alpha_diff;
  rep.diff_count_ok = rep.svs_above_alpha_diff <= static_cast<int>(rep.ceil_delta_minus_1);

  const double denom = std::sqrt(rep.delta_z) - std::sqrt(rep.ceil_delta_minus_1);
  rep.bound_applicable = denom > 0.0;
  if (rep.bound_applicable) {
    rep.bound = static_cast<double>(n) * rep.alpha / denom;
    rep.error_within_bound = rep.error_norm <= rep.bound + 1e-10;
  }
  return rep;
}

}  // namespace srf
