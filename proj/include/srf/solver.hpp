#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "srf/projection.hpp"
#include "srf/surrogate.hpp"

namespace srf {

/// RSNR values are capped here; beyond ~300 dB the error is pure roundoff.
inline constexpr double kRsnrCapDb = 300.0;

/// Reconstruction SNR in dB: 20 log10(||X|| / ||X - Xhat||), Frobenius.
inline double rsnr(const Matrix& x_true, const Matrix& x_hat) {
  if (x_true.rows() != x_hat.rows() || x_true.cols() != x_hat.cols())
    throw std::invalid_argument("rsnr: shapes disagree");
  require_finite(x_true, "rsnr");
  require_finite(x_hat, "rsnr");
  const double ref = x_true.norm();
  if (ref == 0.0)
    throw std::invalid_argument("rsnr: reference matrix is zero");
  const double err = (x_true - x_hat).norm();
  if (err == 0.0) return kRsnrCapDb;
  return std::min(kRsnrCapDb, 20.0 * std::log10(ref / err));
}

// Solver parameters. Defaults are the ones that work across the benchmark
// problems; mu is the raw step constant, scaled by delta^2 before use so
// that one setting serves every stage of the continuation.
struct SolverConfig {
  double mu = 1.0;
  double c = 0.9;              // delta decay ratio per outer stage
  int inner_iters = 8;         // gradient-projection steps per stage (L)
  double epsilon = 1e-5;       // stop when stage movement falls below this
  double delta1_factor = 2.0;  // delta_1 = factor * sigma_max(initial point)
  int max_outer_iters = 1000;
  SurrogateFamily family = gaussian_family();

  void validate() const {
    if (!(mu > 0.0) || !std::isfinite(mu))
      throw std::invalid_argument("solver config: mu must be positive");
    if (!(c > 0.0 && c < 1.0))
      throw std::invalid_argument("solver config: c must be in (0, 1)");
    if (inner_iters < 1)
      throw std::invalid_argument("solver config: inner_iters must be at least 1");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
      throw std::invalid_argument("solver config: epsilon must be positive");
    if (!(delta1_factor > 0.0) || !std::isfinite(delta1_factor))
      throw std::invalid_argument("solver config: delta1_factor must be positive");
    if (max_outer_iters < 1)
      throw std::invalid_argument("solver config: max_outer_iters must be at least 1");
    check_family(family, "solver config");
  }
};

/// One outer stage as recorded in the trace.
struct StageRecord {
  double delta = 0.0;
  double d = 0.0;        // ||X_j - X_{j-1}||_F / sqrt(n1 * n2)
  double f_delta = 0.0;  // smoothed objective at the stage result
  int numeric_rank = 0;
  double wall_ms = 0.0;
};

struct SolveReport {
  Matrix solution;
  std::vector<StageRecord> outer_trace;
  bool converged = false;
  long total_inner_steps = 0;
  /// Filled by callers that know the ground truth; solvers leave it empty.
  std::optional<double> rsnr_db;
};

/// Mutable state threaded through the outer loop. Exposed so that tests and
/// diagnostics can drive stages one at a time; solve() below is the normal
/// entry point.
struct SolverState {
  Matrix x_current;
  Matrix x_previous;
  double delta = 0.0;
  int outer_index = 0;
};

/// Feasible starting point (minimum Frobenius norm solution) and initial
/// smoothing width delta_1 = delta1_factor * sigma_max. A zero starting
/// point (b = 0) gets delta_1 = delta1_factor; the solver returns it as-is.
inline SolverState initialize(const AffineProjector& projector, const SolverConfig& config) {
  config.validate();
  SolverState st;
  st.x_current = projector.min_frobenius_solution();
  st.x_previous = st.x_current;
  const double sigma_max = singular_values(st.x_current)[0];
  st.delta = config.delta1_factor * (sigma_max > 0.0 ? sigma_max : 1.0);
  st.outer_index = 0;
  return st;
}

/// Runs config.inner_iters gradient-projection steps at fixed delta:
/// ascend the smoothed objective along U diag(df(sigma_i/delta)/delta) V^T
/// with step mu * delta^2, then project back onto the measurement set.
/// The delta^2 factor cancels one 1/delta from the gradient and keeps step
/// lengths proportional to the current smoothing scale.
inline Matrix inner_gp_loop(Matrix x, double delta, const AffineProjector& projector,
                            const SolverConfig& config) {
  check_delta(delta, "inner_gp_loop");
  if (config.inner_iters < 0)
    throw std::invalid_argument("inner_gp_loop: inner_iters must be non-negative");
  const double step = config.mu * delta;  // times theta_i / 1, see below
  for (int l = 0; l < config.inner_iters; ++l) {
    SvdTriple t;
    try {
      t = svd(x);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " (inner step " + std::to_string(l + 1) + ")");
    }
    // mu * delta^2 * df(sigma/delta) / delta = mu * delta * df(sigma/delta)
    Vector move(t.sigma.size());
    for (Index i = 0; i < t.sigma.size(); ++i)
      move[i] = step * config.family.df(t.sigma[i] / delta);
    x += t.u * move.asDiagonal() * t.v.transpose();
    x = projector.project(x);
  }
  return x;
}

/// Full continuation solve. Starts wide (delta_1 from initialize), runs the
/// inner loop at each width, shrinks delta by c, and stops when an outer
/// stage moves the iterate by less than epsilon per entry (root mean
/// square), or when max_outer_iters stages have run.
inline SolveReport solve(const AffineProjector& projector, const SolverConfig& config = {}) {
  using clock = std::chrono::steady_clock;
  config.validate();
  SolverState st = initialize(projector, config);

  SolveReport report;
  if (st.x_current.norm() == 0.0) {
    // b = 0: the zero matrix is feasible and has minimal rank already.
    report.solution = st.x_current;
    report.converged = true;
    return report;
  }

  const double cell_norm =
      std::sqrt(static_cast<double>(st.x_current.rows()) * static_cast<double>(st.x_current.cols()));

  while (st.outer_index < config.max_outer_iters) {
    const auto t0 = clock::now();
    st.outer_index += 1;
    st.x_previous = st.x_current;
    try {
      st.x_current = inner_gp_loop(st.x_current, st.delta, projector, config);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " (outer stage " +
                         std::to_string(st.outer_index) + ")");
    }
    report.total_inner_steps += config.inner_iters;

    StageRecord rec;
    rec.delta = st.delta;
    rec.d = (st.x_current - st.x_previous).norm() / cell_norm;
    const Vector sigma = singular_values(st.x_current);
    rec.f_delta = big_f_from_singular_values(sigma, st.delta, config.family);
    rec.numeric_rank = numeric_rank_sigma(sigma);
    rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    report.outer_trace.push_back(rec);

    if (rec.d <= config.epsilon) {
      report.converged = true;
      break;
    }
    st.delta *= config.c;
  }

  report.solution = std::move(st.x_current);
  return report;
}

inline SolveReport solve(const AffineOperator& op, const Vector& b,
                         const SolverConfig& config = {}) {
  config.validate();
  return solve(AffineProjector(op, b), config);
}

}  // namespace srf
