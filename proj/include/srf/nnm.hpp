#pragma once

#include <chrono>
#include <cmath>

#include "srf/solver.hpp"

namespace srf {

// Nuclear norm minimization by alternating projections: soft-threshold the
// singular values, project back onto the measurement set, with a threshold
// that decays harmonically. This is a deliberately plain baseline, not a
// tuned solver of the accelerated-gradient class; it is here to give the
// rank-smoothing solver something standard to be compared against.
struct NnmConfig {
  double step = 1.0;        // relaxation factor applied to each update
  double shrink_tau = 1.0;  // threshold scale; see solve_nnm for the schedule
  int max_iters = 5000;
  double tol = 1e-7;        // stop when per-entry RMS movement drops below

  void validate() const {
    if (!(step > 0.0 && step <= 2.0))
      throw std::invalid_argument("nnm config: step must be in (0, 2]");
    if (!(shrink_tau > 0.0) || !std::isfinite(shrink_tau))
      throw std::invalid_argument("nnm config: shrink_tau must be positive");
    if (max_iters < 1)
      throw std::invalid_argument("nnm config: max_iters must be at least 1");
    if (!(tol > 0.0) || !std::isfinite(tol))
      throw std::invalid_argument("nnm config: tol must be positive");
  }
};

/// Singular value soft thresholding: subtract tau from every singular
/// value, clamping at zero. tau = 0 returns X (up to SVD roundoff).
inline Matrix sv_shrink(const Matrix& x, double tau) {
  if (tau < 0.0 || !std::isfinite(tau))
    throw std::invalid_argument("sv_shrink: tau must be non-negative");
  const SvdTriple t = svd(x);
  const Vector s = (t.sigma.array() - tau).max(0.0).matrix();
  return t.u * s.asDiagonal() * t.v.transpose();
}

/// Minimizes the nuclear norm over {X : A(X) = b}, approximately, by
/// alternating the threshold with the projection under the diminishing
/// schedule tau_k = shrink_tau / k. Every iterate is feasible; the trace
/// records the threshold in the delta slot and the nuclear norm in the
/// f_delta slot.
inline SolveReport solve_nnm(const AffineProjector& projector, const NnmConfig& config = {}) {
  using clock = std::chrono::steady_clock;
  config.validate();

  Matrix x = projector.min_frobenius_solution();
  SolveReport report;
  const Vector sigma0 = singular_values(x);
  if (sigma0[0] == 0.0) {
    report.solution = std::move(x);
    report.converged = true;
    return report;
  }
  const double cell_norm =
      std::sqrt(static_cast<double>(x.rows()) * static_cast<double>(x.cols()));

  for (int k = 1; k <= config.max_iters; ++k) {
    const auto t0 = clock::now();
    const double tau_k = config.shrink_tau / static_cast<double>(k);

    const SvdTriple t = svd(x);
    const Vector s = (t.sigma.array() - tau_k).max(0.0).matrix();
    Matrix next = projector.project(t.u * s.asDiagonal() * t.v.transpose());
    if (config.step != 1.0) {
      // Relaxed combination of two feasible points stays feasible.
      next = x + config.step * (next - x);
    }

    StageRecord rec;
    rec.delta = tau_k;
    rec.d = (next - x).norm() / cell_norm;
    rec.f_delta = t.sigma.sum();  // nuclear norm of the pre-step iterate
    rec.numeric_rank = numeric_rank_sigma(t.sigma);
    rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    report.outer_trace.push_back(rec);
    report.total_inner_steps += 1;

    x = std::move(next);
    if (rec.d <= config.tol) {
      report.converged = true;
      break;
    }
  }

  report.solution = std::move(x);
  return report;
}

inline SolveReport solve_nnm(const AffineOperator& op, const Vector& b,
                             const NnmConfig& config = {}) {
  config.validate();
  return solve_nnm(AffineProjector(op, b), config);
}

}  // namespace srf
