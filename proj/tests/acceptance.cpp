// Acceptance gate for the toolkit: each criterion prints exactly one
// [PASS]/[FAIL] line with the measured numbers next to the pinned bounds.
// The process exits with the number of failed criteria. Everything here is
// deterministic; seeds and tolerances are fixed in the code.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "srf/srf.hpp"

namespace {

using namespace srf;
namespace fs = std::filesystem;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  NormalSampler rng(seed);
  Matrix x(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) x(i, j) = rng.normal();
  return x;
}

bool report(int index, const std::string& name, bool ok, const std::string& detail,
            double seconds) {
  std::ostringstream line;
  line << (ok ? "[PASS] " : "[FAIL] ") << index << ' ' << name << " (" << detail << "; "
       << std::fixed << std::setprecision(1) << seconds << " s)";
  std::cout << line.str() << std::endl;
  return ok;
}

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(3) << v;
  return out.str();
}

// ---- 1: gradient of the smoothed objective vs central differences ----

bool criterion_gradient() {
  Timer timer;
  const double tol = 1e-5;  // max guarded relative entrywise error
  double worst = 0.0;

  const SurrogateFamily families[] = {gaussian_family(), tanh_family(), rational_family()};
  const double deltas[] = {0.1, 1.0, 10.0};

  for (std::uint64_t k = 0; k < 50; ++k) {
    NormalSampler shape(derive_seed(101, k));
    const Index rows = 2 + static_cast<Index>(shape.below(11));  // up to 12
    const Index cols = 2 + static_cast<Index>(shape.below(8));   // up to 9
    const Matrix x = random_matrix(rows, cols, derive_seed(102, k));

    for (const SurrogateFamily& fam : families) {
      for (const double delta : deltas) {
        const Matrix analytic = grad_big_f(x, delta, fam);
        const double gmax = analytic.cwiseAbs().maxCoeff();
        const double h = 2e-5 * delta;  // curvature scales with the width

        for (Index j = 0; j < cols; ++j) {
          for (Index i = 0; i < rows; ++i) {
            Matrix xp = x, xm = x;
            xp(i, j) += h;
            xm(i, j) -= h;
            const double fd = (big_f(xp, delta, fam) - big_f(xm, delta, fam)) / (2.0 * h);
            const double a = analytic(i, j);
            const double denom = std::max({std::abs(a), std::abs(fd), 1e-3 * gmax, 1e-12});
            worst = std::max(worst, std::abs(a - fd) / denom);
          }
        }
      }
    }
  }
  return report(1, "smoothed objective gradient matches finite differences", worst < tol,
                "max mismatch " + fmt(worst) + " vs " + fmt(tol), timer.seconds());
}

// ---- 2: affine projection invariants and the sampling specialization ----

bool criterion_projection() {
  Timer timer;
  const double rel_tol = 1e-8;         // idempotence / feasibility / orthogonality
  const double entry_tol = 1e-14;      // sampling vs dense closed form, per entry
  double worst_invariant = 0.0;
  double worst_entry = 0.0;

  for (int kind = 0; kind < 2; ++kind) {
    for (std::uint64_t k = 0; k < 100; ++k) {
      NormalSampler shape(derive_seed(201 + kind, k));
      const Index n1 = 2 + static_cast<Index>(shape.below(6));
      const Index n2 = 2 + static_cast<Index>(shape.below(6));
      const Index total = n1 * n2;
      const Index m = 1 + static_cast<Index>(shape.below(static_cast<std::uint64_t>(total)));
      const AffineOperator op = kind == 0
                                    ? gen_gaussian_operator(m, n1, n2, derive_seed(203, k))
                                    : gen_mask(n1, n2, m, derive_seed(204, k));
      const Vector b = op.apply(random_matrix(n1, n2, derive_seed(205, k)));
      const AffineProjector p(op, b);
      const Matrix x = 3.0 * random_matrix(n1, n2, derive_seed(206, k));

      const Matrix px = p.project(x);
      const double scale = std::max(1.0, px.norm());
      worst_invariant = std::max(worst_invariant, (p.project(px) - px).norm() / scale);
      worst_invariant = std::max(
          worst_invariant, (op.apply(px) - b).norm() / std::max(1.0, b.norm()));
      const Matrix residual = x - px;
      worst_invariant = std::max(
          worst_invariant, p.project_null(residual).norm() / std::max(1.0, residual.norm()));
    }
  }

  // Entry sampling against the dense row-selection operator, small grids.
  for (std::uint64_t k = 0; k < 40; ++k) {
    NormalSampler shape(derive_seed(207, k));
    const Index n1 = 2 + static_cast<Index>(shape.below(6));
    const Index n2 = 2 + static_cast<Index>(shape.below(6));
    if (n1 * n2 > 64) continue;
    const Index m = 1 + static_cast<Index>(shape.below(static_cast<std::uint64_t>(n1 * n2)));
    const AffineOperator mask = gen_mask(n1, n2, m, derive_seed(208, k));

    Matrix a = Matrix::Zero(m, n1 * n2);
    for (std::size_t r = 0; r < mask.omega().size(); ++r) {
      const EntryIndex& e = mask.omega()[r];
      a(static_cast<Index>(r), e.col * n1 + e.row) = 1.0;
    }
    const AffineOperator dense = AffineOperator::general_dense(std::move(a), n1, n2);

    const Matrix x_true = random_matrix(n1, n2, derive_seed(209, k));
    const Vector b = mask.apply(x_true);
    const AffineProjector pm(mask, b);
    const AffineProjector pd(dense, b);
    const Matrix x = 2.0 * random_matrix(n1, n2, derive_seed(210, k));
    const double scale =
        std::max({1.0, x.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
    const double gap = (pm.project(x) - pd.project(x)).cwiseAbs().maxCoeff();
    worst_entry = std::max(worst_entry, gap / scale);
  }

  const bool ok = worst_invariant < rel_tol && worst_entry < entry_tol;
  return report(2, "projection invariants and sampling specialization", ok,
                "worst invariant " + fmt(worst_invariant) + " vs " + fmt(rel_tol) +
                    ", worst entry gap " + fmt(worst_entry) + " vs " + fmt(entry_tol),
                timer.seconds());
}

// ---- 3: very wide smoothing contracts any feasible start to the
//         minimum-norm solution ----

bool criterion_wide_width() {
  Timer timer;
  const double tol = 1e-3;
  double worst = 0.0;

  for (std::uint64_t k = 0; k < 10; ++k) {
    const bool dense = (k % 2) == 0;
    const Index n1 = dense ? 10 : 15;
    const Index n2 = n1;
    const Index m = dense ? 50 : 120;
    const AffineOperator op = dense ? gen_gaussian_operator(m, n1, n2, derive_seed(301, k))
                                    : gen_mask(n1, n2, m, derive_seed(302, k));
    const Vector b = op.apply(gen_lowrank(n1, n2, 2, derive_seed(303, k)));
    const AffineProjector p(op, b);

    const Matrix x_min = p.min_frobenius_solution();
    const Matrix start =
        p.project(x_min + 3.0 * x_min.norm() * random_matrix(n1, n2, derive_seed(304, k)));

    SolverConfig config;
    config.inner_iters = 200;
    const double delta = 1e6 * singular_values(x_min)[0];
    const Matrix landed = inner_gp_loop(start, delta, p, config);
    worst = std::max(worst, (landed - x_min).norm() / x_min.norm());
  }
  return report(3, "wide-width inner loop lands on the minimum-norm solution", worst < tol,
                "worst relative distance " + fmt(worst) + " vs " + fmt(tol), timer.seconds());
}

// ---- 4: easy-regime recovery rate with default parameters ----

bool criterion_easy_recovery() {
  Timer timer;
  TrialSpec spec;
  spec.kind = ProblemKind::Arm;
  spec.n1 = spec.n2 = 30;
  spec.rank = 3;
  spec.m = 500;
  spec.seed = 401;

  const std::vector<TrialResult> results = run_trials(spec, 50);
  int recovered = 0;
  for (const TrialResult& r : results)
    if (r.recovered) ++recovered;

  const bool ok = recovered >= 45;
  return report(4, "easy dense-measurement problems recover at default settings", ok,
                std::to_string(recovered) + "/50 recovered vs >= 45 at 60 dB",
                timer.seconds());
}

// ---- 5: parameter trends: L plateau, slow width decay, epsilon scaling ----

bool criterion_parameter_trends() {
  Timer timer;

  // (a) inner iteration count: returns plateau by L = 10.
  TrialSpec arm;
  arm.kind = ProblemKind::Arm;
  arm.n1 = arm.n2 = 30;
  arm.rank = 3;
  arm.m = 500;
  arm.seed = 501;
  const SweepResult l_sweep = sweep_parameter(
      arm, SweepParameter::InnerIters, {1.0, 2.0, 4.0, 6.0, 8.0, 10.0}, 20);
  double best_l = l_sweep.rows[0].mean_rsnr_db;
  for (const SweepRow& row : l_sweep.rows) best_l = std::max(best_l, row.mean_rsnr_db);
  const double at_l10 = l_sweep.rows.back().mean_rsnr_db;
  const bool plateau_ok = at_l10 >= best_l - 3.0;

  // (b) slow width decay beats fast decay on a hard completion problem.
  TrialSpec hard;
  hard.kind = ProblemKind::Mc;
  hard.n1 = hard.n2 = 30;
  hard.rank = 3;
  hard.m = 300;  // about 1.75 d_r
  hard.seed = 502;
  const SweepResult c_sweep = sweep_parameter(hard, SweepParameter::DecayC, {0.5, 0.95}, 20);
  const double c_gap = c_sweep.rows[1].mean_rsnr_db - c_sweep.rows[0].mean_rsnr_db;
  const bool c_ok = c_gap >= 10.0;

  // (c) accuracy scales log-linearly with the stop threshold past the knee.
  TrialSpec easy;
  easy.kind = ProblemKind::Mc;
  easy.n1 = easy.n2 = 30;
  easy.rank = 3;
  easy.m = 400;
  easy.seed = 503;
  const std::vector<double> eps_values = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  const SweepResult e_sweep = sweep_parameter(easy, SweepParameter::Epsilon, eps_values, 20);
  // Fit mean RSNR against log10(epsilon) on the four smallest values.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const int fit_n = 4;
  for (std::size_t i = e_sweep.rows.size() - fit_n; i < e_sweep.rows.size(); ++i) {
    const double x = std::log10(e_sweep.rows[i].param_value);
    const double y = e_sweep.rows[i].mean_rsnr_db;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double n = fit_n;
  const double cov = sxy - sx * sy / n;
  const double var_x = sxx - sx * sx / n;
  const double var_y = syy - sy * sy / n;
  const double r2 = (var_x > 0 && var_y > 0) ? (cov * cov) / (var_x * var_y) : 0.0;
  const bool eps_ok = r2 > 0.9;

  const bool ok = plateau_ok && c_ok && eps_ok;
  return report(5, "parameter trends (inner-step plateau, decay ratio, stop threshold)", ok,
                "L10 " + fmt(at_l10) + " dB vs best " + fmt(best_l) + ", c gap " + fmt(c_gap) +
                    " dB vs >= 10, eps fit r2 " + fmt(r2) + " vs > 0.9",
                timer.seconds());
}

// ---- 6: phase-transition advantage over the nuclear norm baseline ----

bool criterion_phase_gap() {
  Timer timer;
  const Index n = 20;
  const std::vector<int> ranks = {1, 2, 3, 4};
  const std::vector<Index> m_grid = {160, 200, 240, 280};
  const int trials = 20;

  TrialSpec base;
  base.seed = 601;
  const PhaseResult srf_rates =
      phase_transition(n, ranks, m_grid, trials, SolverChoice::Srf, base);
  const PhaseResult nnm_rates =
      phase_transition(n, ranks, m_grid, trials, SolverChoice::Nnm, base);

  int advantage = 0;
  int reversed = 0;
  double weakest_srf = 1.0;
  double weakest_nnm = 0.0;
  std::ostringstream cells;
  for (Index i = 0; i < srf_rates.rates.rows(); ++i) {
    for (Index j = 0; j < srf_rates.rates.cols(); ++j) {
      const double s = srf_rates.rates(i, j);
      const double b = nnm_rates.rates(i, j);
      if (s >= 0.9 && b <= 0.1) {
        ++advantage;
        weakest_srf = std::min(weakest_srf, s);
        weakest_nnm = std::max(weakest_nnm, b);
        cells << " (r=" << ranks[static_cast<std::size_t>(i)]
              << ",m=" << m_grid[static_cast<std::size_t>(j)] << ")";
      }
      if (b >= 0.9 && s <= 0.1) ++reversed;
    }
  }
  const bool ok = advantage >= 3 && reversed == 0;
  std::ostringstream margin;
  if (advantage > 0)
    margin << ", weakest cell srf " << fmt(weakest_srf) << " nnm " << fmt(weakest_nnm);
  return report(6, "phase-transition gap over the nuclear norm baseline", ok,
                std::to_string(advantage) + " advantage cells vs >= 3" + cells.str() + ", " +
                    std::to_string(reversed) + " reversed vs 0" + margin.str(),
                timer.seconds());
}

// ---- 7: null-space inequality suite ----

bool criterion_inequalities() {
  Timer timer;
  int violations = 0;
  std::string first_violation;
  const auto record = [&](bool ok, const std::string& what, std::uint64_t k) {
    if (!ok) {
      ++violations;
      if (first_violation.empty())
        first_violation = what + " at probe " + std::to_string(k);
    }
  };

  NormalSampler pick(701);
  for (std::uint64_t k = 0; k < 500; ++k) {
    const Index n1 = 4 + static_cast<Index>(pick.below(5));
    const Index n2 = 4 + static_cast<Index>(pick.below(5));
    const Index total = n1 * n2;
    const Index m =
        total / 4 + static_cast<Index>(pick.below(static_cast<std::uint64_t>(total / 2)));
    const AffineOperator op = (k % 2) == 0
                                  ? gen_gaussian_operator(m, n1, n2, derive_seed(702, k))
                                  : gen_mask(n1, n2, m, derive_seed(703, k));
    const AffineProjector p(op, Vector::Zero(m));
    const Matrix z = p.null_space_sample(derive_seed(704, k));

    const double ratio = spherical_ratio(z);
    record(numeric_rank(z) >= static_cast<int>(ceil_stable(ratio)), "rank lower bound", k);

    const int nmin = static_cast<int>(std::min(n1, n2));
    std::vector<int> subset;
    for (int i = 1; i <= nmin; ++i)
      if (pick.uniform01() < 0.5) subset.push_back(i);
    record(check_lemma2(z, subset).holds, "tail sum inequality", k);

    const Vector sigma = singular_values(z);
    const Index pos = static_cast<Index>(pick.below(static_cast<std::uint64_t>(sigma.size())));
    const double alpha = sigma[pos] * (0.5 + pick.uniform01());
    const Corollary3Check c3 = corollary3_bound(z, alpha);
    if (c3.applicable) record(c3.holds, "frobenius norm bound", k);
  }

  // Post-solve pairs through the objective-to-error chain.
  for (std::uint64_t k = 0; k < 10; ++k) {
    const int r = 1 + static_cast<int>(k % 2);
    const Index n = 14;
    const Index m = 3 * degrees_of_freedom(n, n, r);
    const Matrix x0 = gen_lowrank(n, n, r, derive_seed(705, k));
    const AffineOperator op = gen_mask(n, n, m, derive_seed(706, k));
    const SolveReport sol = solve(op, op.apply(x0));
    const double delta = sol.outer_trace.empty() ? 1.0 : sol.outer_trace.back().delta;
    const Lemma3ChainReport chain =
        check_lemma3_chain(x0, sol.solution, delta, gaussian_family());
    record(chain.chain_holds(), "objective-to-error chain", k);
  }

  const bool ok = violations == 0;
  return report(7, "null-space inequality suite", ok,
                std::to_string(violations) + " violations vs 0" +
                    (first_violation.empty() ? "" : "; first: " + first_violation),
                timer.seconds());
}

// ---- 8: recovery error shrinks with the smoothing width ----

bool criterion_width_trend() {
  Timer timer;
  const Index n = 20;
  const Matrix x0 = gen_lowrank(n, n, 2, 801);
  const AffineOperator op = gen_mask(n, n, 200, 802);
  const AffineProjector p(op, op.apply(x0));

  SolverConfig config;
  config.inner_iters = 30;

  Matrix x = p.min_frobenius_solution();
  double delta = 2.0 * singular_values(x)[0];
  const double ratio = std::pow(10.0, -0.1);  // 41 points across 4 decades

  std::vector<double> errors;
  for (int k = 0; k <= 40; ++k) {
    x = inner_gp_loop(x, delta, p, config);
    errors.push_back((x - x0).norm());
    delta *= ratio;
  }

  int increases = 0;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k)
    if (errors[k + 1] > 1.001 * errors[k]) ++increases;
  const double final_rel = errors.back() / x0.norm();

  const bool ok = increases <= 2 && final_rel < 1e-4;
  return report(8, "error decreases along the width continuation", ok,
                std::to_string(increases) + " increases vs <= 2, final error " +
                    fmt(final_rel) + " vs < 1e-4 relative",
                timer.seconds());
}

// ---- 9: CLI determinism, including threaded runs ----

int run_cli(const std::string& args) {
  const char* bin = std::getenv("SRF_CLI");
  if (bin == nullptr) return -1;
  const std::string cmd = std::string(bin) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// report.json with the per-stage timings zeroed out.
std::string normalized_report(const fs::path& p) {
  nlohmann::json j = nlohmann::json::parse(slurp(p));
  for (auto& rec : j.at("outer_trace")) rec["wall_ms"] = 0.0;
  return j.dump();
}

/// mc_compare.csv with the wall-time column removed.
std::string strip_wall_column(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream split(line);
    std::string field;
    std::vector<std::string> kept;
    int idx = 0;
    while (std::getline(split, field, ',')) {
      if (idx != 4) kept.push_back(field);
      ++idx;
    }
    for (std::size_t i = 0; i < kept.size(); ++i) out << (i ? "," : "") << kept[i];
    out << '\n';
  }
  return out.str();
}

bool criterion_cli_determinism() {
  Timer timer;
  if (std::getenv("SRF_CLI") == nullptr)
    return report(9, "command line runs are reproducible", false,
                  "SRF_CLI environment variable not set", timer.seconds());

  const fs::path root = fs::temp_directory_path() / "srf_acceptance_runs";
  fs::remove_all(root);
  fs::create_directories(root);

  std::vector<std::string> problems;
  const auto expect = [&](bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  };
  const auto same = [&](const fs::path& a, const fs::path& b, const std::string& what) {
    expect(slurp(a) == slurp(b) && !slurp(a).empty(), what);
  };

  // Inputs shared by the workflows.
  const Matrix x_true = gen_lowrank(8, 8, 1, 901);
  io::write_matrix_csv(root / "m.csv", x_true);
  const AffineOperator op = gen_gaussian_operator(24, 6, 6, 902);
  io::write_operator_json(root / "op.json", op);
  io::write_vector_csv(root / "b.csv", op.apply(gen_lowrank(6, 6, 1, 903)));

  const std::string q = " --quiet --out ";

  // solve, twice.
  const std::string solve_args =
      "solve --operator " + (root / "op.json").string() + " --measurements " +
      (root / "b.csv").string();
  expect(run_cli(solve_args + q + (root / "s1").string()) == 0, "solve run 1 failed");
  expect(run_cli(solve_args + q + (root / "s2").string()) == 0, "solve run 2 failed");
  same(root / "s1" / "solution.csv", root / "s2" / "solution.csv", "solve solution differs");
  expect(normalized_report(root / "s1" / "report.json") ==
             normalized_report(root / "s2" / "report.json"),
         "solve report differs");

  // complete with a generated mask, twice.
  const std::string complete_args =
      "complete --matrix " + (root / "m.csv").string() + " --sample-count 40 --seed 11";
  expect(run_cli(complete_args + q + (root / "c1").string()) == 0, "complete run 1 failed");
  expect(run_cli(complete_args + q + (root / "c2").string()) == 0, "complete run 2 failed");
  same(root / "c1" / "completed.csv", root / "c2" / "completed.csv",
       "complete solution differs");
  same(root / "c1" / "mask.json", root / "c2" / "mask.json", "complete mask differs");
  expect(normalized_report(root / "c1" / "report.json") ==
             normalized_report(root / "c2" / "report.json"),
         "complete report differs");

  // sweep: serial, threaded, threaded again.
  const std::string sweep_args =
      "sweep --parameter c --values 0.5,0.8 --trials 3 --n1 8 --n2 8 --rank 1 --m 40 --seed 3";
  expect(run_cli(sweep_args + " --jobs 1" + q + (root / "w1").string()) == 0, "sweep 1 failed");
  expect(run_cli(sweep_args + " --jobs 3" + q + (root / "w2").string()) == 0, "sweep 2 failed");
  expect(run_cli(sweep_args + " --jobs 3" + q + (root / "w3").string()) == 0, "sweep 3 failed");
  same(root / "w1" / "sweep.csv", root / "w2" / "sweep.csv", "sweep differs across jobs");
  same(root / "w2" / "sweep.csv", root / "w3" / "sweep.csv", "threaded sweep not reproducible");
  same(root / "w2" / "sweep_meta.json", root / "w3" / "sweep_meta.json",
       "sweep metadata not reproducible");

  // phase transition: threaded twice, serial once.
  const std::string phase_args =
      "phase-transition --n 6 --ranks 1 --m-grid 12,34 --trials 3 --seed 5";
  expect(run_cli(phase_args + " --jobs 3" + q + (root / "p1").string()) == 0, "phase 1 failed");
  expect(run_cli(phase_args + " --jobs 3" + q + (root / "p2").string()) == 0, "phase 2 failed");
  expect(run_cli(phase_args + " --jobs 1" + q + (root / "p3").string()) == 0, "phase 3 failed");
  same(root / "p1" / "phase.csv", root / "p2" / "phase.csv", "threaded phase not reproducible");
  same(root / "p1" / "phase.csv", root / "p3" / "phase.csv", "phase differs across jobs");

  // solver comparison: threaded twice, serial once; timing column stripped.
  const std::string mc_args = "mc-compare --n 6 --ranks 1 --ratios 2,3 --trials 2 --seed 7";
  expect(run_cli(mc_args + " --jobs 3" + q + (root / "m1").string()) == 0, "compare 1 failed");
  expect(run_cli(mc_args + " --jobs 3" + q + (root / "m2").string()) == 0, "compare 2 failed");
  expect(run_cli(mc_args + " --jobs 1" + q + (root / "m3").string()) == 0, "compare 3 failed");
  expect(strip_wall_column(root / "m1" / "mc_compare.csv") ==
             strip_wall_column(root / "m2" / "mc_compare.csv"),
         "threaded comparison not reproducible");
  expect(strip_wall_column(root / "m1" / "mc_compare.csv") ==
             strip_wall_column(root / "m3" / "mc_compare.csv"),
         "comparison differs across jobs");

  // diagnosis and validation.
  const std::string ssp_args =
      "ssp-diagnose --operator " + (root / "op.json").string() + " --samples 6 --seed 13";
  expect(run_cli(ssp_args + q + (root / "d1").string()) == 0, "diagnose 1 failed");
  expect(run_cli(ssp_args + q + (root / "d2").string()) == 0, "diagnose 2 failed");
  same(root / "d1" / "ssp.json", root / "d2" / "ssp.json", "diagnosis differs");
  same(root / "d1" / "witness.csv", root / "d2" / "witness.csv", "witness differs");

  expect(run_cli("validate-family" + q + (root / "v1").string()) == 0, "validate 1 failed");
  expect(run_cli("validate-family" + q + (root / "v2").string()) == 0, "validate 2 failed");
  same(root / "v1" / "validation.json", root / "v2" / "validation.json",
       "validation differs");

  fs::remove_all(root);
  const bool ok = problems.empty();
  std::string detail = "all workflows byte-stable";
  if (!ok) {
    detail = std::to_string(problems.size()) + " problems; first: " + problems.front();
  }
  return report(9, "command line runs are reproducible", ok, detail, timer.seconds());
}

}  // namespace

int main() {
  Timer total;
  int failed = 0;
  failed += criterion_gradient() ? 0 : 1;
  failed += criterion_projection() ? 0 : 1;
  failed += criterion_wide_width() ? 0 : 1;
  failed += criterion_easy_recovery() ? 0 : 1;
  failed += criterion_parameter_trends() ? 0 : 1;
  failed += criterion_phase_gap() ? 0 : 1;
  failed += criterion_inequalities() ? 0 : 1;
  failed += criterion_width_trend() ? 0 : 1;
  failed += criterion_cli_determinism() ? 0 : 1;

  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << " (" << std::fixed << std::setprecision(1) << total.seconds() << " s total)"
            << std::endl;
  return failed;
}
