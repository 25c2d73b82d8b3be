#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "srf/io.hpp"
#include "srf/nnm.hpp"
#include "srf/solver.hpp"

namespace srf {

enum class ProblemKind { Arm, Mc };
enum class SolverChoice { Srf, Nnm };

inline const char* solver_name(SolverChoice s) {
  return s == SolverChoice::Srf ? "srf" : "nnm";
}

/// Parameter count of a rank-r n1 x n2 matrix: r (n1 + n2 - r).
inline long degrees_of_freedom(long n1, long n2, long r) {
  if (n1 < 1 || n2 < 1)
    throw std::invalid_argument("degrees_of_freedom: shape must be positive");
  if (r < 0 || r > std::min(n1, n2))
    throw std::invalid_argument("degrees_of_freedom: rank " + std::to_string(r) +
                                " out of range for " + std::to_string(n1) + " x " +
                                std::to_string(n2));
  return r * (n1 + n2 - r);
}

/// Random rank-r matrix as a product of two standard normal factors,
/// n1 x r times r x n2. Both factors are filled column by column, so the
/// output is a pure function of the seed.
inline Matrix gen_lowrank(Index n1, Index n2, int r, std::uint64_t seed) {
  if (n1 < 1 || n2 < 1)
    throw std::invalid_argument("gen_lowrank: shape must be positive");
  if (r < 1 || r > std::min(n1, n2))
    throw std::invalid_argument("gen_lowrank: rank " + std::to_string(r) +
                                " out of range for " + std::to_string(n1) + " x " +
                                std::to_string(n2));
  NormalSampler rng(seed);
  Matrix left(n1, r);
  for (Index j = 0; j < left.cols(); ++j)
    for (Index i = 0; i < left.rows(); ++i) left(i, j) = rng.normal();
  Matrix right(r, n2);
  for (Index j = 0; j < right.cols(); ++j)
    for (Index i = 0; i < right.rows(); ++i) right(i, j) = rng.normal();
  return left * right;
}

/// Dense measurement operator with i.i.d. standard normal entries.
inline AffineOperator gen_gaussian_operator(Index m, Index n1, Index n2, std::uint64_t seed) {
  if (n1 < 1 || n2 < 1)
    throw std::invalid_argument("gen_gaussian_operator: shape must be positive");
  if (m < 1 || m > n1 * n2)
    throw std::invalid_argument("gen_gaussian_operator: m must be in [1, " +
                                std::to_string(n1 * n2) + "]");
  NormalSampler rng(seed);
  Matrix a(m, n1 * n2);
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) a(i, j) = rng.normal();
  return AffineOperator::general_dense(std::move(a), n1, n2);
}

/// Entry sampler observing a uniform random m-subset of the grid, drawn
/// without replacement by a partial Fisher-Yates shuffle.
inline AffineOperator gen_mask(Index n1, Index n2, Index m, std::uint64_t seed) {
  if (n1 < 1 || n2 < 1)
    throw std::invalid_argument("gen_mask: shape must be positive");
  const Index total = n1 * n2;
  if (m < 1 || m > total)
    throw std::invalid_argument("gen_mask: m must be in [1, " + std::to_string(total) + "]");
  std::vector<Index> cells(static_cast<std::size_t>(total));
  for (Index i = 0; i < total; ++i) cells[static_cast<std::size_t>(i)] = i;
  NormalSampler rng(seed);
  std::vector<EntryIndex> omega;
  omega.reserve(static_cast<std::size_t>(m));
  for (Index k = 0; k < m; ++k) {
    const Index pick = k + static_cast<Index>(rng.below(static_cast<std::uint64_t>(total - k)));
    std::swap(cells[static_cast<std::size_t>(k)], cells[static_cast<std::size_t>(pick)]);
    const Index flat = cells[static_cast<std::size_t>(k)];
    omega.push_back({flat % n1, flat / n1});
  }
  return AffineOperator::entry_sampling(n1, n2, std::move(omega));
}

// One synthetic recovery problem: generate a rank-r truth and a random
// operator from the seed, measure, solve, score. Sub-seeds 1 and 2 feed the
// truth and the operator so the two are independent.
struct TrialSpec {
  ProblemKind kind = ProblemKind::Mc;
  Index n1 = 20;
  Index n2 = 20;
  int rank = 2;
  Index m = 200;
  SolverChoice solver = SolverChoice::Srf;
  SolverConfig srf;
  NnmConfig nnm;
  std::uint64_t seed = 0;
  double recovery_threshold_db = 60.0;

  void validate() const {
    if (n1 < 1 || n2 < 1)
      throw std::invalid_argument("trial spec: shape must be positive");
    if (rank < 1 || rank > std::min(n1, n2))
      throw std::invalid_argument("trial spec: rank " + std::to_string(rank) +
                                  " out of range for " + std::to_string(n1) + " x " +
                                  std::to_string(n2));
    const long d_r = degrees_of_freedom(n1, n2, rank);
    if (m < d_r || m > n1 * n2)
      throw std::invalid_argument("trial spec: m = " + std::to_string(m) +
                                  " outside [d_r, n1*n2] = [" + std::to_string(d_r) + ", " +
                                  std::to_string(n1 * n2) + "]");
    if (!std::isfinite(recovery_threshold_db))
      throw std::invalid_argument("trial spec: recovery threshold must be finite");
    srf.validate();
    nnm.validate();
  }
};

struct TrialResult {
  TrialSpec spec;
  double rsnr_db = 0.0;
  bool recovered = false;
  double wall_ms = 0.0;
  int outer_iters = 0;
  bool failed = false;          // solver threw; reason recorded, run continues
  std::string fail_reason;
};

inline TrialResult run_trial(const TrialSpec& spec) {
  using clock = std::chrono::steady_clock;
  spec.validate();
  TrialResult out;
  out.spec = spec;
  const auto t0 = clock::now();
  try {
    const Matrix x_true = gen_lowrank(spec.n1, spec.n2, spec.rank, derive_seed(spec.seed, 1));
    const AffineOperator op =
        spec.kind == ProblemKind::Arm
            ? gen_gaussian_operator(spec.m, spec.n1, spec.n2, derive_seed(spec.seed, 2))
            : gen_mask(spec.n1, spec.n2, spec.m, derive_seed(spec.seed, 2));
    const Vector b = op.apply(x_true);
    const SolveReport report = spec.solver == SolverChoice::Srf ? solve(op, b, spec.srf)
                                                                : solve_nnm(op, b, spec.nnm);
    out.rsnr_db = rsnr(x_true, report.solution);
    out.outer_iters = static_cast<int>(report.outer_trace.size());
  } catch (const std::exception& e) {
    out.failed = true;
    out.fail_reason = e.what();
    out.rsnr_db = 0.0;
  }
  out.recovered = !out.failed && out.rsnr_db >= spec.recovery_threshold_db;
  out.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  return out;
}

namespace detail {

/// Runs fn(0..count-1) on up to `jobs` threads. Exceptions are captured and
/// the first one rethrown after all workers finish.
template <class Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  const int workers = std::min(jobs, count);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

/// `trials` independent repetitions of the base spec; trial i runs with the
/// sub-seed derived from (base.seed, i). Results come back in trial order
/// regardless of scheduling.
inline std::vector<TrialResult> run_trials(const TrialSpec& base, int trials, int jobs = 1) {
  if (trials < 1)
    throw std::invalid_argument("run_trials: need at least one trial");
  base.validate();
  std::vector<TrialResult> results(static_cast<std::size_t>(trials));
  detail::parallel_for(trials, jobs, [&](int i) {
    TrialSpec spec = base;
    spec.seed = derive_seed(base.seed, static_cast<std::uint64_t>(i));
    results[static_cast<std::size_t>(i)] = run_trial(spec);
  });
  return results;
}

inline double mean_rsnr(const std::vector<TrialResult>& results) {
  double total = 0.0;
  for (const TrialResult& r : results) total += r.rsnr_db;
  return total / static_cast<double>(results.size());
}

// ---- Parameter sweeps ----

enum class SweepParameter { InnerIters, DecayC, Epsilon };

inline SweepParameter sweep_parameter_by_name(std::string_view name) {
  if (name == "L") return SweepParameter::InnerIters;
  if (name == "c") return SweepParameter::DecayC;
  if (name == "epsilon") return SweepParameter::Epsilon;
  throw std::invalid_argument("unknown sweep parameter \"" + std::string(name) +
                              "\"; expected L, c, or epsilon");
}

struct SweepRow {
  double param_value = 0.0;
  double mean_rsnr_db = 0.0;
  int trials = 0;
};

struct SweepResult {
  SweepParameter parameter = SweepParameter::InnerIters;
  std::vector<SweepRow> rows;
};

/// Mean RSNR as one solver parameter moves across `values`. The same trial
/// sub-seeds (hence the same instances) are reused at every value, so rows
/// differ only through the parameter under study.
inline SweepResult sweep_parameter(const TrialSpec& base, SweepParameter parameter,
                                   const std::vector<double>& values, int trials,
                                   int jobs = 1) {
  if (values.empty())
    throw std::invalid_argument("sweep_parameter: values list is empty");
  SweepResult out;
  out.parameter = parameter;
  for (const double value : values) {
    TrialSpec spec = base;
    switch (parameter) {
      case SweepParameter::InnerIters: {
        const int l = static_cast<int>(std::lround(value));
        if (std::abs(value - l) > 1e-9 || l < 1)
          throw std::invalid_argument("sweep_parameter: L values must be positive integers");
        spec.srf.inner_iters = l;
        break;
      }
      case SweepParameter::DecayC:
        if (!(value > 0.0 && value < 1.0))
          throw std::invalid_argument("sweep_parameter: c must be in (0, 1)");
        spec.srf.c = value;
        break;
      case SweepParameter::Epsilon:
        if (!(value > 0.0))
          throw std::invalid_argument("sweep_parameter: epsilon must be positive");
        spec.srf.epsilon = value;
        break;
    }
    const std::vector<TrialResult> results = run_trials(spec, trials, jobs);
    out.rows.push_back({value, mean_rsnr(results), trials});
  }
  return out;
}

inline void write_sweep_csv(const io::fs::path& path, const SweepResult& sweep) {
  std::ofstream out = io::open_out(path);
  out << "param_value,mean_rsnr_db,trials\n";
  for (const SweepRow& row : sweep.rows)
    out << io::format_double(row.param_value) << ',' << io::format_double(row.mean_rsnr_db)
        << ',' << row.trials << '\n';
  if (!out) throw std::invalid_argument("write failed: " + path.string());
}

// ---- Phase transition grids ----

struct PhaseResult {
  std::vector<int> rank_grid;
  std::vector<Index> m_grid;
  Matrix rates;  // rank_grid.size() x m_grid.size(), fractions in [0, 1]
};

/// Empirical recovery-rate map over (rank, measurement count) cells for one
/// solver on square matrix completion problems. Cells below the parameter
/// count d_r are not run: recovery there is impossible, rate 0.
inline PhaseResult phase_transition(Index n, const std::vector<int>& rank_grid,
                                    const std::vector<Index>& m_grid, int trials,
                                    SolverChoice solver, const TrialSpec& base,
                                    int jobs = 1) {
  if (rank_grid.empty() || m_grid.empty())
    throw std::invalid_argument("phase_transition: empty grid");
  if (trials < 1)
    throw std::invalid_argument("phase_transition: need at least one trial");
  for (int r : rank_grid)
    if (r < 1 || r > n)
      throw std::invalid_argument("phase_transition: rank " + std::to_string(r) +
                                  " out of range for n = " + std::to_string(n));
  for (Index m : m_grid)
    if (m < 1 || m > n * n)
      throw std::invalid_argument("phase_transition: m = " + std::to_string(m) +
                                  " out of range for n = " + std::to_string(n));

  PhaseResult out;
  out.rank_grid = rank_grid;
  out.m_grid = m_grid;
  const int cells = static_cast<int>(rank_grid.size() * m_grid.size());
  out.rates = Matrix::Zero(static_cast<Index>(rank_grid.size()),
                           static_cast<Index>(m_grid.size()));

  struct Unit {
    Index row, col;
    std::uint64_t seed;
  };
  std::vector<Unit> units;
  std::vector<std::atomic<int>> hits(static_cast<std::size_t>(cells));
  for (auto& h : hits) h.store(0);

  for (std::size_t a = 0; a < rank_grid.size(); ++a) {
    for (std::size_t b = 0; b < m_grid.size(); ++b) {
      const int r = rank_grid[a];
      const Index m = m_grid[b];
      if (m < degrees_of_freedom(n, n, r)) continue;  // impossible cell
      const std::uint64_t cell_seed =
          derive_seed(base.seed, static_cast<std::uint64_t>(a * m_grid.size() + b));
      for (int t = 0; t < trials; ++t)
        units.push_back({static_cast<Index>(a), static_cast<Index>(b),
                         derive_seed(cell_seed, static_cast<std::uint64_t>(t))});
    }
  }

  detail::parallel_for(static_cast<int>(units.size()), jobs, [&](int u) {
    const Unit& unit = units[static_cast<std::size_t>(u)];
    TrialSpec spec = base;
    spec.kind = ProblemKind::Mc;
    spec.n1 = spec.n2 = n;
    spec.rank = out.rank_grid[static_cast<std::size_t>(unit.row)];
    spec.m = out.m_grid[static_cast<std::size_t>(unit.col)];
    spec.solver = solver;
    spec.seed = unit.seed;
    if (run_trial(spec).recovered)
      hits[static_cast<std::size_t>(unit.row * static_cast<Index>(out.m_grid.size()) +
                                    unit.col)]
          .fetch_add(1);
  });

  for (Index i = 0; i < out.rates.rows(); ++i)
    for (Index j = 0; j < out.rates.cols(); ++j)
      out.rates(i, j) =
          static_cast<double>(
              hits[static_cast<std::size_t>(i * out.rates.cols() + j)].load()) /
          static_cast<double>(trials);
  return out;
}

/// First row is the m grid, first column the rank grid, cells the rates.
/// The corner cell is empty.
inline void write_phase_csv(const io::fs::path& path, const PhaseResult& phase) {
  std::ofstream out = io::open_out(path);
  for (Index m : phase.m_grid) out << ',' << m;
  out << '\n';
  for (Index i = 0; i < phase.rates.rows(); ++i) {
    out << phase.rank_grid[static_cast<std::size_t>(i)];
    for (Index j = 0; j < phase.rates.cols(); ++j)
      out << ',' << io::format_double(phase.rates(i, j));
    out << '\n';
  }
  if (!out) throw std::invalid_argument("write failed: " + path.string());
}

// ---- Solver comparison on matrix completion ----

struct McRow {
  int rank = 0;
  double m_over_dr = 0.0;
  SolverChoice solver = SolverChoice::Srf;
  double mean_rsnr_db = 0.0;
  double mean_wall_ms = 0.0;
  int trials = 0;
};

/// Runs both solvers over a (rank, m/d_r) grid of completion problems.
/// Both see identical instances per cell; m is the requested multiple of
/// d_r rounded to the nearest integer and clamped into [d_r, n^2].
inline std::vector<McRow> mc_comparison(Index n, const std::vector<int>& ranks,
                                        const std::vector<double>& m_over_dr_grid,
                                        int trials, const TrialSpec& base, int jobs = 1) {
  if (ranks.empty() || m_over_dr_grid.empty())
    throw std::invalid_argument("mc_comparison: empty grid");
  for (double q : m_over_dr_grid)
    if (!(q >= 1.0))
      throw std::invalid_argument("mc_comparison: m/d_r values must be at least 1");

  std::vector<McRow> rows;
  std::size_t cell = 0;
  for (int r : ranks) {
    const long d_r = degrees_of_freedom(n, n, r);
    for (double q : m_over_dr_grid) {
      const Index m = std::min<Index>(n * n, std::max<Index>(d_r, static_cast<Index>(std::llround(q * static_cast<double>(d_r)))));
      const std::uint64_t cell_seed = derive_seed(base.seed, cell++);
      for (SolverChoice solver : {SolverChoice::Srf, SolverChoice::Nnm}) {
        TrialSpec spec = base;
        spec.kind = ProblemKind::Mc;
        spec.n1 = spec.n2 = n;
        spec.rank = r;
        spec.m = m;
        spec.solver = solver;
        spec.seed = cell_seed;
        const std::vector<TrialResult> results = run_trials(spec, trials, jobs);
        double wall = 0.0;
        for (const TrialResult& t : results) wall += t.wall_ms;
        rows.push_back({r, q, solver, mean_rsnr(results), wall / trials, trials});
      }
    }
  }
  return rows;
}

inline void write_mc_csv(const io::fs::path& path, const std::vector<McRow>& rows) {
  std::ofstream out = io::open_out(path);
  out << "rank,m_over_dr,solver,mean_rsnr_db,mean_wall_ms,trials\n";
  for (const McRow& row : rows)
    out << row.rank << ',' << io::format_double(row.m_over_dr) << ',' << solver_name(row.solver)
        << ',' << io::format_double(row.mean_rsnr_db) << ',' << io::format_double(row.mean_wall_ms)
        << ',' << row.trials << '\n';
  if (!out) throw std::invalid_argument("write failed: " + path.string());
}

}  // namespace srf
