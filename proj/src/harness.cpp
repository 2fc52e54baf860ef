#include "mobo/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "mobo/baselines.hpp"
#include "mobo/batch.hpp"
#include "mobo/geometry.hpp"
#include "mobo/gp.hpp"
#include "mobo/hypervolume.hpp"
#include "mobo/metrics.hpp"
#include "mobo/parallel.hpp"
#include "mobo/pfe.hpp"
#include "mobo/random.hpp"
#include "mobo/simplex.hpp"

namespace mobo {

namespace {

constexpr std::uint64_t kTagInit = 0x1d5;
constexpr std::uint64_t kTagWeights = 0x51e;
constexpr std::uint64_t kTagFit = 0x6f1;
constexpr std::uint64_t kTagSolve = 0x0fd;
constexpr std::uint64_t kTagPfe = 0x9fe;
constexpr std::uint64_t kTagFill = 0x5f1;
constexpr int kFillCandidates = 512;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Clock = std::chrono::steady_clock;

// Appends evaluation rows while tracking the observed front's hypervolume.
class Recorder {
 public:
  Recorder(const Problem& problem, bool wall, SeedResult& out)
      : problem_(problem), wall_(wall), out_(out), start_(Clock::now()),
        hv_max_(problem.max_hypervolume ? hv_max(problem) : 0.0) {}

  void add(int iteration, const Vector& x, const Vector& f) {
    front_.conservativeResize(front_.rows() + 1, f.size());
    front_.row(front_.rows() - 1) = f.transpose();
    const auto keep = pareto_filter(front_);
    Matrix nd(static_cast<Eigen::Index>(keep.size()), f.size());
    for (std::size_t i = 0; i < keep.size(); ++i) nd.row(static_cast<Eigen::Index>(i)) = front_.row(static_cast<Eigen::Index>(keep[i]));
    front_ = nd;
    EvalRow row;
    row.iteration = iteration;
    row.eval_index = static_cast<int>(out_.rows.size()) + 1;
    row.x = x;
    row.f = f;
    row.hv_after = hypervolume(front_, problem_.ref_point);
    row.log_hv_diff_after = problem_.max_hypervolume ? std::log10(std::max(hv_max_ - row.hv_after, kLogHvFloor))
                                                     : std::numeric_limits<double>::quiet_NaN();
    if (wall_) row.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    out_.rows.push_back(std::move(row));
  }

 private:
  const Problem& problem_;
  bool wall_;
  SeedResult& out_;
  Clock::time_point start_;
  double hv_max_;
  Matrix front_;
};

Matrix nondominated(const Matrix& y) {
  const auto keep = pareto_filter(y);
  Matrix out(static_cast<Eigen::Index>(keep.size()), y.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = y.row(static_cast<Eigen::Index>(keep[i]));
  return out;
}

bool near_observed(const Matrix& observed, const Vector& x) {
  for (Eigen::Index i = 0; i < observed.rows(); ++i) {
    if ((observed.row(i).transpose() - x).cwiseAbs().maxCoeff() <= kPoolDedupTolerance) return true;
  }
  return false;
}

void run_mobo_osd(const RunConfig& config, const Problem& problem, std::uint64_t seed, int inner_jobs, Recorder& rec,
                  const IterationObserver& observer) {
  const Box unit = Box::unit(problem.dim);
  const int init = config.resolved_init_count(problem);
  const Dataset start = initial_design(problem, init, seed);
  Dataset data(problem.dim, problem.num_objectives);  // unit-box coordinates
  for (Eigen::Index i = 0; i < start.x().rows(); ++i) {
    data.append(problem.bounds.to_unit(start.x().row(i).transpose()), start.y().row(i).transpose());
    rec.add(0, start.x().row(i).transpose(), start.y().row(i).transpose());
  }

  const WeightSet weights = riesz_weights(problem.num_objectives, config.n_beta, derive_seed(seed, {kTagWeights}));
  SolveAllOptions solve_options;
  solve_options.delta = config.delta;
  solve_options.num_starts = config.n_s;
  solve_options.jobs = inner_jobs;
  std::vector<KernelParams> warm;

  for (int iteration = 1; static_cast<int>(data.eval_count()) < config.budget; ++iteration) {
    const auto it = static_cast<std::uint64_t>(iteration);
    const OffsetResult shifted = offset_nonnegative(data);
    const IdealNadir bounds = ideal_nadir(shifted.data);
    const ChimFrame frame = build_frame(bounds.ideal, bounds.nadir);
    const Surrogate models = Surrogate::fit(data.x(), shifted.data.y(), derive_seed(seed, {kTagFit, it}), warm);
    warm = models.params();

    IterationInfo info;
    info.iteration = iteration;
    info.osd = solve_all(models, frame, weights, data.x(), derive_seed(seed, {kTagSolve, it}), solve_options);

    std::vector<Matrix> samples(info.osd.size());
    parallel_for(info.osd.size(), inner_jobs, [&](std::size_t j) {
      const auto& r = info.osd[j];
      if (!config.use_pfe) {
        samples[j] = r.x_osd.transpose();
        return;
      }
      const ExplorationSpace space = exploration_directions(models, r.x_osd, unit, r.beta_index);
      samples[j] = sample_pfe(space, config.n_e, config.pfe_scale, unit, derive_seed(seed, {kTagPfe, it}));
    });
    CandidatePool pool;
    for (std::size_t j = 0; j < samples.size(); ++j) {
      for (Eigen::Index i = 0; i < samples[j].rows(); ++i) {
        const Vector x = samples[j].row(i).transpose();
        if (!near_observed(data.x(), x)) pool.add(x, info.osd[j].beta_index);
      }
    }
    info.pool_size = static_cast<int>(pool.size());

    const int want = std::min(config.batch, config.budget - static_cast<int>(data.eval_count()));
    const Vector ref = problem.ref_point + shifted.offset;
    const Matrix front = nondominated(shifted.data.y());
    std::vector<Vector> picks;
    Surrogate believer = models;
    if (!pool.empty()) {
      BatchSelection sel = select_batch(pool, models, front, ref, want);
      for (auto i : sel.picked) picks.push_back(pool.items()[i].x);
      info.picked_origins = sel.origins(pool);
      info.available_origins = sel.available_origins;
      believer = std::move(sel.believer);
    }
    // pool underflow: pure exploration by posterior sigma-sum
    if (static_cast<int>(picks.size()) < want) {
      Halton halton(problem.dim, derive_seed(seed, {kTagFill, it}));
      const Matrix cand = halton.take(kFillCandidates);
      while (static_cast<int>(picks.size()) < want) {
        Eigen::Index best = -1;
        double best_s = -1.0;
        for (Eigen::Index i = 0; i < cand.rows(); ++i) {
          const Vector x = cand.row(i).transpose();
          if (near_observed(data.x(), x)) continue;
          if (std::any_of(picks.begin(), picks.end(),
                          [&](const Vector& p) { return (p - x).cwiseAbs().maxCoeff() <= kPoolDedupTolerance; })) {
            continue;
          }
          const double s = believer.std(x).sum();
          if (s > best_s) {
            best_s = s;
            best = i;
          }
        }
        if (best < 0) throw InsufficientData("fallback candidates exhausted");
        const Vector x = cand.row(best).transpose();
        believer = believer.condition_on(x, believer.mean(x));
        picks.push_back(x);
        ++info.filled;
      }
    }

    for (const auto& u : picks) {
      const Vector x = problem.bounds.from_unit(u);
      const Vector f = evaluate(problem, x);
      data.append(u, f);
      rec.add(iteration, x, f);
    }
    if (observer) observer(info);
  }
}

}  // namespace

Algorithm parse_algorithm(const std::string& name) {
  if (name == "mobo-osd") return Algorithm::kMoboOsd;
  if (name == "random") return Algorithm::kRandom;
  if (name == "nbi") return Algorithm::kNbi;
  throw ContractError("unknown algorithm: " + name);
}

std::string algorithm_name(Algorithm algo) {
  switch (algo) {
    case Algorithm::kMoboOsd: return "mobo-osd";
    case Algorithm::kRandom: return "random";
    case Algorithm::kNbi: return "nbi";
  }
  return "unknown";
}

int RunConfig::resolved_init_count(const Problem& problem) const {
  return init_count.value_or(2 * (problem.dim + 1));
}

void RunConfig::validate(const Problem& problem) const {
  if (batch < 1) throw ContractError("batch must be >= 1");
  if (n_beta < 1) throw ContractError("n_beta must be >= 1");
  if (n_s < 1) throw ContractError("n_s must be >= 1");
  if (n_e < 1) throw ContractError("n_e must be >= 1");
  if (!(delta >= 0.0)) throw ContractError("delta must be >= 0");
  if (!(pfe_scale >= 0.0)) throw ContractError("pfe_scale must be >= 0");
  if (seeds.empty()) throw ContractError("at least one seed is required");
  if (budget < 1) throw ContractError("budget must be >= 1");
  if (algo == Algorithm::kMoboOsd) {
    const int init = resolved_init_count(problem);
    if (init < problem.num_objectives + 1) throw ContractError("init_count must be >= M + 1");
    if (budget <= init) throw ContractError("budget must exceed init_count");
  }
  if (algo == Algorithm::kNbi && budget < problem.num_objectives) throw ContractError("budget below M");
  if (!problem.objective) throw ContractError(problem.name + ": no closed-form objective available");
}

Dataset initial_design(const Problem& problem, int init_count, std::uint64_t seed) {
  if (init_count < problem.num_objectives + 1) throw ContractError("initial_design: init_count must be >= M + 1");
  Halton halton(problem.dim, derive_seed(seed, {kTagInit}));
  Dataset data(problem.dim, problem.num_objectives);
  for (int i = 0; i < init_count; ++i) {
    const Vector x = problem.bounds.from_unit(halton.next());
    data.append(x, evaluate(problem, x));
  }
  return data;
}

SeedResult run_seed(const RunConfig& config, std::uint64_t seed, const IterationObserver& observer) {
  const Problem& problem = get_problem(config.problem);
  config.validate(problem);
  SeedResult result;
  result.seed = seed;
  Recorder rec(problem, config.record_wall_time, result);
  try {
    switch (config.algo) {
      case Algorithm::kMoboOsd:
        run_mobo_osd(config, problem, seed, config.jobs, rec, observer);
        break;
      case Algorithm::kRandom: {
        const Dataset d = random_search(problem, config.budget, seed);
        for (Eigen::Index i = 0; i < d.x().rows(); ++i) rec.add(static_cast<int>(i) + 1, d.x().row(i).transpose(), d.y().row(i).transpose());
        break;
      }
      case Algorithm::kNbi: {
        const Dataset d = nbi_run(problem, config.budget, config.n_beta, seed);
        for (Eigen::Index i = 0; i < d.x().rows(); ++i) rec.add(0, d.x().row(i).transpose(), d.y().row(i).transpose());
        break;
      }
    }
  } catch (const std::exception& e) {
    result.failed = true;
    result.message = e.what();
  }
  return result;
}

void write_seed_csv(const std::filesystem::path& path, const Problem& problem, const SeedResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "seed,iteration,eval_index";
  for (int d = 1; d <= problem.dim; ++d) out << ",x" << d;
  for (int m = 1; m <= problem.num_objectives; ++m) out << ",f" << m;
  out << ",hv_after,log_hv_diff_after,wall_ms\n";
  for (const auto& row : result.rows) {
    out << result.seed << ',' << row.iteration << ',' << row.eval_index;
    for (Eigen::Index d = 0; d < row.x.size(); ++d) out << ',' << fmt(row.x(d));
    for (Eigen::Index m = 0; m < row.f.size(); ++m) out << ',' << fmt(row.f(m));
    out << ',' << fmt(row.hv_after) << ',' << fmt(row.log_hv_diff_after) << ',' << fmt(row.wall_ms) << '\n';
  }
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<SeedResult>& results) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "eval_index,num_seeds,hv_mean,hv_stderr,log_hv_diff_mean,log_hv_diff_stderr\n";
  std::size_t longest = 0;
  for (const auto& r : results) longest = std::max(longest, r.rows.size());
  for (std::size_t k = 0; k < longest; ++k) {
    std::vector<double> hv;
    std::vector<double> lg;
    for (const auto& r : results) {
      if (k < r.rows.size()) {
        hv.push_back(r.rows[k].hv_after);
        lg.push_back(r.rows[k].log_hv_diff_after);
      }
    }
    auto stats = [](const std::vector<double>& v) {
      const double n = static_cast<double>(v.size());
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= n;
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      const double se = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
      return std::pair{mean, se};
    };
    const auto [hm, hs] = stats(hv);
    const auto [lm, ls] = stats(lg);
    out << (k + 1) << ',' << hv.size() << ',' << fmt(hm) << ',' << fmt(hs) << ',' << fmt(lm) << ',' << fmt(ls) << '\n';
  }
}

std::vector<SeedResult> run(const RunConfig& config) {
  const Problem& problem = get_problem(config.problem);
  config.validate(problem);
  std::filesystem::create_directories(config.out_dir);
  std::vector<SeedResult> results(config.seeds.size());
  const int seed_jobs = std::min<int>(config.jobs, static_cast<int>(config.seeds.size()));
  RunConfig inner = config;
  inner.jobs = seed_jobs > 1 ? 1 : config.jobs;
  parallel_for(config.seeds.size(), seed_jobs, [&](std::size_t i) { results[i] = run_seed(inner, config.seeds[i]); });

  for (const auto& r : results) write_seed_csv(config.out_dir / ("seed_" + std::to_string(r.seed) + ".csv"), problem, r);
  write_summary_csv(config.out_dir / "summary.csv", results);
  std::ofstream failures(config.out_dir / "failures.csv", std::ios::binary);
  failures << "seed,eval_count,message\n";
  for (const auto& r : results) {
    if (!r.failed) continue;
    std::string msg = r.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    failures << r.seed << ',' << r.rows.size() << ',' << msg << '\n';
  }
  return results;
}

}  // namespace mobo
