// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails. Optional arguments select criteria
// by number, e.g. `acceptance 1 2 9`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mobo/baselines.hpp"
#include "mobo/batch.hpp"
#include "mobo/gp.hpp"
#include "mobo/harness.hpp"
#include "mobo/hypervolume.hpp"
#include "mobo/random.hpp"
#include "mobo/simplex.hpp"
#include "mobo/subproblem.hpp"

using mobo::Matrix;
using mobo::Vector;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

const std::vector<std::uint64_t> kSeeds = {0, 1, 2, 3, 4};

// Final-row HV per seed plus the HV/log-diff trajectories, cached across criteria.
struct RunSet {
  std::vector<mobo::SeedResult> results;
  std::vector<double> seconds;

  [[nodiscard]] std::vector<double> final_hv() const {
    std::vector<double> v;
    for (const auto& r : results) v.push_back(r.rows.empty() ? 0.0 : r.rows.back().hv_after);
    return v;
  }
  [[nodiscard]] std::vector<double> log_diff_at(std::size_t eval) const {
    std::vector<double> v;
    for (const auto& r : results) v.push_back(r.rows.at(eval - 1).log_hv_diff_after);
    return v;
  }
  [[nodiscard]] bool any_failed() const {
    return std::any_of(results.begin(), results.end(), [](const auto& r) { return r.failed; });
  }
  [[nodiscard]] double max_seconds() const { return *std::max_element(seconds.begin(), seconds.end()); }
};

RunSet run_seeds(const mobo::RunConfig& cfg) {
  RunSet set;
  for (auto s : kSeeds) {
    const auto t0 = Clock::now();
    set.results.push_back(mobo::run_seed(cfg, s));
    set.seconds.push_back(seconds_since(t0));
  }
  return set;
}

mobo::RunConfig default_config(const std::string& problem, int budget) {
  mobo::RunConfig cfg;
  cfg.problem = problem;
  cfg.budget = budget;
  return cfg;
}

// ---------------------------------------------------------------------------

Outcome hv_oracle() {
  const auto t0 = Clock::now();
  int worst_ok = 0, total = 0;
  double worst_ratio = 0.0;
  for (int m = 2; m <= 4; ++m) {
    for (std::uint64_t f = 0; f < 50; ++f) {
      mobo::Rng rng(mobo::derive_seed(1001, {static_cast<std::uint64_t>(m), f}));
      Matrix front(20, m);
      for (int i = 0; i < 20; ++i) {
        // points near the positive unit sphere give realistic trade-offs
        Vector d = rng.uniform_vector(m).array() + 0.05;
        front.row(i) = (d / d.norm() * rng.uniform(0.7, 1.0)).transpose();
      }
      const Vector r = Vector::Constant(m, 1.1);
      const double exact = mobo::hypervolume(front, r);
      const int samples = 1000000;
      long hits = 0;
      Vector z(m);
      for (int s = 0; s < samples; ++s) {
        for (int k = 0; k < m; ++k) z(k) = 1.1 * rng.uniform();
        for (int i = 0; i < 20; ++i) {
          if ((front.row(i).transpose().array() <= z.array()).all()) {
            ++hits;
            break;
          }
        }
      }
      const double box = std::pow(1.1, m);
      const double p = static_cast<double>(hits) / samples;
      const double mc = p * box;
      const double sigma = std::sqrt(p * (1 - p) / samples) * box;
      const double tol = std::max(0.01 * exact, 3.0 * sigma);
      const double err = std::abs(exact - mc);
      worst_ratio = std::max(worst_ratio, err / tol);
      ++total;
      if (err <= tol) ++worst_ok;
    }
  }
  const double secs = seconds_since(t0);
  return {worst_ok == total && secs < 120.0,
          std::to_string(worst_ok) + "/" + std::to_string(total) + " fronts within max(1%, 3 sigma); worst err/tol " +
              fmt("%.3f", worst_ratio) + "; " + fmt("%.1f s", secs)};
}

Outcome derivative_checks() {
  const auto t0 = Clock::now();
  double worst_grad = 0.0, worst_hess = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    mobo::Rng rng(mobo::derive_seed(2002, {s}));
    Matrix x(20, 5);
    Vector y(20);
    const Vector w = rng.uniform_vector(5) * 4.0;
    for (int i = 0; i < 20; ++i) {
      x.row(i) = rng.uniform_vector(5).transpose();
      y(i) = std::sin(x.row(i).dot(w)) + x.row(i).squaredNorm() + 0.05 * rng.normal();
    }
    const auto gp = mobo::GpModel::fit(x, y, s);
    const Vector p = rng.uniform_vector(5);
    const auto g = gp.predict_with_gradient(p);
    const Matrix h = gp.mean_hessian(p);

    // five-point stencil keeps truncation and round-off well below the tolerance
    const double eps = 1e-3;
    Vector fd_mu(5), fd_sigma(5);
    Matrix fd_h(5, 5);
    for (int k = 0; k < 5; ++k) {
      auto at = [&](double t) {
        Vector q = p;
        q(k) += t;
        return gp.predict_with_gradient(q);
      };
      const auto p2 = at(2 * eps), p1 = at(eps), m1 = at(-eps), m2 = at(-2 * eps);
      fd_mu(k) = (-p2.mean + 8 * p1.mean - 8 * m1.mean + m2.mean) / (12 * eps);
      fd_sigma(k) = (-p2.std + 8 * p1.std - 8 * m1.std + m2.std) / (12 * eps);
      fd_h.col(k) = (-p2.grad_mean + 8 * p1.grad_mean - 8 * m1.grad_mean + m2.grad_mean) / (12 * eps);
    }
    auto rel = [](const Vector& a, const Vector& b) {
      const double scale = a.cwiseAbs().maxCoeff();
      return scale > 1e-6 ? (a - b).cwiseAbs().maxCoeff() / scale : 0.0;
    };
    worst_grad = std::max({worst_grad, rel(g.grad_mean, fd_mu), rel(g.grad_std, fd_sigma)});
    const double hs = h.cwiseAbs().maxCoeff();
    if (hs > 1e-6) worst_hess = std::max(worst_hess, (h - fd_h).cwiseAbs().maxCoeff() / hs);
  }
  const double secs = seconds_since(t0);
  return {worst_grad <= 1e-4 && worst_hess <= 1e-3 && secs < 60.0,
          "worst gradient rel err " + fmt("%.2e", worst_grad) + ", worst Hessian rel err " + fmt("%.2e", worst_hess) +
              "; " + fmt("%.1f s", secs)};
}

Outcome subproblem_feasibility() {
  const auto t0 = Clock::now();
  auto cfg = default_config("dtlz2-m2", 50);
  const auto run = mobo::run_seed(cfg, 11);
  if (run.failed) return {false, "run failed: " + run.message};
  mobo::Dataset data(5, 2);
  for (const auto& row : run.rows) data.append(row.x, row.f);  // DTLZ2 box is the unit box
  const auto shifted = mobo::offset_nonnegative(data);
  const auto in = mobo::ideal_nadir(shifted.data);
  const auto frame = mobo::build_frame(in.ideal, in.nadir);
  const auto models = mobo::Surrogate::fit(data.x(), shifted.data.y(), 5);
  const auto weights = mobo::riesz_weights(2, 20, 5);

  int feasible = 0;
  int nondominated = 0;
  for (int j = 0; j < 20; ++j) {
    const auto line = mobo::make_line(frame, weights.row(j).transpose());
    const Matrix starts = mobo::multistart_points(models, data.x(), line, 4, 9, j);
    const auto cands = mobo::solve_one(models, line, mobo::kDefaultDelta, starts);
    if (cands.empty()) continue;
    const auto pick = mobo::select_candidate(cands);
    if (cands[pick].residual >= -mobo::kFeasibilityTolerance) ++feasible;
    bool dominated = false;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (i == pick || cands[i].feasible != cands[pick].feasible) continue;
      const Vector a = (Vector(2) << -cands[i].lambda, cands[i].dist).finished();
      const Vector b = (Vector(2) << -cands[pick].lambda, cands[pick].dist).finished();
      dominated = dominated || mobo::dominates(a, b);
    }
    if (!dominated) ++nondominated;
  }
  const double secs = seconds_since(t0);
  return {feasible >= 18 && nondominated == 20 && secs < 120.0,
          std::to_string(feasible) + "/20 feasible, " + std::to_string(nondominated) +
              "/20 selections non-dominated in their start sets; " + fmt("%.1f s", secs)};
}

Outcome reproduction(const RunSet& set, double threshold, const std::string& label) {
  const auto hv = set.final_hv();
  const double m = mean(hv);
  const double max_s = set.max_seconds();
  std::string per;
  for (double v : hv) per += fmt(" %.4f", v);
  return {!set.any_failed() && m >= threshold && max_s < 1200.0,
          label + " mean HV " + fmt("%.4f", m) + " (>= " + fmt("%.3f", threshold) + "), seeds" + per +
              "; slowest seed " + fmt("%.0f s", max_s)};
}

Outcome pfe_ablation(const RunSet& with, const RunSet& without) {
  const auto a = with.final_hv();
  const auto b = without.final_hv();
  int wins = 0;
  for (std::size_t i = 0; i < a.size(); ++i) wins += a[i] > b[i] ? 1 : 0;
  // one-sided sign test with 5 seeds: all five must favor the default (p = 1/32)
  return {!with.any_failed() && !without.any_failed() && wins == static_cast<int>(a.size()) && mean(b) < mean(a),
          "mean HV with expansion " + fmt("%.4f", mean(a)) + " vs without " + fmt("%.4f", mean(b)) + "; " +
              std::to_string(wins) + "/5 seeds favor expansion"};
}

Outcome baseline_ordering(const RunSet& zdt_mobo, const RunSet& dtlz_mobo) {
  auto random_cfg = [](const std::string& problem) {
    auto cfg = default_config(problem, 120);
    cfg.algo = mobo::Algorithm::kRandom;
    return cfg;
  };
  const auto zdt_rand = run_seeds(random_cfg("zdt1"));
  const auto dtlz_rand = run_seeds(random_cfg("dtlz2-m2"));
  const double z_gap = mean(zdt_rand.log_diff_at(120)) - mean(zdt_mobo.log_diff_at(120));
  const double d_gap = mean(dtlz_rand.log_diff_at(120)) - mean(dtlz_mobo.log_diff_at(120));
  return {!zdt_mobo.any_failed() && !dtlz_mobo.any_failed() && z_gap >= 0.5 && d_gap >= 0.5,
          "log HV diff gap over random at T=120: ZDT1 " + fmt("%.3f", z_gap) + ", DTLZ2-M2 " + fmt("%.3f", d_gap)};
}

Outcome batch_balance() {
  int iterations = 0;
  int worst = 0;
  bool failed = false;
  for (int b : {4, 8}) {
    auto cfg = default_config("dtlz2-m2", 200);
    cfg.batch = b;
    const auto r = mobo::run_seed(cfg, 21, [&](const mobo::IterationInfo& info) {
      ++iterations;
      worst = std::max(worst, mobo::balance_spread(info.picked_origins, info.available_origins));
    });
    failed = failed || r.failed || r.rows.size() != 200;
  }
  return {!failed && worst <= 1,
          std::to_string(iterations) + " batches checked; worst max-min pick spread " + std::to_string(worst)};
}

Outcome nbi_check() {
  mobo::Problem p;
  p.name = "two-parabolas";
  p.dim = 1;
  p.num_objectives = 2;
  p.bounds = mobo::Box::unit(1);
  p.ref_point = Vector::Constant(2, 1.1);
  p.objective = [](const Vector& x) { return (Vector(2) << x(0) * x(0), (x(0) - 1) * (x(0) - 1)).finished(); };

  // individual minima found by the same derivative-free phase the full run uses
  mobo::BudgetedEvaluator eval(p, 400);
  Matrix f_star(2, 2);
  Vector x_star(2);
  for (int m = 0; m < 2; ++m) {
    double best = 1e300;
    mobo::nelder_mead([&](const Vector& x) {
      const Vector f = eval(x);
      if (f(m) < best) {
        best = f(m);
        f_star.col(m) = f;
        x_star(m) = x(0);
      }
      return f(m);
    }, Vector::Constant(1, 0.5), p.bounds);
  }
  const auto frame = mobo::NbiFrame::from(f_star);
  const auto sol = mobo::nbi_subproblem(eval, frame, Vector::Constant(2, 0.5), Vector::Constant(1, 0.3), 100);
  bool ledger_ok = eval.used() <= eval.budget();
  for (int budget : {2, 7, 40, 120, 200}) {
    const auto d = mobo::nbi_run(mobo::get_problem("dtlz2-m2"), budget, 20, 3);
    ledger_ok = ledger_ok && static_cast<int>(d.eval_count()) <= budget;
  }
  const auto tiny = mobo::nbi_run(p, 5, 20, 1);
  ledger_ok = ledger_ok && tiny.eval_count() == 5;
  const bool minima_ok = std::abs(x_star(0)) <= 0.05 && std::abs(x_star(1) - 1.0) <= 0.05;
  return {std::abs(sol.x(0) - 0.5) <= 0.05 && minima_ok && ledger_ok,
          "midpoint subproblem x = " + fmt("%.4f", sol.x(0)) + ", residual " + fmt("%.1e", sol.residual) +
              "; minima at " + fmt("%.3f", x_star(0)) + fmt(" and %.3f", x_star(1)) +
              (ledger_ok ? "; budget ledger respected" : "; budget ledger violated")};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const auto root = std::filesystem::temp_directory_path() / "mobo_acceptance_determinism";
  std::filesystem::remove_all(root);
  bool same = true;
  std::size_t files = 0;
  for (const auto& [problem, batch] : std::vector<std::pair<std::string, int>>{{"dtlz2-m2", 1}, {"vlmop2", 4}}) {
    auto cfg = default_config(problem, 40);
    cfg.batch = batch;
    cfg.seeds = {7, 8};
    cfg.out_dir = root / (problem + "_a");
    mobo::run(cfg);
    cfg.out_dir = root / (problem + "_b");
    cfg.jobs = 2;
    mobo::run(cfg);
    for (const char* name : {"seed_7.csv", "seed_8.csv", "summary.csv"}) {
      const auto a = slurp(root / (problem + "_a") / name);
      const auto b = slurp(root / (problem + "_b") / name);
      same = same && !a.empty() && a == b;
      ++files;
    }
  }
  return {same, std::to_string(files) + " CSV pairs compared byte for byte"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto wanted = [&](int k) { return only.empty() || only.count(k) > 0; };

  int failures = 0;
  auto report = [&](int k, const std::string& name, const Outcome& o) {
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", k, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };

  if (wanted(1)) report(1, "hypervolume oracle equivalence", hv_oracle());
  if (wanted(2)) report(2, "posterior derivative checks", derivative_checks());
  if (wanted(3)) report(3, "subproblem feasibility", subproblem_feasibility());

  RunSet dtlz;
  if (wanted(4) || wanted(6) || wanted(7)) dtlz = run_seeds(default_config("dtlz2-m2", 200));
  if (wanted(4)) report(4, "DTLZ2-M2 reproduction", reproduction(dtlz, 0.415, "DTLZ2-M2 T=200"));
  if (wanted(5)) report(5, "VLMOP2 reproduction", reproduction(run_seeds(default_config("vlmop2", 200)), 0.32, "VLMOP2 T=200"));
  if (wanted(6)) {
    auto cfg = default_config("dtlz2-m2", 200);
    cfg.use_pfe = false;
    report(6, "expansion ablation direction", pfe_ablation(dtlz, run_seeds(cfg)));
  }
  // with b = 1 the first 120 evaluations of a T = 200 run equal a T = 120 run
  if (wanted(7)) report(7, "baseline ordering", baseline_ordering(run_seeds(default_config("zdt1", 120)), dtlz));
  if (wanted(8)) report(8, "batch balance", batch_balance());
  if (wanted(9)) report(9, "NBI analytic check and budget", nbi_check());
  if (wanted(10)) report(10, "determinism", determinism());

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
