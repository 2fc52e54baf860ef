#include "mobo/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "mobo/hypervolume.hpp"
#include "mobo/parallel.hpp"
#include "mobo/random.hpp"

namespace mobo {

OsdConstraints osd_constraints(const Surrogate& models, const Eigen::Ref<const Vector>& x, const OsdLine& line,
                               double delta) {
  const PosteriorEval ev = models.evaluate(x, 1);
  const Projection<double> proj = lambda_gamma(ev.mu, line);
  OsdConstraints c;
  c.lambda = proj.lambda;
  c.dist = proj.dist;
  c.grad_lambda = ev.jac_mu.transpose() * line.normal;
  c.g1 = proj.gamma - ev.mu + delta * ev.sigma;
  c.g2 = ev.mu + delta * ev.sigma - proj.gamma;
  const Matrix dgamma = line.normal * c.grad_lambda.transpose();  // M x D
  c.jac_g1 = dgamma - ev.jac_mu + delta * ev.jac_sigma;
  c.jac_g2 = ev.jac_mu + delta * ev.jac_sigma - dgamma;
  return c;
}

std::vector<SubproblemCandidate> solve_one(const Surrogate& models, const OsdLine& line, double delta,
                                           const Matrix& starts, const SqpOptions& options) {
  if (starts.rows() < 1) throw ContractError("solve_one: need at least one start");
  const Eigen::Index d = starts.cols();
  const Eigen::Index m = line.normal.size();
  const Vector lo = Vector::Zero(d);
  const Vector hi = Vector::Ones(d);

  const NlpFunction fn = [&](const Vector& x) {
    const OsdConstraints c = osd_constraints(models, x, line, delta);
    NlpPoint p;
    p.objective = -c.lambda;
    p.gradient = -c.grad_lambda;
    p.constraints.resize(2 * m);
    p.constraints << c.g1, c.g2;
    p.jacobian.resize(2 * m, d);
    p.jacobian << c.jac_g1, c.jac_g2;
    return p;
  };

  SqpOptions sqp = options;
  sqp.feasibility_tolerance = kFeasibilityTolerance;
  std::vector<SubproblemCandidate> out;
  for (Eigen::Index s = 0; s < starts.rows(); ++s) {
    const SqpResult res = minimize_sqp(fn, starts.row(s).transpose(), lo, hi, sqp);
    if (!res.finite || !res.x.allFinite()) continue;
    const Projection<double> proj = lambda_gamma(models.mean(res.x), line);
    SubproblemCandidate cand;
    cand.x = res.x;
    cand.lambda = proj.lambda;
    cand.dist = proj.dist;
    cand.residual = res.min_constraint;
    cand.feasible = res.min_constraint >= -kFeasibilityTolerance;
    out.push_back(std::move(cand));
  }
  return out;
}

std::size_t hvc_select(std::span<const std::pair<double, double>> candidates) {
  if (candidates.empty()) throw ContractError("hvc_select: no candidates");
  if (candidates.size() == 1) return 0;
  // minimization space: (-lambda, dist)
  Matrix pts(static_cast<Eigen::Index>(candidates.size()), 2);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    pts(static_cast<Eigen::Index>(i), 0) = -candidates[i].first;
    pts(static_cast<Eigen::Index>(i), 1) = candidates[i].second;
  }
  const Vector ideal = pts.colwise().minCoeff().transpose();
  const Vector nadir = pts.colwise().maxCoeff().transpose();
  // a zero-width coordinate would give every box zero volume
  const Vector span = (nadir - ideal).cwiseMax(1e-12 * (1.0 + nadir.cwiseAbs().maxCoeff()));
  const Vector ref = nadir + 0.1 * span;

  // contributions within 1e-9 of the reference box area count as tied
  const double tie = 1e-9 * (ref - ideal).prod();
  std::size_t best = 0;
  double best_hvc = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double hvc = hypervolume_contribution(pts, ref, static_cast<Eigen::Index>(i));
    const bool better = hvc > best_hvc + tie ||
                        (hvc >= best_hvc - tie && candidates[i].second < candidates[best].second);
    if (better) {
      best = i;
      best_hvc = std::max(best_hvc, hvc);
    }
  }
  return best;
}

std::size_t select_candidate(const std::vector<SubproblemCandidate>& candidates) {
  if (candidates.empty()) throw ContractError("select_candidate: no candidates");
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].feasible) pool.push_back(i);
  }
  if (pool.empty()) {
    for (std::size_t i = 0; i < candidates.size(); ++i) pool.push_back(i);
  }
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(pool.size());
  for (auto i : pool) pairs.emplace_back(candidates[i].lambda, candidates[i].dist);
  return pool[hvc_select(pairs)];
}

Matrix multistart_points(const Surrogate& models, const Matrix& observed_x, const OsdLine& line, int num_starts,
                         std::uint64_t seed, int beta_index) {
  const Eigen::Index d = models.dim();
  const int n_s = std::max(1, num_starts);
  Matrix starts(n_s, d);
  int filled = 0;
  if (observed_x.rows() > 0) {
    Eigen::Index closest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < observed_x.rows(); ++i) {
      const double dist = lambda_gamma(models.mean(observed_x.row(i).transpose()), line).dist;
      if (dist < best) {
        best = dist;
        closest = i;
      }
    }
    starts.row(filled++) = observed_x.row(closest);
  }
  Halton halton(d, derive_seed(seed, {0x05d, static_cast<std::uint64_t>(beta_index)}));
  while (filled < n_s) starts.row(filled++) = halton.next().transpose();
  return starts;
}

std::vector<SubproblemResult> solve_all(const Surrogate& models, const ChimFrame& frame, const WeightSet& weights,
                                        const Matrix& observed_x, std::uint64_t seed, const SolveAllOptions& options) {
  if (weights.rows() < 1) throw ContractError("solve_all: empty weight set");
  const auto n_beta = static_cast<std::size_t>(weights.rows());
  std::vector<std::optional<SubproblemResult>> slots(n_beta);

  parallel_for(n_beta, options.jobs, [&](std::size_t i) {
    const auto bi = static_cast<int>(i);
    const OsdLine line = make_line(frame, weights.row(bi).transpose());
    const Matrix starts = multistart_points(models, observed_x, line, options.num_starts, seed, bi);
    const auto candidates = solve_one(models, line, options.delta, starts, options.sqp);
    if (candidates.empty()) return;
    const auto& chosen = candidates[select_candidate(candidates)];
    slots[i] = SubproblemResult{chosen.x, chosen.lambda, chosen.dist, bi, chosen.residual};
  });

  std::vector<SubproblemResult> out;
  for (auto& s : slots) {
    if (s) out.push_back(std::move(*s));
  }
  if (out.empty()) throw std::runtime_error("solve_all: every OSD subproblem failed");
  return out;
}

}  // namespace mobo
