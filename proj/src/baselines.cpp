#include "mobo/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "mobo/random.hpp"
#include "mobo/simplex.hpp"

namespace mobo {

BudgetedEvaluator::BudgetedEvaluator(const Problem& problem, int budget)
    : problem_(&problem), budget_(budget), data_(problem.dim, problem.num_objectives) {
  if (budget < 0) throw ContractError("BudgetedEvaluator: negative budget");
}

Vector BudgetedEvaluator::operator()(const Eigen::Ref<const Vector>& x) {
  if (exhausted()) throw BudgetExhausted();
  Vector f = evaluate(*problem_, x);
  data_.append(x, f);
  return f;
}

NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Eigen::Ref<const Vector>& x0,
                             const Box& box, const NelderMeadOptions& options) {
  const Eigen::Index d = x0.size();
  NelderMeadResult out;
  // vertices may leave the box; f sees the clipped point and the excursion is
  // penalized, so the simplex does not collapse onto a face
  auto call = [&](const Vector& x) {
    ++out.evals;
    const Vector inside = box.clip(x);
    return f(inside) + (x - inside).squaredNorm();
  };

  std::vector<Vector> simplex;
  std::vector<double> values;
  simplex.push_back(box.clip(x0));
  for (Eigen::Index k = 0; k < d; ++k) {
    Vector v = simplex.front();
    const double step = options.initial_step * (box.hi(k) - box.lo(k));
    v(k) += (v(k) + step <= box.hi(k)) ? step : -step;
    simplex.push_back(v);
  }
  for (const auto& v : simplex) values.push_back(call(v));

  std::vector<std::size_t> order(simplex.size());
  while (out.evals < options.max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];
    if (values[worst] - values[best] <= options.tolerance) break;

    Vector centroid = Vector::Zero(d);
    for (std::size_t i = 0; i + 1 < order.size(); ++i) centroid += simplex[order[i]];
    centroid /= static_cast<double>(d);

    const Vector xr = centroid + (centroid - simplex[worst]);
    const double fr = call(xr);
    if (fr < values[best]) {
      if (out.evals >= options.max_evals) {
        simplex[worst] = xr;
        values[worst] = fr;
        break;
      }
      const Vector xe = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = call(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        values[worst] = fe;
      } else {
        simplex[worst] = xr;
        values[worst] = fr;
      }
    } else if (fr < values[second]) {
      simplex[worst] = xr;
      values[worst] = fr;
    } else {
      if (out.evals >= options.max_evals) break;
      const bool outside = fr < values[worst];
      const Vector xc = outside ? Vector(centroid + 0.5 * (xr - centroid))
                                : Vector(centroid + 0.5 * (simplex[worst] - centroid));
      const double fc = call(xc);
      if (fc < (outside ? fr : values[worst])) {
        simplex[worst] = xc;
        values[worst] = fc;
      } else {
        for (std::size_t i = 0; i < simplex.size() && out.evals < options.max_evals; ++i) {
          if (i == best) continue;
          simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
          values[i] = call(simplex[i]);
        }
      }
    }
  }
  const auto it = std::min_element(values.begin(), values.end());
  out.x = box.clip(simplex[static_cast<std::size_t>(it - values.begin())]);
  out.value = *it;
  return out;
}

Dataset random_search(const Problem& problem, int budget, std::uint64_t seed) {
  if (budget < 1) throw ContractError("random_search: budget must be positive");
  Dataset data(problem.dim, problem.num_objectives);
  Rng rng(derive_seed(seed, {0x7a5}));
  for (int i = 0; i < budget; ++i) {
    const Vector x = problem.bounds.from_unit(rng.uniform_vector(problem.dim));
    data.append(x, evaluate(problem, x));
  }
  return data;
}

NbiFrame NbiFrame::from(const Matrix& f_star) {
  NbiFrame frame;
  frame.utopia = f_star.rowwise().minCoeff();
  frame.phi = f_star.colwise() - frame.utopia;
  Vector n = -(frame.phi * Vector::Ones(f_star.cols()));
  const double norm = n.norm();
  if (!(norm > 0)) throw InsufficientData("NbiFrame: degenerate individual minima");
  frame.normal = n / norm;
  return frame;
}

NbiSolution nbi_subproblem(BudgetedEvaluator& eval, const NbiFrame& frame, const Eigen::Ref<const Vector>& beta,
                           const Eigen::Ref<const Vector>& x0, int max_evals) {
  const Vector anchor = frame.anchor(beta);
  // optimal lambda for fixed f: 1/(2 rho) - (U - f).n
  auto lambda_of = [&](const Vector& f) { return 0.5 / kNbiPenalty - (anchor - f).dot(frame.normal); };
  auto penalized = [&](const Vector& f) {
    const double lambda = lambda_of(f);
    return -(lambda - kNbiPenalty * (anchor + lambda * frame.normal - f).squaredNorm());
  };
  NbiSolution best;
  double best_value = std::numeric_limits<double>::infinity();
  auto objective = [&](const Vector& x) {
    const Vector f = eval(x);
    const double v = penalized(f);
    if (v < best_value) {
      best_value = v;
      best.x = x;
      best.f = f;
    }
    return v;
  };
  NelderMeadOptions options;
  options.max_evals = max_evals;
  try {
    nelder_mead(objective, x0, eval.problem().bounds, options);
  } catch (const BudgetExhausted&) {
    if (best.x.size() == 0) throw;
  }
  best.lambda = lambda_of(best.f);
  best.residual = (anchor + best.lambda * frame.normal - best.f).norm();
  return best;
}

Dataset nbi_run(const Problem& problem, int budget, int n_beta, std::uint64_t seed) {
  const int m_obj = problem.num_objectives;
  if (budget < m_obj) throw ContractError("nbi_run: budget below the number of objectives");
  BudgetedEvaluator eval(problem, budget);
  const Box& box = problem.bounds;
  const int d = problem.dim;
  const int phase1_evals = 40 * d;
  const int phase2_evals = 20 * d;
  Rng rng(derive_seed(seed, {0x4b1}));

  try {
    Matrix x_star(d, m_obj);
    Matrix f_star(m_obj, m_obj);
    for (int m = 0; m < m_obj; ++m) {
      Vector best_x = box.from_unit(Vector::Constant(d, 0.5));
      Vector best_f;
      double best_v = std::numeric_limits<double>::infinity();
      auto single = [&](const Vector& x) {
        const Vector f = eval(x);
        if (f(m) < best_v) {
          best_v = f(m);
          best_x = x;
          best_f = f;
        }
        return f(m);
      };
      NelderMeadOptions options;
      options.max_evals = phase1_evals;
      nelder_mead(single, box.from_unit(Vector::Constant(d, 0.5)), box, options);
      x_star.col(m) = best_x;
      f_star.col(m) = best_f;
    }
    const NbiFrame frame = NbiFrame::from(f_star);
    const WeightSet weights = riesz_weights(m_obj, n_beta, derive_seed(seed, {0x51e}));
    for (int round = 0; !eval.exhausted(); ++round) {
      for (Eigen::Index j = 0; j < weights.rows() && !eval.exhausted(); ++j) {
        const Vector beta = weights.row(j).transpose();
        const Vector x0 = round == 0 ? Vector(x_star * beta) : Vector(box.from_unit(rng.uniform_vector(d)));
        nbi_subproblem(eval, frame, beta, x0, phase2_evals);
      }
    }
  } catch (const BudgetExhausted&) {
    // partial results are valid
  } catch (const InsufficientData&) {
    // coincident individual minima leave no CHIM; stop early
  }
  return eval.data();
}

}  // namespace mobo
