#pragma once

// Random search and the normal-boundary-intersection (NBI) baseline.

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <stdexcept>

#include "mobo/core.hpp"
#include "mobo/problems.hpp"

namespace mobo {

class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted() : std::runtime_error("evaluation budget exhausted") {}
};

/// Counts and records every true evaluation. Throws BudgetExhausted instead
/// of evaluating past the budget.
class BudgetedEvaluator {
 public:
  BudgetedEvaluator(const Problem& problem, int budget);

  Vector operator()(const Eigen::Ref<const Vector>& x);

  [[nodiscard]] int used() const { return static_cast<int>(data_.eval_count()); }
  [[nodiscard]] int budget() const { return budget_; }
  [[nodiscard]] bool exhausted() const { return used() >= budget_; }
  [[nodiscard]] const Dataset& data() const { return data_; }
  [[nodiscard]] const Problem& problem() const { return *problem_; }

 private:
  const Problem* problem_;
  int budget_;
  Dataset data_;
};

struct NelderMeadOptions {
  int max_evals = 200;
  double initial_step = 0.1;  // fraction of the box width
  double tolerance = 1e-10;   // on the simplex value spread
};

struct NelderMeadResult {
  Vector x;
  double value = 0.0;
  int evals = 0;
};

/// Minimizes f over the box. f is called at the clipped trial point; the
/// distance outside the box is added as a quadratic penalty.
NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Eigen::Ref<const Vector>& x0,
                             const Box& box, const NelderMeadOptions& options = {});

Dataset random_search(const Problem& problem, int budget, std::uint64_t seed);

/// Columns of `f_star` are the objective vectors at the individual minima.
struct NbiFrame {
  Matrix phi;      // f_star - utopia, column-wise
  Vector utopia;
  Vector normal;   // -phi e, unit length

  static NbiFrame from(const Matrix& f_star);
  [[nodiscard]] Vector anchor(const Eigen::Ref<const Vector>& beta) const { return phi * beta + utopia; }
};

inline constexpr double kNbiPenalty = 1e3;

struct NbiSolution {
  Vector x;
  Vector f;
  double lambda = 0.0;
  double residual = 0.0;  // ||U + lambda n - f(x)||
};

/// max lambda - rho ||U + lambda n - f(x)||^2. Lambda is eliminated in closed
/// form, leaving a derivative-free search over x.
NbiSolution nbi_subproblem(BudgetedEvaluator& eval, const NbiFrame& frame, const Eigen::Ref<const Vector>& beta,
                           const Eigen::Ref<const Vector>& x0, int max_evals);

/// Phase 1 individual minima, then one NBI subproblem per Riesz weight,
/// repeated from fresh starts until the budget runs out.
Dataset nbi_run(const Problem& problem, int budget, int n_beta, std::uint64_t seed);

}  // namespace mobo
