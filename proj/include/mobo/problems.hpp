#pragma once

// Benchmark problems: objective functions, design boxes, reference points
// and analytic Pareto fronts.

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mobo/core.hpp"

namespace mobo {

struct Problem {
  using Objective = std::function<ObjectiveVector(const Vector&)>;
  using FrontSampler = std::function<Matrix(int)>;

  std::string name;
  int dim = 0;
  int num_objectives = 0;
  Box bounds;
  Vector ref_point;
  Objective objective;           // empty for problems without a closed form here
  FrontSampler front_sampler;    // empty when the front is not known analytically
  std::function<double()> max_hypervolume;
};

/// Looks a problem up by case-insensitive name: dtlz2-m2, dtlz2-m3,
/// dtlz2-m4, zdt1, vlmop2, and the reserved real-world slots speed-reducer,
/// car-side, marine, water-planning (reference points only).
const Problem& get_problem(const std::string& name);
std::vector<std::string> problem_names();

Problem make_dtlz2(int num_objectives, int dim = 5);
Problem make_zdt1(int dim = 5);
Problem make_vlmop2(int dim = 5);

/// Throws ContractError when x is outside the box or the problem has no
/// closed form.
ObjectiveVector evaluate(const Problem& problem, const Eigen::Ref<const Vector>& x);

/// n points spread along the analytic front parameterization.
Matrix true_front_samples(const Problem& problem, int n);

/// Maximum hypervolume w.r.t. the problem's reference point.
double hv_max(const Problem& problem);

}  // namespace mobo
