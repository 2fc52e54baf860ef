#pragma once

// The per-OSD constrained subproblem: maximize lambda(x) subject to the
// projection of mu(x) onto the OSD staying inside the box mu +- delta sigma.
//
// All quantities live in the offset (non-negative) objective space and the
// unit design box.

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mobo/constrained.hpp"
#include "mobo/core.hpp"
#include "mobo/geometry.hpp"
#include "mobo/gp.hpp"
#include "mobo/simplex.hpp"

namespace mobo {

inline constexpr double kDefaultDelta = 1.96;
inline constexpr double kFeasibilityTolerance = 1e-4;

struct OsdConstraints {
  Vector g1;  // gamma - mu + delta sigma
  Vector g2;  // mu + delta sigma - gamma
  Matrix jac_g1;
  Matrix jac_g2;
  double lambda = 0.0;
  Vector grad_lambda;
  double dist = 0.0;
};

OsdConstraints osd_constraints(const Surrogate& models, const Eigen::Ref<const Vector>& x, const OsdLine& line,
                               double delta);

struct SubproblemCandidate {
  Vector x;
  double lambda = 0.0;
  double dist = 0.0;
  double residual = 0.0;  // most-violated constraint
  bool feasible = false;
};

struct SubproblemResult {
  Vector x_osd;
  double lambda = 0.0;
  double dist = 0.0;
  int beta_index = 0;
  double feasibility_residual = 0.0;
};

/// Runs the SQP solver from every row of `starts`; one candidate per start
/// whose iterates stayed finite.
std::vector<SubproblemCandidate> solve_one(const Surrogate& models, const OsdLine& line, double delta,
                                           const Matrix& starts, const SqpOptions& options = {});

/// Index maximizing the hypervolume contribution of (lambda, dist) pairs
/// under (maximize lambda, minimize dist). Ties: smaller dist, then lower index.
std::size_t hvc_select(std::span<const std::pair<double, double>> candidates);

/// Feasible candidates first; infeasible ones only when none is feasible.
std::size_t select_candidate(const std::vector<SubproblemCandidate>& candidates);

struct SolveAllOptions {
  double delta = kDefaultDelta;
  int num_starts = 4;
  int jobs = 1;
  SqpOptions sqp;
};

/// Starting points for OSD `beta_index`: the observed point whose posterior
/// mean lies closest to the line, then (num_starts - 1) shifted-Halton points.
Matrix multistart_points(const Surrogate& models, const Matrix& observed_x, const OsdLine& line, int num_starts,
                         std::uint64_t seed, int beta_index);

/// One selected solution per OSD; OSDs whose starts all failed are omitted.
/// Throws when every OSD failed.
std::vector<SubproblemResult> solve_all(const Surrogate& models, const ChimFrame& frame, const WeightSet& weights,
                                        const Matrix& observed_x, std::uint64_t seed,
                                        const SolveAllOptions& options = {});

}  // namespace mobo
