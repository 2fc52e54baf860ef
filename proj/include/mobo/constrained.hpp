#pragma once

// Small dense SQP solver for box-bounded problems with smooth inequality
// constraints: minimize f(x) s.t. c(x) >= 0, lo <= x <= hi.

#include <Eigen/Core>

#include <functional>

#include "mobo/core.hpp"

namespace mobo {

struct NlpPoint {
  double objective = 0.0;
  Vector gradient;     // length D
  Vector constraints;  // length K, feasible when >= 0
  Matrix jacobian;     // K x D
};

using NlpFunction = std::function<NlpPoint(const Vector&)>;

struct SqpOptions {
  int max_iterations = 100;
  double step_tolerance = 1e-6;     // on ||d||_inf
  double gradient_tolerance = 1e-6; // on the Lagrangian gradient
  double feasibility_tolerance = 1e-4;
  double elastic_penalty = 1e4;
};

struct SqpResult {
  Vector x;
  double objective = 0.0;
  double min_constraint = 0.0;  // most-violated constraint value
  int iterations = 0;
  bool finite = false;
  bool converged = false;
};

/// Solves the problem from `x0` (clipped to the box) with damped-BFGS SQP,
/// an elastic QP subproblem and an L1 merit line search.
///
/// The returned point is the best feasible iterate visited (lowest objective
/// among iterates with min_constraint >= -feasibility_tolerance), or the least
/// violating iterate when none was feasible. Starting from a feasible point
/// therefore never returns a higher objective.
SqpResult minimize_sqp(const NlpFunction& fn, const Vector& x0, const Vector& lo, const Vector& hi,
                       const SqpOptions& options = {});

struct QpSolution {
  Vector step;
  Vector multipliers;  // one per row of the general constraint block
};

/// Elastic QP: min 1/2 d'Bd + g'd + penalty * sum(s) s.t. A d + s >= b, s >= 0,
/// lo <= d <= hi (box rows carry a much larger penalty). Solved through its
/// bound-constrained dual by coordinate ascent. B must be positive definite.
QpSolution solve_elastic_qp(const Matrix& b_mat, const Vector& g, const Matrix& a, const Vector& b, const Vector& lo,
                            const Vector& hi, double penalty);

}  // namespace mobo
