#pragma once

// First-order Pareto front estimation around a subproblem solution.
//
// Directions v keep the KKT stationarity of the surrogate problem to first
// order: H v lies in span(J_F) + span(J_G) and J_G v = 0, with
// H = sum_i alpha_i Hess(mu_i) (box constraints have zero Hessian).

#include <Eigen/Core>

#include <cstdint>

#include "mobo/core.hpp"
#include "mobo/gp.hpp"

namespace mobo {

inline constexpr double kActiveBoundTolerance = 1e-9;
inline constexpr int kDefaultPfeSamples = 10;
inline constexpr double kDefaultPfeScale = 0.05;

struct ExplorationSpace {
  Vector center;
  Matrix directions;  // k x D, orthonormal rows, k <= min(M-1, D)
  int beta_index = 0;
};

struct KktMultipliers {
  Vector alpha;  // on the simplex
  Vector beta;   // one per active constraint row
  double residual = 0.0;
};

/// Minimizes ||J_F' alpha + J_G' beta|| over alpha on the simplex and free
/// beta. `active_jac` may have zero rows.
KktMultipliers kkt_multipliers(const Matrix& jac_mu, const Matrix& active_jac);

/// Rows of the Jacobian of the active box constraints at x
/// (+e_d for x_d at its lower bound, -e_d at its upper bound).
Matrix active_box_jacobian(const Eigen::Ref<const Vector>& x, const Box& box);

ExplorationSpace exploration_directions(const Surrogate& models, const Eigen::Ref<const Vector>& x, const Box& box,
                                        int beta_index = 0);

/// center first, then center + V' u with u ~ U[-scale, scale]^k, clipped to
/// the box. An empty direction set yields just the center.
Matrix sample_pfe(const ExplorationSpace& space, int n_e, double scale, const Box& box, std::uint64_t seed);

}  // namespace mobo
