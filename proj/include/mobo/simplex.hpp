#pragma once

// Well-spread convex-combination weights on the unit simplex.

#include <Eigen/Core>

#include <cstdint>

#include "mobo/core.hpp"

namespace mobo {

/// n_beta x M matrix; every row is a strictly positive convex combination.
using WeightSet = Matrix;

inline constexpr double kWeightFloor = 1e-6;

/// Euclidean projection of v onto {w : w >= 0, sum w = 1}.
Vector project_to_simplex(const Eigen::Ref<const Vector>& v);

/// Sum over unordered pairs of ||w_i - w_j||^{-s}.
double riesz_energy(const WeightSet& weights, double s);

/// Minimizes the Riesz s-energy (s = M + 1) of n_beta points on the
/// M-simplex by projected gradient descent from a seeded low-discrepancy
/// start, then clips every weight to at least 1e-6 and renormalizes.
WeightSet riesz_weights(int num_objectives, int n_beta, std::uint64_t seed);

}  // namespace mobo
