#pragma once

// Front quality indicators against a reference point or a reference front.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "mobo/core.hpp"
#include "mobo/hypervolume.hpp"

namespace mobo {

inline constexpr double kLogHvFloor = 1e-12;

struct MetricReport {
  double log_hv_diff = 0.0;
  double hv = 0.0;
  std::optional<double> igd;
  std::optional<double> igd_plus;
  std::optional<double> eps;
  std::size_t eval_count = 0;
};

/// log10(max(hv_max - HV(front, r), 1e-12)).
template <typename Derived, typename DerivedR>
double log_hv_diff(const Eigen::MatrixBase<Derived>& front, const Eigen::MatrixBase<DerivedR>& r,
                   double hv_max) {
  const double hv = static_cast<double>(hypervolume(front, r));
  return std::log10(std::max(hv_max - hv, kLogHvFloor));
}

enum class IgdVariant { kIgd, kIgdPlus };

/// Mean over reference rows z of the distance to the closest front row a.
/// IGD uses ||a - z||, IGD+ uses ||max(a - z, 0)||.
template <typename DerivedF, typename DerivedR>
double igd_family(const Eigen::MatrixBase<DerivedF>& front, const Eigen::MatrixBase<DerivedR>& ref_set,
                  IgdVariant variant) {
  if (front.rows() == 0 || ref_set.rows() == 0) throw ContractError("igd_family: empty set");
  if (front.cols() != ref_set.cols()) throw ContractError("igd_family: objective count mismatch");
  double total = 0.0;
  for (Eigen::Index z = 0; z < ref_set.rows(); ++z) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < front.rows(); ++a) {
      const auto diff = (front.row(a) - ref_set.row(z)).eval();
      const double d = variant == IgdVariant::kIgd ? diff.norm() : diff.cwiseMax(0.0).norm();
      best = std::min(best, d);
    }
    total += best;
  }
  return total / static_cast<double>(ref_set.rows());
}

/// Additive epsilon indicator: max_z min_a max_m (a_m - z_m).
template <typename DerivedF, typename DerivedR>
double eps_indicator(const Eigen::MatrixBase<DerivedF>& front, const Eigen::MatrixBase<DerivedR>& ref_set) {
  if (front.rows() == 0 || ref_set.rows() == 0) throw ContractError("eps_indicator: empty set");
  if (front.cols() != ref_set.cols()) throw ContractError("eps_indicator: objective count mismatch");
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index z = 0; z < ref_set.rows(); ++z) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < front.rows(); ++a) {
      best = std::min(best, (front.row(a) - ref_set.row(z)).maxCoeff());
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace mobo
