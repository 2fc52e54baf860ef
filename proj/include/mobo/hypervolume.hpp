#pragma once

// Exact hypervolume for minimization fronts.
//
// The dominated region of a point p is the half-open box [p, r). A point with
// p_m >= r_m on any coordinate contributes nothing. M = 2 and M = 3 use
// dimension sweeps; M >= 4 slices along the last objective and recurses on
// the limited sets (WFG style).

#include <Eigen/Core>

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <map>
#include <vector>

#include "mobo/core.hpp"

namespace mobo {

namespace hv_detail {

template <typename Scalar>
using PointList = std::vector<std::vector<Scalar>>;

template <typename Scalar>
bool weakly_dominates(const std::vector<Scalar>& a, const std::vector<Scalar>& b, std::size_t k) {
  for (std::size_t m = 0; m < k; ++m) {
    if (a[m] > b[m]) return false;
  }
  return true;
}

// Keeps one representative per weakly-dominating chain, looking only at the
// first k coordinates. Lexicographic order puts every dominator before the
// points it dominates, so each point is tested against kept points only.
template <typename Scalar>
PointList<Scalar> nondominated(const PointList<Scalar>& pts, std::size_t k) {
  std::vector<std::size_t> order(pts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(pts[a].begin(), pts[a].begin() + static_cast<std::ptrdiff_t>(k),
                                        pts[b].begin(), pts[b].begin() + static_cast<std::ptrdiff_t>(k));
  });
  PointList<Scalar> out;
  out.reserve(pts.size());
  if (k == 2) {
    for (auto i : order) {
      if (out.empty() || pts[i][1] < out.back()[1]) out.push_back(pts[i]);
    }
    return out;
  }
  for (auto i : order) {
    bool keep = true;
    for (const auto& q : out) {
      if (weakly_dominates(q, pts[i], k)) {
        keep = false;
        break;
      }
    }
    if (keep) out.push_back(pts[i]);
  }
  return out;
}

template <typename Scalar>
Scalar hv2d(PointList<Scalar> pts, const std::vector<Scalar>& r) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  Scalar area = 0;
  Scalar prev_y = r[1];
  for (const auto& p : pts) {
    if (p[1] < prev_y) {
      area += (r[0] - p[0]) * (prev_y - p[1]);
      prev_y = p[1];
    }
  }
  return area;
}

// Sweep along the third objective over a 2-D staircase (x ascending,
// y descending) whose dominated area is updated on each insertion.
template <typename Scalar>
Scalar hv3d(PointList<Scalar> pts, const std::vector<Scalar>& r) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a[2] < b[2]; });
  std::map<Scalar, Scalar> stair;
  Scalar area = 0;
  Scalar volume = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Scalar px = pts[i][0];
    const Scalar py = pts[i][1];
    auto above = stair.upper_bound(px);
    if (above == stair.begin() || std::prev(above)->second > py) {
      auto cur = stair.lower_bound(px);
      Scalar h = cur == stair.begin() ? r[1] : std::prev(cur)->second;
      Scalar x = px;
      Scalar added = 0;
      while (cur != stair.end() && cur->second >= py) {
        added += (cur->first - x) * (h - py);
        x = cur->first;
        h = cur->second;
        cur = stair.erase(cur);
      }
      added += ((cur == stair.end() ? r[0] : cur->first) - x) * (h - py);
      stair[px] = py;
      area += added;
    }
    const Scalar top = (i + 1 < pts.size()) ? pts[i + 1][2] : r[2];
    volume += area * (top - pts[i][2]);
  }
  return volume;
}

template <typename Scalar>
Scalar box_volume(const std::vector<Scalar>& p, const std::vector<Scalar>& r, std::size_t k) {
  Scalar v = 1;
  for (std::size_t m = 0; m < k; ++m) v *= (r[m] - p[m]);
  return v;
}

// Hypervolume of pts over their first k coordinates; every point strictly
// dominates r on those coordinates.
template <typename Scalar>
Scalar hv_rec(PointList<Scalar> pts, const std::vector<Scalar>& r, std::size_t k) {
  if (pts.empty()) return 0;
  if (pts.size() == 1) return box_volume(pts[0], r, k);
  if (k == 1) {
    Scalar best = pts[0][0];
    for (const auto& p : pts) best = std::min(best, p[0]);
    return r[0] - best;
  }
  if (k == 2) return hv2d(std::move(pts), r);
  if (k == 3) return hv3d(std::move(pts), r);

  const std::size_t last = k - 1;
  std::sort(pts.begin(), pts.end(), [last](const auto& a, const auto& b) { return a[last] > b[last]; });
  Scalar volume = 0;
  PointList<Scalar> limited;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    limited.clear();
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      std::vector<Scalar> q(last);
      for (std::size_t m = 0; m < last; ++m) q[m] = std::max(p[m], pts[j][m]);
      limited.push_back(std::move(q));
    }
    const Scalar excl = box_volume(p, r, last) - hv_rec(nondominated(limited, last), r, last);
    volume += (r[last] - p[last]) * excl;
  }
  return volume;
}

template <typename Derived, typename DerivedR>
PointList<typename Derived::Scalar> clip_to_reference(const Eigen::MatrixBase<Derived>& front,
                                                      const Eigen::MatrixBase<DerivedR>& r) {
  using Scalar = typename Derived::Scalar;
  if (front.rows() > 0 && front.cols() != r.size()) {
    throw ContractError("hypervolume: objective count does not match reference point");
  }
  PointList<Scalar> pts;
  pts.reserve(static_cast<std::size_t>(front.rows()));
  for (Eigen::Index i = 0; i < front.rows(); ++i) {
    bool inside = true;
    for (Eigen::Index m = 0; m < r.size(); ++m) inside = inside && front(i, m) < r(m);
    if (!inside) continue;
    std::vector<Scalar> p(static_cast<std::size_t>(r.size()));
    for (Eigen::Index m = 0; m < r.size(); ++m) p[static_cast<std::size_t>(m)] = front(i, m);
    pts.push_back(std::move(p));
  }
  return pts;
}

template <typename DerivedR>
std::vector<typename DerivedR::Scalar> to_std(const Eigen::MatrixBase<DerivedR>& r) {
  std::vector<typename DerivedR::Scalar> out(static_cast<std::size_t>(r.size()));
  for (Eigen::Index m = 0; m < r.size(); ++m) out[static_cast<std::size_t>(m)] = r(m);
  return out;
}

}  // namespace hv_detail

/// Lebesgue measure of the union of boxes [p, r) over the rows p of `front`.
template <typename Derived, typename DerivedR>
typename Derived::Scalar hypervolume(const Eigen::MatrixBase<Derived>& front,
                                     const Eigen::MatrixBase<DerivedR>& r) {
  auto pts = hv_detail::clip_to_reference(front, r);
  const auto k = static_cast<std::size_t>(r.size());
  return hv_detail::hv_rec(hv_detail::nondominated(pts, k), hv_detail::to_std(r), k);
}

/// HV(front + {point}) - HV(front), computed as the volume exclusive to `point`.
template <typename DerivedP, typename Derived, typename DerivedR>
typename Derived::Scalar hypervolume_improvement(const Eigen::MatrixBase<DerivedP>& point,
                                                 const Eigen::MatrixBase<Derived>& front,
                                                 const Eigen::MatrixBase<DerivedR>& r) {
  using Scalar = typename Derived::Scalar;
  const auto k = static_cast<std::size_t>(r.size());
  if (point.size() != r.size()) throw ContractError("hypervolume_improvement: length mismatch");
  for (Eigen::Index m = 0; m < r.size(); ++m) {
    if (!(point(m) < r(m))) return Scalar(0);
  }
  const auto rr = hv_detail::to_std(r);
  std::vector<Scalar> p(k);
  for (std::size_t m = 0; m < k; ++m) p[m] = point(static_cast<Eigen::Index>(m));

  auto others = hv_detail::clip_to_reference(front, r);
  hv_detail::PointList<Scalar> limited;
  limited.reserve(others.size());
  for (const auto& q : others) {
    std::vector<Scalar> l(k);
    for (std::size_t m = 0; m < k; ++m) l[m] = std::max(p[m], q[m]);
    limited.push_back(std::move(l));
  }
  const Scalar covered = hv_detail::hv_rec(hv_detail::nondominated(limited, k), rr, k);
  return std::max(Scalar(0), hv_detail::box_volume(p, rr, k) - covered);
}

/// HV(set) - HV(set without row `index`).
template <typename Derived, typename DerivedR>
typename Derived::Scalar hypervolume_contribution(const Eigen::MatrixBase<Derived>& set,
                                                  const Eigen::MatrixBase<DerivedR>& r,
                                                  Eigen::Index index) {
  if (index < 0 || index >= set.rows()) throw ContractError("hypervolume_contribution: bad index");
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> rest(set.rows() - 1, set.cols());
  for (Eigen::Index i = 0, j = 0; i < set.rows(); ++i) {
    if (i != index) rest.row(j++) = set.row(i);
  }
  return hypervolume_improvement(set.row(index).transpose(), rest, r);
}

}  // namespace mobo
