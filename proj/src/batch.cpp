#include "mobo/batch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "mobo/hypervolume.hpp"

namespace mobo {

bool CandidatePool::add(const Eigen::Ref<const Vector>& x, int origin) {
  for (const auto& item : items_) {
    if ((item.x - x).cwiseAbs().maxCoeff() <= kPoolDedupTolerance) return false;
  }
  items_.push_back({x, origin});
  return true;
}

std::vector<int> BatchSelection::origins(const CandidatePool& pool) const {
  std::vector<int> out;
  out.reserve(picked.size());
  for (auto i : picked) out.push_back(pool.items()[i].origin);
  return out;
}

namespace {

double nearest_distance(const Vector& mu, const std::vector<Vector>& anchors) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : anchors) best = std::min(best, (a - mu).norm());
  return best;
}

Matrix nondominated_rows(const Matrix& pts) {
  const auto keep = pareto_filter(pts);
  Matrix out(static_cast<Eigen::Index>(keep.size()), pts.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = pts.row(static_cast<Eigen::Index>(keep[i]));
  return out;
}

}  // namespace

BatchSelection select_batch(const CandidatePool& pool, const Surrogate& models, const Matrix& front,
                            const Vector& ref, int b) {
  if (pool.empty()) throw ContractError("select_batch: empty candidate pool");
  if (b < 1) throw ContractError("select_batch: batch size must be positive");
  const auto& items = pool.items();
  const std::size_t n = items.size();
  const auto target = std::min<std::size_t>(static_cast<std::size_t>(b), n);

  BatchSelection sel;
  sel.believer = models;
  Matrix current_front = nondominated_rows(front);
  std::vector<Vector> anchors;
  for (Eigen::Index i = 0; i < current_front.rows(); ++i) anchors.push_back(current_front.row(i).transpose());

  std::vector<bool> selected(n, false);
  std::vector<bool> active(n, true);
  while (sel.picked.size() < target) {
    if (std::none_of(active.begin(), active.end(), [](bool a) { return a; })) {
      for (std::size_t i = 0; i < n; ++i) active[i] = !selected[i];
    }
    std::set<int> available;
    for (std::size_t i = 0; i < n; ++i) {
      if (!selected[i]) available.insert(items[i].origin);
    }

    std::size_t best = n;
    double best_hvi = -1.0;
    double best_gap = -1.0;
    Vector best_mu;
    double hv_scale = 1.0;
    if (current_front.rows() > 0) {
      hv_scale = std::max(1e-300, (ref - current_front.colwise().minCoeff().transpose().cwiseMin(ref)).prod());
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      const Vector mu = sel.believer.mean(items[i].x);
      const double hvi = hypervolume_improvement(mu, current_front, ref);
      const double tie_tol = 1e-12 * hv_scale;
      if (hvi > best_hvi + tie_tol) {
        best = i;
        best_hvi = hvi;
        best_gap = nearest_distance(mu, anchors);
        best_mu = mu;
      } else if (hvi >= best_hvi - tie_tol) {
        const double gap = nearest_distance(mu, anchors);
        if (gap > best_gap) {
          best = i;
          best_gap = gap;
          best_mu = mu;
          best_hvi = std::max(best_hvi, hvi);
        }
      }
    }

    sel.picked.push_back(best);
    sel.hvi.push_back(best_hvi);
    sel.available_origins.emplace_back(available.begin(), available.end());
    selected[best] = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (items[i].origin == items[best].origin) active[i] = false;
    }
    sel.believer = sel.believer.condition_on(items[best].x, best_mu);
    current_front.conservativeResize(current_front.rows() + 1, Eigen::NoChange);
    current_front.row(current_front.rows() - 1) = best_mu.transpose();
    current_front = nondominated_rows(current_front);
    anchors.push_back(best_mu);
  }
  return sel;
}

int balance_spread(const std::vector<int>& picked_origins, const std::vector<std::vector<int>>& available_origins) {
  if (picked_origins.size() != available_origins.size()) throw ContractError("balance_spread: size mismatch");
  std::map<int, int> counts;
  int worst = 0;
  for (std::size_t t = 0; t < picked_origins.size(); ++t) {
    counts[picked_origins[t]] += 1;
    int lo = std::numeric_limits<int>::max();
    int hi = std::numeric_limits<int>::min();
    for (int o : available_origins[t]) {
      const int c = counts.count(o) ? counts[o] : 0;
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    if (!available_origins[t].empty()) worst = std::max(worst, hi - lo);
  }
  return worst;
}

}  // namespace mobo
