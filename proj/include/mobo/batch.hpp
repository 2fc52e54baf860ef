#pragma once

// Greedy batch selection by hypervolume improvement of the posterior mean,
// with Kriging Believer updates and one pick per exploration space per round.

#include <Eigen/Core>

#include <vector>

#include "mobo/core.hpp"
#include "mobo/gp.hpp"

namespace mobo {

inline constexpr double kPoolDedupTolerance = 1e-12;

struct PoolItem {
  Vector x;
  int origin = 0;  // beta index of the exploration space
};

class CandidatePool {
 public:
  /// Adds x unless a pool member lies within 1e-12 (max-norm). Returns
  /// whether it was added.
  bool add(const Eigen::Ref<const Vector>& x, int origin);

  [[nodiscard]] const std::vector<PoolItem>& items() const { return items_; }
  [[nodiscard]] std::size_t size() const { return items_.size(); }
  [[nodiscard]] bool empty() const { return items_.empty(); }

 private:
  std::vector<PoolItem> items_;
};

struct BatchSelection {
  std::vector<std::size_t> picked;  // pool indices in pick order
  std::vector<double> hvi;          // HVI at pick time
  std::vector<std::vector<int>> available_origins;  // origins with unselected candidates at each pick
  Surrogate believer;               // models conditioned on every pick

  [[nodiscard]] std::vector<int> origins(const CandidatePool& pool) const;
};

/// Picks min(b, pool size) candidates.
///
/// Each step scores the active pool by HVI of the (believer) posterior mean
/// against `front` plus the pseudo-observations made so far, takes the
/// maximum (ties: larger distance in objective space to the nearest
/// selected or front point, then lower pool index), conditions the models
/// on (x, mu(x)) and stages the other candidates of the same origin. When
/// the active pool empties, staged candidates are reintroduced.
///
/// `front` and `ref` must be in the surrogate's objective units.
BatchSelection select_batch(const CandidatePool& pool, const Surrogate& models, const Matrix& front,
                            const Vector& ref, int b);

/// Largest max-min spread of pick counts over the origins available at each
/// pick time. The selection rule keeps it <= 1.
int balance_spread(const std::vector<int>& picked_origins, const std::vector<std::vector<int>>& available_origins);

}  // namespace mobo
