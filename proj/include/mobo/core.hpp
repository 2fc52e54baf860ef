#pragma once

// Fundamental dense types, Pareto dominance and the observed-data containers.
//
// Sets of points are stored row-wise: an N x M matrix holds N objective
// vectors of length M, an N x D matrix holds N design points.

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mobo {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

/// Coordinates of a design point (length D).
using DesignPoint = Vector;
/// Objective values of one evaluation (length M).
using ObjectiveVector = Vector;

/// Thrown when a function is called outside its documented preconditions.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a computation cannot proceed with the data at hand.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pareto dominance for minimization: a <= b everywhere and a < b somewhere.
template <typename DerivedA, typename DerivedB>
bool dominates(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) {
    throw ContractError("dominates: length mismatch (" + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
  }
  bool strict = false;
  for (Eigen::Index m = 0; m < a.size(); ++m) {
    if (a(m) > b(m)) return false;
    if (a(m) < b(m)) strict = true;
  }
  return strict;
}

/// Indices of the non-dominated rows of `points`, in order of first occurrence.
/// Exact duplicates keep only their first occurrence.
template <typename Derived>
std::vector<std::size_t> pareto_filter(const Eigen::MatrixBase<Derived>& points) {
  const auto n = static_cast<std::size_t>(points.rows());
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i) {
    const auto pi = points.row(static_cast<Eigen::Index>(i));
    bool keep = true;
    for (std::size_t j = 0; j < n && keep; ++j) {
      if (j == i) continue;
      const auto pj = points.row(static_cast<Eigen::Index>(j));
      if (dominates(pj, pi)) keep = false;
      // an identical earlier row already represents this point
      else if (j < i && pj == pi) keep = false;
    }
    if (keep) kept.push_back(i);
  }
  return kept;
}

/// Observed (x, f(x)) pairs in evaluation order.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Eigen::Index dim, Eigen::Index num_objectives)
      : x_(0, dim), y_(0, num_objectives) {}
  Dataset(Matrix x, Matrix y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.rows() != y_.rows()) throw ContractError("Dataset: row count mismatch");
    if (!y_.allFinite()) throw ContractError("Dataset: non-finite objective value");
  }

  void append(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
    if (x_.rows() == 0 && x_.cols() == 0) x_.resize(0, x.size());
    if (y_.rows() == 0 && y_.cols() == 0) y_.resize(0, y.size());
    if (x.size() != x_.cols() || y.size() != y_.cols()) {
      throw ContractError("Dataset::append: dimension mismatch");
    }
    if (!y.allFinite()) throw ContractError("Dataset::append: non-finite objective value");
    const Eigen::Index n = x_.rows();
    x_.conservativeResize(n + 1, Eigen::NoChange);
    y_.conservativeResize(n + 1, Eigen::NoChange);
    x_.row(n) = x.transpose();
    y_.row(n) = y.transpose();
  }

  [[nodiscard]] std::size_t eval_count() const { return static_cast<std::size_t>(x_.rows()); }
  [[nodiscard]] bool empty() const { return x_.rows() == 0; }
  [[nodiscard]] Eigen::Index dim() const { return x_.cols(); }
  [[nodiscard]] Eigen::Index num_objectives() const { return y_.cols(); }
  [[nodiscard]] const Matrix& x() const { return x_; }
  [[nodiscard]] const Matrix& y() const { return y_; }

 private:
  Matrix x_;
  Matrix y_;
};

/// Mutually non-dominated subset of a dataset with index correspondence
/// between `front` and `set` rows.
struct ParetoArchive {
  Matrix front;
  Matrix set;
  std::vector<std::size_t> source_rows;

  static ParetoArchive from(const Dataset& data) {
    ParetoArchive archive;
    archive.source_rows = pareto_filter(data.y());
    const auto k = static_cast<Eigen::Index>(archive.source_rows.size());
    archive.front.resize(k, data.num_objectives());
    archive.set.resize(k, data.dim());
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto r = static_cast<Eigen::Index>(archive.source_rows[static_cast<std::size_t>(i)]);
      archive.front.row(i) = data.y().row(r);
      archive.set.row(i) = data.x().row(r);
    }
    return archive;
  }
};

/// Axis-aligned design box [lo, hi].
struct Box {
  Vector lo;
  Vector hi;

  static Box unit(Eigen::Index dim) { return {Vector::Zero(dim), Vector::Ones(dim)}; }
  [[nodiscard]] Eigen::Index dim() const { return lo.size(); }
  [[nodiscard]] bool contains(const Eigen::Ref<const Vector>& x, double tol = 0.0) const {
    return x.size() == lo.size() && (x.array() >= lo.array() - tol).all() && (x.array() <= hi.array() + tol).all();
  }
  [[nodiscard]] Vector clip(const Eigen::Ref<const Vector>& x) const { return x.cwiseMax(lo).cwiseMin(hi); }
  /// Maps a unit-box point into this box.
  [[nodiscard]] Vector from_unit(const Eigen::Ref<const Vector>& u) const {
    return lo + (hi - lo).cwiseProduct(u);
  }
  [[nodiscard]] Vector to_unit(const Eigen::Ref<const Vector>& x) const {
    return (x - lo).cwiseQuotient(hi - lo);
  }
};

struct IdealNadir {
  ObjectiveVector ideal;
  ObjectiveVector nadir;
};

/// Componentwise best (min) and worst (max) observed objective values.
inline IdealNadir ideal_nadir(const Dataset& data) {
  if (data.empty()) throw InsufficientData("ideal_nadir: empty dataset");
  return {data.y().colwise().minCoeff().transpose(), data.y().colwise().maxCoeff().transpose()};
}

struct OffsetResult {
  Dataset data;
  ObjectiveVector offset;
};

/// Shift every objective so that all observed values are non-negative.
/// Raw values are recovered as shifted - offset.
inline OffsetResult offset_nonnegative(const Dataset& data) {
  if (data.empty()) throw InsufficientData("offset_nonnegative: empty dataset");
  const Vector offset = (-data.y().colwise().minCoeff().transpose()).cwiseMax(0.0);
  Matrix shifted = data.y().rowwise() + offset.transpose();
  return {Dataset(data.x(), std::move(shifted)), offset};
}

}  // namespace mobo
