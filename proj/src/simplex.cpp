#include "mobo/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "mobo/random.hpp"

namespace mobo {

namespace {

constexpr int kIterations = 1000;
constexpr double kStep = 1e-2;

Matrix energy_gradient(const WeightSet& w, double s) {
  Matrix grad = Matrix::Zero(w.rows(), w.cols());
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < w.rows(); ++j) {
      const Vector diff = (w.row(i) - w.row(j)).transpose();
      const double d2 = std::max(diff.squaredNorm(), 1e-300);
      const Vector g = (-s * std::pow(d2, -0.5 * s - 1.0)) * diff;
      grad.row(i) += g.transpose();
      grad.row(j) -= g.transpose();
    }
  }
  return grad;
}

WeightSet initial_weights(int m_obj, int n_beta, std::uint64_t seed) {
  WeightSet w(n_beta, m_obj);
  Halton halton(std::max(1, m_obj - 1), seed);
  for (int i = 0; i < n_beta; ++i) {
    const Vector u = halton.next();
    // sorted uniforms -> spacings are uniform on the simplex
    std::vector<double> cuts(u.data(), u.data() + u.size());
    cuts.resize(static_cast<std::size_t>(m_obj - 1));
    std::sort(cuts.begin(), cuts.end());
    double prev = 0.0;
    for (int m = 0; m < m_obj - 1; ++m) {
      w(i, m) = cuts[static_cast<std::size_t>(m)] - prev;
      prev = cuts[static_cast<std::size_t>(m)];
    }
    w(i, m_obj - 1) = 1.0 - prev;
  }
  return w;
}

}  // namespace

Vector project_to_simplex(const Eigen::Ref<const Vector>& v) {
  const Eigen::Index n = v.size();
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumsum += sorted[static_cast<std::size_t>(k)];
    const double t = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (sorted[static_cast<std::size_t>(k)] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

double riesz_energy(const WeightSet& weights, double s) {
  double e = 0.0;
  for (Eigen::Index i = 0; i < weights.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < weights.rows(); ++j) {
      e += std::pow(std::max((weights.row(i) - weights.row(j)).norm(), 1e-300), -s);
    }
  }
  return e;
}

WeightSet riesz_weights(int num_objectives, int n_beta, std::uint64_t seed) {
  if (num_objectives < 1) throw ContractError("riesz_weights: need at least one objective");
  if (n_beta < 1) throw ContractError("riesz_weights: need at least one weight vector");
  if (num_objectives == 1) return WeightSet::Ones(n_beta, 1);

  const double s = num_objectives + 1.0;
  WeightSet w = initial_weights(num_objectives, n_beta, seed);
  if (n_beta > 1) {
    double energy = riesz_energy(w, s);
    for (int it = 0; it < kIterations; ++it) {
      const Matrix grad = energy_gradient(w, s);
      const double gmax = grad.rowwise().norm().maxCoeff();
      if (!(gmax > 0.0) || !std::isfinite(gmax)) break;
      const Matrix dir = -grad / gmax;
      bool accepted = false;
      for (double step = kStep; step > 1e-10; step *= 0.5) {
        WeightSet trial(w.rows(), w.cols());
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
          trial.row(i) = project_to_simplex((w.row(i) + step * dir.row(i)).transpose()).transpose();
        }
        const double e = riesz_energy(trial, s);
        if (e < energy) {
          w = std::move(trial);
          energy = e;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
  }
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    w.row(i) = w.row(i).cwiseMax(kWeightFloor);
    w.row(i) /= w.row(i).sum();
  }
  return w;
}

}  // namespace mobo
