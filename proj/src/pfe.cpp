#include "mobo/pfe.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

#include "mobo/random.hpp"

namespace mobo {

namespace {

// Projector onto the orthogonal complement of the row space of `rows`.
Matrix complement_projector(const Matrix& rows, Eigen::Index dim) {
  Matrix p = Matrix::Identity(dim, dim);
  if (rows.rows() == 0) return p;
  Eigen::JacobiSVD<Matrix> svd(rows, Eigen::ComputeFullV);
  const double tol = 1e-12 * std::max(1.0, svd.singularValues().maxCoeff());
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > tol) {
      const Vector v = svd.matrixV().col(i);
      p -= v * v.transpose();
    }
  }
  return p;
}

}  // namespace

KktMultipliers kkt_multipliers(const Matrix& jac_mu, const Matrix& active_jac) {
  const Eigen::Index m_obj = jac_mu.rows();
  const Eigen::Index d = jac_mu.cols();
  if (m_obj < 1) throw ContractError("kkt_multipliers: empty Jacobian");
  if (m_obj > 16) throw ContractError("kkt_multipliers: too many objectives for support enumeration");
  const Matrix proj = complement_projector(active_jac, d);
  const Matrix q = jac_mu * proj * jac_mu.transpose();

  // exact simplex QP by enumerating supports
  Vector best_alpha = Vector::Constant(m_obj, 1.0 / static_cast<double>(m_obj));
  double best_value = best_alpha.dot(q * best_alpha);
  const unsigned subsets = 1u << static_cast<unsigned>(m_obj);
  for (unsigned mask = 1; mask < subsets; ++mask) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < m_obj; ++i) {
      if (mask & (1u << static_cast<unsigned>(i))) support.push_back(i);
    }
    const auto k = static_cast<Eigen::Index>(support.size());
    Matrix kkt = Matrix::Zero(k + 1, k + 1);
    Vector rhs = Vector::Zero(k + 1);
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b) kkt(a, b) = 2.0 * q(support[static_cast<std::size_t>(a)], support[static_cast<std::size_t>(b)]);
      kkt(a, k) = 1.0;
      kkt(k, a) = 1.0;
    }
    rhs(k) = 1.0;
    const Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    if ((kkt * sol - rhs).norm() > 1e-8 * (1.0 + kkt.norm())) continue;
    Vector alpha = Vector::Zero(m_obj);
    for (Eigen::Index a = 0; a < k; ++a) alpha(support[static_cast<std::size_t>(a)]) = sol(a);
    if (alpha.minCoeff() < -1e-12) continue;
    alpha = alpha.cwiseMax(0.0);
    alpha /= alpha.sum();
    const double value = alpha.dot(q * alpha);
    if (value < best_value - 1e-15 * (1.0 + std::abs(best_value))) {
      best_value = value;
      best_alpha = alpha;
    }
  }

  KktMultipliers out;
  out.alpha = best_alpha;
  const Vector combo = jac_mu.transpose() * best_alpha;
  if (active_jac.rows() > 0) {
    out.beta = -active_jac.transpose().completeOrthogonalDecomposition().solve(combo);
    out.residual = (combo + active_jac.transpose() * out.beta).norm();
  } else {
    out.beta = Vector(0);
    out.residual = combo.norm();
  }
  return out;
}

Matrix active_box_jacobian(const Eigen::Ref<const Vector>& x, const Box& box) {
  std::vector<Vector> rows;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (x(k) - box.lo(k) <= kActiveBoundTolerance) {
      rows.push_back(Vector::Unit(x.size(), k));
    } else if (box.hi(k) - x(k) <= kActiveBoundTolerance) {
      rows.push_back(-Vector::Unit(x.size(), k));
    }
  }
  Matrix jac(static_cast<Eigen::Index>(rows.size()), x.size());
  for (std::size_t i = 0; i < rows.size(); ++i) jac.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return jac;
}

ExplorationSpace exploration_directions(const Surrogate& models, const Eigen::Ref<const Vector>& x, const Box& box,
                                        int beta_index) {
  const Eigen::Index d = x.size();
  const Eigen::Index m_obj = models.num_objectives();
  ExplorationSpace space;
  space.center = x;
  space.beta_index = beta_index;
  space.directions.resize(0, d);

  const PosteriorEval ev = models.evaluate(x, 2);
  const Matrix jac_g = active_box_jacobian(x, box);
  const Eigen::Index k_act = jac_g.rows();
  const KktMultipliers kkt = kkt_multipliers(ev.jac_mu, jac_g);

  Matrix h = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < m_obj; ++i) h += kkt.alpha(i) * ev.hess_mu[static_cast<std::size_t>(i)];
  h = 0.5 * (h + h.transpose());

  // unknowns (v, a, b): H v + J_F' a + J_G' b = 0, J_G v = 0, sum(a) = 0
  const Eigen::Index rows = d + k_act + 1;
  const Eigen::Index cols = d + m_obj + k_act;
  Matrix sys = Matrix::Zero(rows, cols);
  sys.block(0, 0, d, d) = h;
  sys.block(0, d, d, m_obj) = ev.jac_mu.transpose();
  if (k_act > 0) {
    sys.block(0, d + m_obj, d, k_act) = jac_g.transpose();
    sys.block(d, 0, k_act, d) = jac_g;
  }
  sys.block(d + k_act, d, 1, m_obj).setOnes();

  // column scaling keeps the null-space tolerance meaningful
  const double scale = std::max({1.0, h.cwiseAbs().maxCoeff(), ev.jac_mu.cwiseAbs().maxCoeff()});
  Eigen::JacobiSVD<Matrix> svd(sys / scale, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double tol = 1e-9 * std::max(1.0, sv.size() ? sv.maxCoeff() : 0.0);
  std::vector<Vector> null_v;
  for (Eigen::Index c = 0; c < cols; ++c) {
    const double s = c < sv.size() ? sv(c) : 0.0;
    if (s <= tol) null_v.push_back(svd.matrixV().col(c).head(d));
  }
  if (null_v.empty()) return space;

  Matrix block(d, static_cast<Eigen::Index>(null_v.size()));
  for (std::size_t i = 0; i < null_v.size(); ++i) block.col(static_cast<Eigen::Index>(i)) = null_v[i];
  Eigen::JacobiSVD<Matrix> basis(block, Eigen::ComputeThinU);
  const Eigen::Index cap = std::min<Eigen::Index>(m_obj - 1, d);
  std::vector<Vector> dirs;
  for (Eigen::Index i = 0; i < basis.singularValues().size() && static_cast<Eigen::Index>(dirs.size()) < cap; ++i) {
    if (basis.singularValues()(i) > 1e-6) dirs.push_back(basis.matrixU().col(i));
  }
  space.directions.resize(static_cast<Eigen::Index>(dirs.size()), d);
  for (std::size_t i = 0; i < dirs.size(); ++i) space.directions.row(static_cast<Eigen::Index>(i)) = dirs[i].transpose();
  return space;
}

Matrix sample_pfe(const ExplorationSpace& space, int n_e, double scale, const Box& box, std::uint64_t seed) {
  if (n_e < 1) throw ContractError("sample_pfe: n_e must be positive");
  const Eigen::Index d = space.center.size();
  const Eigen::Index k = space.directions.rows();
  if (k == 0) {
    Matrix out(1, d);
    out.row(0) = space.center.transpose();
    return out;
  }
  Matrix out(n_e, d);
  out.row(0) = space.center.transpose();
  Rng rng(derive_seed(seed, {0x9fe, static_cast<std::uint64_t>(space.beta_index)}));
  for (int i = 1; i < n_e; ++i) {
    Vector u(k);
    for (Eigen::Index j = 0; j < k; ++j) u(j) = rng.uniform(-scale, scale);
    out.row(i) = box.clip(space.center + space.directions.transpose() * u).transpose();
  }
  return out;
}

}  // namespace mobo
