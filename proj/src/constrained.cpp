#include "mobo/constrained.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace mobo {

namespace {

constexpr double kBoxPenaltyFactor = 1e4;
constexpr int kQpSweeps = 400;

double min_constraint(const NlpPoint& p) {
  return p.constraints.size() ? p.constraints.minCoeff() : 0.0;
}

double violation(const NlpPoint& p) { return (-p.constraints.array()).cwiseMax(0.0).sum(); }

bool is_finite(const NlpPoint& p) {
  return std::isfinite(p.objective) && p.gradient.allFinite() && p.constraints.allFinite() && p.jacobian.allFinite();
}

}  // namespace

QpSolution solve_elastic_qp(const Matrix& b_mat, const Vector& g, const Matrix& a, const Vector& b, const Vector& lo,
                            const Vector& hi, double penalty) {
  const Eigen::Index d = g.size();
  const Eigen::Index k = a.rows();
  const Eigen::Index rows = k + 2 * d;

  // stacked rows: general constraints, then d >= lo, then -d >= -hi
  Matrix a_all(rows, d);
  Vector b_all(rows);
  Vector cap(rows);
  a_all.topRows(k) = a;
  b_all.head(k) = b;
  cap.head(k).setConstant(penalty);
  a_all.block(k, 0, d, d) = Matrix::Identity(d, d);
  b_all.segment(k, d) = lo;
  a_all.bottomRows(d) = -Matrix::Identity(d, d);
  b_all.tail(d) = -hi;
  cap.tail(2 * d).setConstant(penalty * kBoxPenaltyFactor);

  const Matrix b_inv = b_mat.llt().solve(Matrix::Identity(d, d));
  const Matrix binv_at = b_inv * a_all.transpose();  // D x rows
  Vector q_diag(rows);
  for (Eigen::Index i = 0; i < rows; ++i) q_diag(i) = a_all.row(i).dot(binv_at.col(i));

  Vector y = Vector::Zero(rows);
  Vector step = -b_inv * g;
  for (int sweep = 0; sweep < kQpSweeps; ++sweep) {
    double biggest = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (q_diag(i) <= 1e-14) continue;
      const double residual = b_all(i) - a_all.row(i).dot(step);
      const double updated = std::clamp(y(i) + residual / q_diag(i), 0.0, cap(i));
      const double delta = updated - y(i);
      if (delta != 0.0) {
        y(i) = updated;
        step.noalias() += delta * binv_at.col(i);
        biggest = std::max(biggest, std::abs(delta) * std::sqrt(q_diag(i)));
      }
    }
    if (biggest < 1e-12) break;
  }
  return {step, y.head(k)};
}

SqpResult minimize_sqp(const NlpFunction& fn, const Vector& x0, const Vector& lo, const Vector& hi,
                       const SqpOptions& options) {
  const Eigen::Index d = x0.size();
  SqpResult out;
  Vector x = x0.cwiseMax(lo).cwiseMin(hi);
  NlpPoint cur = fn(x);
  if (!is_finite(cur)) {
    out.x = x;
    return out;
  }

  bool have_feasible = false;
  Vector best_x;
  NlpPoint best;
  Vector least_x = x;
  NlpPoint least = cur;
  const auto record = [&](const Vector& xv, const NlpPoint& p) {
    if (min_constraint(p) >= -options.feasibility_tolerance) {
      if (!have_feasible || p.objective < best.objective) {
        have_feasible = true;
        best_x = xv;
        best = p;
      }
    }
    if (min_constraint(p) > min_constraint(least)) {
      least_x = xv;
      least = p;
    }
  };
  record(x, cur);

  Matrix hess = Matrix::Identity(d, d);
  double merit_weight = 1.0;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const QpSolution qp = solve_elastic_qp(hess, cur.gradient, cur.jacobian, -cur.constraints, lo - x, hi - x,
                                           options.elastic_penalty);
    const Vector& step = qp.step;
    const Vector lagr_grad = cur.gradient - cur.jacobian.transpose() * qp.multipliers;

    const double step_norm = step.cwiseAbs().maxCoeff();
    const bool feasible = min_constraint(cur) >= -options.feasibility_tolerance;
    if (feasible && (step_norm < options.step_tolerance ||
                     (lagr_grad.cwiseAbs().maxCoeff() < options.gradient_tolerance && step_norm < 1e-3))) {
      out.converged = true;
      break;
    }

    merit_weight = std::max(merit_weight, 1.5 * (qp.multipliers.size() ? qp.multipliers.maxCoeff() : 0.0) + 1e-3);
    const double merit = cur.objective + merit_weight * violation(cur);
    const double slope = std::min(cur.gradient.dot(step) - merit_weight * violation(cur), 0.0);

    bool accepted = false;
    Vector x_new;
    NlpPoint next;
    for (double t = 1.0; t >= 1e-6; t *= 0.5) {
      x_new = (x + t * step).cwiseMax(lo).cwiseMin(hi);
      next = fn(x_new);
      if (!is_finite(next)) continue;
      const double merit_new = next.objective + merit_weight * violation(next);
      if (merit_new <= merit + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // fall back to steepest descent scaling once before giving up
      if (!hess.isIdentity(1e-12)) {
        hess.setIdentity();
        continue;
      }
      break;
    }

    const Vector s = x_new - x;
    Vector yv = (next.gradient - next.jacobian.transpose() * qp.multipliers) - lagr_grad;
    const Vector bs = hess * s;
    const double sbs = s.dot(bs);
    if (sbs > 1e-16) {
      double sy = s.dot(yv);
      if (sy < 0.2 * sbs) {
        const double theta = 0.8 * sbs / (sbs - sy);
        yv = theta * yv + (1.0 - theta) * bs;
        sy = s.dot(yv);
      }
      hess += (yv * yv.transpose()) / sy - (bs * bs.transpose()) / sbs;
      hess = 0.5 * (hess + hess.transpose());
    }
    x = x_new;
    cur = std::move(next);
    record(x, cur);
  }

  out.iterations = it;
  out.finite = true;
  const NlpPoint* chosen = &cur;
  out.x = x;
  if (have_feasible) {
    const bool cur_feasible = min_constraint(cur) >= -options.feasibility_tolerance;
    if (!cur_feasible || best.objective < cur.objective) {
      chosen = &best;
      out.x = best_x;
    }
  } else {
    chosen = &least;
    out.x = least_x;
  }
  out.objective = chosen->objective;
  out.min_constraint = min_constraint(*chosen);
  return out;
}

}  // namespace mobo
