#pragma once

// Approximated convex hull of individual minima (CHIM) and the orthogonal
// search directions (OSDs) through it.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

#include "mobo/core.hpp"

namespace mobo {

/// Boundary points and quasi-normal built from an (ideal, nadir) pair.
///
/// Column m of `boundary` is the ideal point with its m-th coordinate
/// replaced by the nadir's. `normal` is -P e normalized, pointing toward
/// the origin for non-negative objectives.
template <typename Scalar>
struct ChimFrameT {
  MatrixX<Scalar> boundary;
  VectorX<Scalar> normal;
  VectorX<Scalar> ideal;
  VectorX<Scalar> nadir;

  [[nodiscard]] Eigen::Index num_objectives() const { return boundary.rows(); }
};

using ChimFrame = ChimFrameT<double>;

/// A CHIM point U(beta) = P beta and the frame's normal define one OSD.
template <typename Scalar>
struct OsdLineT {
  VectorX<Scalar> beta;
  VectorX<Scalar> u_point;
  VectorX<Scalar> normal;
};

using OsdLine = OsdLineT<double>;

template <typename Scalar>
struct Projection {
  Scalar lambda;
  VectorX<Scalar> gamma;
  Scalar dist;
};

/// Builds the frame. A single flat objective (ideal_m == nadir_m) has its
/// nadir inflated by 1e-6 * max(1, |ideal_m|); a frame that is flat in every
/// objective is rejected.
template <typename DerivedA, typename DerivedB>
ChimFrameT<typename DerivedA::Scalar> build_frame(const Eigen::MatrixBase<DerivedA>& ideal,
                                                  const Eigen::MatrixBase<DerivedB>& nadir) {
  using Scalar = typename DerivedA::Scalar;
  const Eigen::Index m_obj = ideal.size();
  if (nadir.size() != m_obj || m_obj < 1) throw ContractError("build_frame: length mismatch");
  if ((ideal.array() > nadir.array()).any()) throw ContractError("build_frame: ideal exceeds nadir");
  if ((ideal.array() == nadir.array()).all()) {
    throw InsufficientData("build_frame: ideal equals nadir in every objective; explore further");
  }

  ChimFrameT<Scalar> frame;
  frame.ideal = ideal;
  frame.nadir = nadir;
  for (Eigen::Index m = 0; m < m_obj; ++m) {
    if (frame.nadir(m) == frame.ideal(m)) {
      frame.nadir(m) += Scalar(1e-6) * std::max(Scalar(1), std::abs(frame.ideal(m)));
    }
  }
  frame.boundary = frame.ideal.replicate(1, m_obj);
  frame.boundary.diagonal() = frame.nadir;
  VectorX<Scalar> n_hat = -(frame.boundary * VectorX<Scalar>::Ones(m_obj));
  const Scalar norm = n_hat.norm();
  if (!(norm > 0)) throw InsufficientData("build_frame: quasi-normal vanishes");
  frame.normal = n_hat / norm;
  return frame;
}

/// U(beta) = P beta.
template <typename Scalar, typename Derived>
VectorX<Scalar> chim_point(const ChimFrameT<Scalar>& frame, const Eigen::MatrixBase<Derived>& beta) {
  if (beta.size() != frame.num_objectives()) throw ContractError("chim_point: length mismatch");
  return frame.boundary * beta;
}

template <typename Scalar, typename Derived>
OsdLineT<Scalar> make_line(const ChimFrameT<Scalar>& frame, const Eigen::MatrixBase<Derived>& beta) {
  return {beta, chim_point(frame, beta), frame.normal};
}

/// Signed position lambda = (mu - U) . n of the projection gamma = U + lambda n
/// of mu onto the line, and the distance ||mu - gamma||.
template <typename Scalar, typename Derived>
Projection<Scalar> lambda_gamma(const Eigen::MatrixBase<Derived>& mu, const OsdLineT<Scalar>& line) {
  const VectorX<Scalar> diff = mu - line.u_point;
  const Scalar lambda = diff.dot(line.normal);
  VectorX<Scalar> gamma = line.u_point + lambda * line.normal;
  const Scalar dist = (mu - gamma).norm();
  return {lambda, std::move(gamma), dist};
}

}  // namespace mobo
