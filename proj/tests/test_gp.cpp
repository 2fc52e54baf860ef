#include <doctest.h>

#include <cmath>

#include "mobo/gp.hpp"
#include "mobo/random.hpp"

using mobo::GpModel;
using mobo::Matrix;
using mobo::Vector;

namespace {

struct Toy {
  Matrix x;
  Vector y;
};

Toy toy_data(std::uint64_t seed, int n, int d) {
  mobo::Rng rng(seed);
  Toy t{Matrix(n, d), Vector(n)};
  for (int i = 0; i < n; ++i) {
    t.x.row(i) = rng.uniform_vector(d).transpose();
    t.y(i) = std::sin(3.0 * t.x(i, 0)) + t.x.row(i).squaredNorm() + 0.1 * rng.normal();
  }
  return t;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace

TEST_CASE("Matern-5/2 kernel values") {
  CHECK(mobo::matern52(0.0, 2.0) == doctest::Approx(2.0));
  const double r = 0.7;
  const double s5 = std::sqrt(5.0);
  CHECK(mobo::matern52(r, 1.5) == doctest::Approx(1.5 * (1 + s5 * r + 5 * r * r / 3) * std::exp(-s5 * r)));
  CHECK(mobo::matern52(50.0, 1.0) < 1e-40);
}

TEST_CASE("fitted parameters respect bounds and beat the warm start") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Toy t = toy_data(100 + s, 15, 3);
    mobo::KernelParams warm{Vector::Constant(3, 0.5), 1.0, 0.01};
    const GpModel gp = GpModel::fit(t.x, t.y, s, warm);
    CHECK(mobo::KernelBounds::contains(gp.params()));
    const Vector ys = (t.y.array() - gp.y_mean()) / gp.y_scale();
    CHECK(gp.log_marginal_likelihood() >= GpModel::log_marginal_likelihood(t.x, ys, warm) - 1e-9);
    CHECK(gp.log_marginal_likelihood() == doctest::Approx(GpModel::log_marginal_likelihood(t.x, ys, gp.params())));
  }
}

TEST_CASE("constant targets give a constant posterior mean") {
  mobo::Rng rng(4);
  Matrix x(8, 2);
  for (int i = 0; i < 8; ++i) x.row(i) = rng.uniform_vector(2).transpose();
  const double c = 3.5;
  const GpModel gp = GpModel::fit(x, Vector::Constant(8, c), 1);
  for (int k = 0; k < 10; ++k) {
    const Vector p = rng.uniform_vector(2);
    CHECK(std::abs(gp.predict(p).mean - c) <= 1e-2 * std::abs(c) + 1e-2);
    CHECK(gp.predict_with_gradient(p).grad_mean.norm() < 1e-8);
  }
}

TEST_CASE("duplicate inputs are absorbed by jitter") {
  Matrix x(3, 1);
  x << 0.2, 0.2, 0.7;
  Vector y(3);
  y << 1.0, 1.0, 0.0;
  GpModel gp = GpModel::fit(x, y, 0);
  CHECK(std::isfinite(gp.predict(Vector::Constant(1, 0.4)).mean));
}

TEST_CASE("posterior reverts to the prior far from the data") {
  const Toy t = toy_data(7, 10, 2);
  const mobo::KernelParams p{Vector::Constant(2, 0.2), 1.3, 0.01};
  const GpModel gp = GpModel::with_params(t.x, t.y, p);
  const auto far = gp.predict(Vector::Constant(2, 50.0));
  CHECK(far.mean == doctest::Approx(gp.y_mean()).epsilon(1e-6));
  const double prior_std = p.signal_std * gp.y_scale();
  CHECK(std::abs(far.std - prior_std) <= 0.05 * prior_std);
}

TEST_CASE("symmetric 1-D data has zero mean gradient at the mirror point") {
  Matrix x(4, 1);
  x << 0.1, 0.3, 0.7, 0.9;
  Vector y(4);
  y << 1.0, -0.5, -0.5, 1.0;
  const GpModel gp = GpModel::with_params(x, y, {Vector::Constant(1, 0.3), 1.0, 0.01});
  CHECK(std::abs(gp.predict_with_gradient(Vector::Constant(1, 0.5)).grad_mean(0)) < 1e-6);
}

TEST_CASE("analytic derivatives match central differences") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Toy t = toy_data(200 + s, 20, 5);
    const GpModel gp = GpModel::fit(t.x, t.y, s);
    mobo::Rng rng(300 + s);
    const Vector x = rng.uniform_vector(5);
    const auto g = gp.predict_with_gradient(x);
    const Matrix h = gp.mean_hessian(x);
    const double eps = 1e-5;
    for (int k = 0; k < 5; ++k) {
      Vector xp = x, xm = x;
      xp(k) += eps;
      xm(k) -= eps;
      const auto p = gp.predict_with_gradient(xp);
      const auto m = gp.predict_with_gradient(xm);
      CHECK(rel_err(g.grad_mean(k), (p.mean - m.mean) / (2 * eps)) < 1e-4);
      CHECK(rel_err(g.grad_std(k), (p.std - m.std) / (2 * eps)) < 1e-4);
      const Vector fd_col = (p.grad_mean - m.grad_mean) / (2 * eps);
      for (int j = 0; j < 5; ++j) CHECK(rel_err(h(j, k), fd_col(j)) < 1e-3);
    }
    CHECK((h - h.transpose()).norm() < 1e-10);
  }
}

TEST_CASE("conditioning on the posterior mean pins the posterior") {
  const Toy t = toy_data(9, 12, 3);
  const GpModel gp = GpModel::fit(t.x, t.y, 3);
  const Vector x = Vector::Constant(3, 0.37);
  const auto before = gp.predict(x);
  const GpModel kb = gp.condition_on(x, before.mean);
  const auto after = kb.predict(x);
  const double noise = std::sqrt(gp.params().noise_variance()) * gp.y_scale();
  CHECK(after.std <= 0.05 * before.std + noise);
  CHECK(after.mean == doctest::Approx(before.mean).epsilon(1e-6));
  CHECK(kb.num_train() == gp.num_train() + 1);

  // rank-one extension agrees with a full refactorization
  Matrix x2(t.x.rows() + 1, 3);
  x2 << t.x, x.transpose();
  Vector y2(t.y.size() + 1);
  y2 << t.y, before.mean;
  const GpModel full = GpModel::assemble(x2, y2, gp.params(), gp.y_mean(), gp.y_scale());
  const Vector probe = Vector::Constant(3, 0.61);
  CHECK(kb.predict(probe).mean == doctest::Approx(full.predict(probe).mean).epsilon(1e-8));
  CHECK(kb.predict(probe).std == doctest::Approx(full.predict(probe).std).epsilon(1e-6));
}

TEST_CASE("surrogate evaluates all objectives and is reproducible") {
  const Toy t = toy_data(11, 10, 2);
  Matrix y(10, 2);
  y << t.y, -t.y;
  const auto a = mobo::Surrogate::fit(t.x, y, 5);
  const auto b = mobo::Surrogate::fit(t.x, y, 5);
  const Vector x = Vector::Constant(2, 0.3);
  CHECK(a.mean(x) == b.mean(x));
  const auto ev = a.evaluate(x, 2);
  CHECK(ev.mu.size() == 2);
  CHECK(ev.jac_mu.rows() == 2);
  CHECK(ev.jac_mu.cols() == 2);
  CHECK(ev.hess_mu.size() == 2);
  CHECK((ev.sigma.array() >= 0).all());
}
