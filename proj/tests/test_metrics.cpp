#include <doctest.h>

#include <cmath>

#include "mobo/metrics.hpp"
#include "mobo/random.hpp"

using mobo::Matrix;
using mobo::Vector;

namespace {
Matrix pt(double a, double b) { return (Matrix(1, 2) << a, b).finished(); }
}  // namespace

TEST_CASE("log_hv_diff") {
  const Vector r = Vector::Ones(2);
  CHECK(mobo::log_hv_diff(pt(0, 0), r, 1.0) == doctest::Approx(-12.0));
  CHECK(mobo::log_hv_diff(Matrix(0, 2), r, 0.5) == doctest::Approx(std::log10(0.5)));
  const double hv_max = 1.21 - M_PI / 4.0;
  CHECK(std::log10(hv_max - 0.4217) == doctest::Approx(-2.536).epsilon(1e-3));
}

TEST_CASE("IGD and IGD+ examples") {
  using mobo::IgdVariant;
  CHECK(mobo::igd_family(pt(0, 0), pt(1, 1), IgdVariant::kIgd) == doctest::Approx(std::sqrt(2.0)));
  CHECK(mobo::igd_family(pt(0, 0), pt(1, 1), IgdVariant::kIgdPlus) == 0.0);
  CHECK(mobo::igd_family(pt(2, 2), pt(1, 1), IgdVariant::kIgdPlus) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(mobo::igd_family(Matrix(0, 2), pt(1, 1), IgdVariant::kIgd), mobo::ContractError);
}

TEST_CASE("additive epsilon examples") {
  CHECK(mobo::eps_indicator(pt(1, 1), pt(0, 0)) == doctest::Approx(1.0));
  Matrix f(2, 2);
  f << 0, 2, 2, 0;
  CHECK(mobo::eps_indicator(f, pt(0, 0)) == doctest::Approx(2.0));
}

TEST_CASE("indicator properties on random sets") {
  for (std::uint64_t t = 0; t < 50; ++t) {
    mobo::Rng rng(mobo::derive_seed(21, {t}));
    const int n = 1 + static_cast<int>(rng.next() % 10);
    const int k = 1 + static_cast<int>(rng.next() % 10);
    Matrix a(n, 3), z(k, 3);
    for (int i = 0; i < n; ++i) a.row(i) = rng.uniform_vector(3).transpose();
    for (int i = 0; i < k; ++i) z.row(i) = rng.uniform_vector(3).transpose();
    const double igd = mobo::igd_family(a, z, mobo::IgdVariant::kIgd);
    const double igdp = mobo::igd_family(a, z, mobo::IgdVariant::kIgdPlus);
    CHECK(igd >= 0.0);
    CHECK(igdp >= 0.0);
    CHECK(igdp <= igd + 1e-15);
    CHECK(mobo::igd_family(z, z, mobo::IgdVariant::kIgd) == 0.0);
    CHECK(mobo::igd_family(z, z, mobo::IgdVariant::kIgdPlus) == 0.0);
    CHECK(mobo::eps_indicator(z, z) == 0.0);
  }
}
