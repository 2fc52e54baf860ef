#include <doctest.h>

#include <set>

#include "mobo/batch.hpp"
#include "mobo/hypervolume.hpp"
#include "mobo/random.hpp"

using mobo::Matrix;
using mobo::Vector;

namespace {

struct Fixture {
  mobo::Surrogate models;
  Matrix front;
  Vector ref = Vector::Constant(2, 1.5);
};

Fixture make_fixture() {
  mobo::Halton h(2, 4);
  Matrix x = h.take(20);
  Matrix y(20, 2);
  for (int i = 0; i < 20; ++i) {
    y(i, 0) = x(i, 0);
    y(i, 1) = 1.0 - std::sqrt(x(i, 0)) + x(i, 1);
  }
  Fixture f;
  f.models = mobo::Surrogate::fit(x, y, 0);
  const auto keep = mobo::pareto_filter(y);
  f.front.resize(static_cast<Eigen::Index>(keep.size()), 2);
  for (std::size_t i = 0; i < keep.size(); ++i) f.front.row(static_cast<Eigen::Index>(i)) = y.row(static_cast<Eigen::Index>(keep[i]));
  return f;
}

mobo::CandidatePool random_pool(std::uint64_t seed, int origins, int per_origin) {
  mobo::Rng rng(seed);
  mobo::CandidatePool pool;
  for (int o = 0; o < origins; ++o) {
    for (int k = 0; k < per_origin; ++k) pool.add(rng.uniform_vector(2), o);
  }
  return pool;
}

}  // namespace

TEST_CASE("pool deduplicates within tolerance") {
  mobo::CandidatePool pool;
  CHECK(pool.add(Vector::Constant(2, 0.5), 0));
  CHECK_FALSE(pool.add(Vector::Constant(2, 0.5 + 1e-13), 1));
  CHECK(pool.add(Vector::Constant(2, 0.5 + 1e-9), 1));
  CHECK(pool.size() == 2);
}

TEST_CASE("b = 1 picks the maximum HVI of the posterior mean") {
  const auto f = make_fixture();
  const auto pool = random_pool(1, 5, 4);
  const auto sel = mobo::select_batch(pool, f.models, f.front, f.ref, 1);
  REQUIRE(sel.picked.size() == 1);
  double best = -1.0;
  for (const auto& item : pool.items()) best = std::max(best, mobo::hypervolume_improvement(f.models.mean(item.x), f.front, f.ref));
  CHECK(sel.hvi[0] == doctest::Approx(best));
}

TEST_CASE("twenty origins, b = 4: four distinct origins") {
  const auto f = make_fixture();
  const auto pool = random_pool(2, 20, 3);
  const auto sel = mobo::select_batch(pool, f.models, f.front, f.ref, 4);
  const auto o = sel.origins(pool);
  CHECK(std::set<int>(o.begin(), o.end()).size() == 4);
  CHECK(mobo::balance_spread(o, sel.available_origins) <= 1);
}

TEST_CASE("single origin, b = 3: reintroduction supplies every pick") {
  const auto f = make_fixture();
  const auto pool = random_pool(3, 1, 5);
  const auto sel = mobo::select_batch(pool, f.models, f.front, f.ref, 3);
  CHECK(sel.picked.size() == 3);
  for (int o : sel.origins(pool)) CHECK(o == 0);
  CHECK(std::set<std::size_t>(sel.picked.begin(), sel.picked.end()).size() == 3);
}

TEST_CASE("batch is capped by the pool size") {
  const auto f = make_fixture();
  const auto pool = random_pool(4, 2, 1);
  CHECK(mobo::select_batch(pool, f.models, f.front, f.ref, 8).picked.size() == 2);
}

TEST_CASE("balance holds on random pools") {
  const auto f = make_fixture();
  for (std::uint64_t t = 0; t < 15; ++t) {
    mobo::Rng rng(t);
    mobo::CandidatePool pool;
    const int origins = 1 + static_cast<int>(rng.next() % 6);
    for (int o = 0; o < origins; ++o) {
      const int n = 1 + static_cast<int>(rng.next() % 4);
      for (int k = 0; k < n; ++k) pool.add(rng.uniform_vector(2), o);
    }
    const int b = 1 + static_cast<int>(rng.next() % 8);
    const auto sel = mobo::select_batch(pool, f.models, f.front, f.ref, b);
    CHECK(mobo::balance_spread(sel.origins(pool), sel.available_origins) <= 1);
  }
}

TEST_CASE("believer models are conditioned on every pick") {
  const auto f = make_fixture();
  const auto pool = random_pool(5, 6, 2);
  const auto sel = mobo::select_batch(pool, f.models, f.front, f.ref, 3);
  CHECK(sel.believer.model(0).num_train() == f.models.model(0).num_train() + 3);
  for (auto i : sel.picked) {
    const Vector x = pool.items()[i].x;
    CHECK(sel.believer.std(x).maxCoeff() <= f.models.std(x).maxCoeff() + 1e-12);
  }
}

TEST_CASE("balance_spread counts only available origins") {
  CHECK(mobo::balance_spread({0, 1, 0}, {{0, 1}, {0, 1}, {0, 1}}) == 1);
  CHECK(mobo::balance_spread({0, 0}, {{0, 1}, {0, 1}}) == 2);
  CHECK(mobo::balance_spread({0, 0, 0}, {{0}, {0}, {0}}) == 0);
}
