#include "mobo/problems.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>

#include "mobo/hypervolume.hpp"
#include "mobo/random.hpp"

namespace mobo {

namespace {

constexpr double kPi = std::numbers::pi;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// DTLZ2 objectives for a given distance term g.
Vector dtlz2_values(const Eigen::Ref<const Vector>& x, int m_obj, double g) {
  Vector f(m_obj);
  for (int m = 0; m < m_obj; ++m) {
    double v = 1.0 + g;
    for (int j = 0; j < m_obj - 1 - m; ++j) v *= std::cos(0.5 * kPi * x(j));
    if (m > 0) v *= std::sin(0.5 * kPi * x(m_obj - 1 - m));
    f(m) = v;
  }
  return f;
}

Problem reserved(std::string name, int dim, int m_obj, Vector ref) {
  Problem p;
  p.name = std::move(name);
  p.dim = dim;
  p.num_objectives = m_obj;
  p.bounds = Box::unit(dim);
  p.ref_point = std::move(ref);
  return p;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

Problem make_dtlz2(int num_objectives, int dim) {
  Problem p;
  p.name = "dtlz2-m" + std::to_string(num_objectives);
  p.dim = dim;
  p.num_objectives = num_objectives;
  p.bounds = Box::unit(dim);
  p.ref_point = Vector::Constant(num_objectives, 1.1);
  p.objective = [num_objectives, dim](const Vector& x) {
    double g = 0.0;
    for (int i = num_objectives - 1; i < dim; ++i) g += (x(i) - 0.5) * (x(i) - 0.5);
    return dtlz2_values(x, num_objectives, g);
  };
  p.front_sampler = [num_objectives](int n) {
    Matrix out(n, num_objectives);
    if (num_objectives == 2) {
      for (int i = 0; i < n; ++i) {
        const double t = n > 1 ? static_cast<double>(i) / (n - 1) : 0.5;
        out.row(i) = dtlz2_values(Vector::Constant(1, t), 2, 0.0).transpose();
      }
      return out;
    }
    Halton halton(num_objectives - 1, 0, 0);
    for (int i = 0; i < n; ++i) {
      out.row(i) = dtlz2_values(halton.next(), num_objectives, 0.0).transpose();
    }
    return out;
  };
  p.max_hypervolume = [num_objectives]() {
    const double m = num_objectives;
    const double ball = std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m + 1.0) / std::pow(2.0, m);
    return std::pow(1.1, m) - ball;
  };
  return p;
}

Problem make_zdt1(int dim) {
  Problem p;
  p.name = "zdt1";
  p.dim = dim;
  p.num_objectives = 2;
  p.bounds = Box::unit(dim);
  p.ref_point = vec({11.0, 11.0});
  p.objective = [dim](const Vector& x) {
    const double f1 = x(0);
    const double g = 1.0 + 9.0 * x.tail(dim - 1).sum() / (dim - 1);
    return vec({f1, g * (1.0 - std::sqrt(f1 / g))});
  };
  p.front_sampler = [](int n) {
    Matrix out(n, 2);
    for (int i = 0; i < n; ++i) {
      const double f1 = n > 1 ? static_cast<double>(i) / (n - 1) : 0.5;
      out(i, 0) = f1;
      out(i, 1) = 1.0 - std::sqrt(f1);
    }
    return out;
  };
  // integral of (11 - (1 - sqrt t)) over [0,1] plus the 10 x 11 slab beyond f1 = 1
  p.max_hypervolume = []() { return 120.0 + 2.0 / 3.0; };
  return p;
}

Problem make_vlmop2(int dim) {
  Problem p;
  p.name = "vlmop2";
  p.dim = dim;
  p.num_objectives = 2;
  p.bounds = {Vector::Constant(dim, -2.0), Vector::Constant(dim, 2.0)};
  p.ref_point = vec({1.0, 1.0});
  const double c = 1.0 / std::sqrt(static_cast<double>(dim));
  p.objective = [c](const Vector& x) {
    const double a = (x.array() - c).square().sum();
    const double b = (x.array() + c).square().sum();
    return vec({1.0 - std::exp(-a), 1.0 - std::exp(-b)});
  };
  // Pareto set: x = t c 1 for t in [-1, 1]
  p.front_sampler = [](int n) {
    Matrix out(n, 2);
    for (int i = 0; i < n; ++i) {
      const double t = n > 1 ? 1.0 - 2.0 * static_cast<double>(i) / (n - 1) : 0.0;
      out(i, 0) = 1.0 - std::exp(-(t - 1.0) * (t - 1.0));
      out(i, 1) = 1.0 - std::exp(-(t + 1.0) * (t + 1.0));
    }
    return out;
  };
  p.max_hypervolume = [sampler = p.front_sampler, ref = p.ref_point]() {
    static const double cached = hypervolume(sampler(1000000), ref);
    return cached;
  };
  return p;
}

const Problem& get_problem(const std::string& name) {
  static const std::map<std::string, Problem> registry = [] {
    std::map<std::string, Problem> r;
    r.emplace("dtlz2-m2", make_dtlz2(2));
    r.emplace("dtlz2-m3", make_dtlz2(3));
    r.emplace("dtlz2-m4", make_dtlz2(4));
    r.emplace("zdt1", make_zdt1());
    r.emplace("vlmop2", make_vlmop2());
    r.emplace("speed-reducer", reserved("speed-reducer", 7, 3, vec({6735.9, 1761.17, 402.34})));
    r.emplace("car-side", reserved("car-side", 7, 4, vec({38.89, 4.44, 12.94, 8.87})));
    r.emplace("marine", reserved("marine", 6, 4, vec({-210.44, 18970.82, 24111.07, 11.36})));
    r.emplace("water-planning",
              reserved("water-planning", 3, 6, vec({84349, 1461, 3101484, 12442800, 67030, 1.59})));
    return r;
  }();
  const auto it = registry.find(lower(name));
  if (it == registry.end()) throw ContractError("unknown problem: " + name);
  return it->second;
}

std::vector<std::string> problem_names() {
  return {"dtlz2-m2", "dtlz2-m3", "dtlz2-m4", "zdt1", "vlmop2", "speed-reducer", "car-side", "marine",
          "water-planning"};
}

ObjectiveVector evaluate(const Problem& problem, const Eigen::Ref<const Vector>& x) {
  if (!problem.objective) throw ContractError(problem.name + ": no closed-form objective available");
  if (!problem.bounds.contains(x, 1e-12)) throw ContractError(problem.name + ": design point outside the box");
  return problem.objective(problem.bounds.clip(x));
}

Matrix true_front_samples(const Problem& problem, int n) {
  if (!problem.front_sampler) throw ContractError(problem.name + ": analytic front not available");
  if (n < 1) throw ContractError("true_front_samples: n must be positive");
  return problem.front_sampler(n);
}

double hv_max(const Problem& problem) {
  if (!problem.max_hypervolume) throw ContractError(problem.name + ": maximum hypervolume not available");
  return problem.max_hypervolume();
}

}  // namespace mobo
