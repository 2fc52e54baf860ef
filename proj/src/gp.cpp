#include "mobo/gp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "mobo/random.hpp"

namespace mobo {

namespace {

constexpr double kSqrt5 = 2.23606797749979;
constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kJitterStart = 1e-10;
constexpr double kJitterMax = 1e-4;

// Cholesky of K + jitter I with escalation 1e-10 -> 1e-4 (x10). Returns the
// jitter actually used, or nullopt when every level fails.
std::optional<double> robust_cholesky(const Matrix& k, Matrix& chol) {
  Eigen::LLT<Matrix> llt(k);
  if (llt.info() == Eigen::Success) {
    chol = llt.matrixL();
    return 0.0;
  }
  for (double jitter = kJitterStart; jitter <= kJitterMax * 1.0000001; jitter *= 10.0) {
    Matrix kj = k;
    kj.diagonal().array() += jitter;
    llt.compute(kj);
    if (llt.info() == Eigen::Success) {
      chol = llt.matrixL();
      return jitter;
    }
  }
  return std::nullopt;
}

Vector inverse_squares(const Vector& lengthscales) { return lengthscales.array().square().inverse(); }

Vector to_log(const KernelParams& p) {
  const Eigen::Index d = p.lengthscales.size();
  Vector theta(d + 2);
  theta.head(d) = p.lengthscales.array().log();
  theta(d) = std::log(p.signal_std);
  theta(d + 1) = std::log(p.noise_variance());
  return theta;
}

KernelParams from_log(const Vector& theta) {
  const Eigen::Index d = theta.size() - 2;
  KernelParams p;
  p.lengthscales = theta.head(d).array().exp();
  p.signal_std = std::exp(theta(d));
  p.noise_std = std::sqrt(std::exp(theta(d + 1)));
  return p;
}

struct LogBox {
  Vector lo;
  Vector hi;

  explicit LogBox(Eigen::Index d) : lo(d + 2), hi(d + 2) {
    lo.head(d).setConstant(std::log(KernelBounds::kScaleLo));
    hi.head(d).setConstant(std::log(KernelBounds::kScaleHi));
    lo(d) = std::log(KernelBounds::kScaleLo);
    hi(d) = std::log(KernelBounds::kScaleHi);
    lo(d + 1) = std::log(KernelBounds::kNoiseVarLo);
    hi(d + 1) = std::log(KernelBounds::kNoiseVarHi);
  }

  [[nodiscard]] Vector project(const Vector& theta) const { return theta.cwiseMax(lo).cwiseMin(hi); }
};

// Log marginal likelihood of standardized targets and its gradient in
// log-parameter space.
class LmlObjective {
 public:
  LmlObjective(const Matrix& x, const Vector& y) : y_(y), n_(x.rows()), d_(x.cols()) {
    sq_.reserve(static_cast<std::size_t>(d_));
    for (Eigen::Index k = 0; k < d_; ++k) {
      Matrix s(n_, n_);
      for (Eigen::Index i = 0; i < n_; ++i) {
        for (Eigen::Index j = 0; j < n_; ++j) {
          const double diff = x(i, k) - x(j, k);
          s(i, j) = diff * diff;
        }
      }
      sq_.push_back(std::move(s));
    }
  }

  struct Result {
    double value = -std::numeric_limits<double>::infinity();
    Vector grad;
  };

  Result operator()(const Vector& theta, bool with_grad) const {
    Result res;
    const Vector inv_ls2 = (-2.0 * theta.head(d_)).array().exp();
    const double signal_var = std::exp(2.0 * theta(d_));
    const double noise_var = std::exp(theta(d_ + 1));

    Matrix r2 = Matrix::Zero(n_, n_);
    for (Eigen::Index k = 0; k < d_; ++k) r2.noalias() += inv_ls2(k) * sq_[static_cast<std::size_t>(k)];
    const Matrix r = r2.array().sqrt().matrix();
    const Eigen::ArrayXXd e = (-kSqrt5 * r.array()).exp();
    Matrix kf = (signal_var * (1.0 + kSqrt5 * r.array() + (5.0 / 3.0) * r2.array()) * e).matrix();
    Matrix kmat = kf;
    kmat.diagonal().array() += noise_var;

    Matrix chol;
    if (!robust_cholesky(kmat, chol)) return res;
    const auto lower = chol.triangularView<Eigen::Lower>();
    Vector alpha = lower.solve(y_);
    chol.transpose().triangularView<Eigen::Upper>().solveInPlace(alpha);
    res.value = -0.5 * y_.dot(alpha) - chol.diagonal().array().log().sum() -
                0.5 * static_cast<double>(n_) * kLog2Pi;
    if (!std::isfinite(res.value)) {
      res.value = -std::numeric_limits<double>::infinity();
      return res;
    }
    if (!with_grad) return res;

    Matrix kinv = Matrix::Identity(n_, n_);
    lower.solveInPlace(kinv);
    chol.transpose().triangularView<Eigen::Upper>().solveInPlace(kinv);
    const Matrix w = alpha * alpha.transpose() - kinv;

    res.grad.resize(d_ + 2);
    // dK/dlog(l_k) = s^2 (5/3) (1 + sqrt5 r) e^{-sqrt5 r} (x_k - x'_k)^2 / l_k^2
    const Matrix g = (w.array() * (signal_var * (5.0 / 3.0) * (1.0 + kSqrt5 * r.array()) * e)).matrix();
    for (Eigen::Index k = 0; k < d_; ++k) {
      res.grad(k) = 0.5 * inv_ls2(k) * (g.array() * sq_[static_cast<std::size_t>(k)].array()).sum();
    }
    res.grad(d_) = (w.array() * kf.array()).sum();  // 0.5 * tr(W * 2 Kf)
    res.grad(d_ + 1) = 0.5 * noise_var * w.trace();
    return res;
  }

 private:
  Vector y_;
  Eigen::Index n_;
  Eigen::Index d_;
  std::vector<Matrix> sq_;
};

struct AscentState {
  Vector theta;
  double value;
  Vector grad;
  double step = 0.0;
  bool converged = false;
};

// Projected gradient ascent with Barzilai-Borwein steps and Armijo backtracking.
void ascend(const LmlObjective& objective, const LogBox& box, AscentState& st, int iters) {
  for (int it = 0; it < iters && !st.converged; ++it) {
    if (!std::isfinite(st.value)) {
      st.converged = true;
      return;
    }
    if (st.step <= 0.0) {
      const double gmax = st.grad.cwiseAbs().maxCoeff();
      st.step = gmax > 0.0 ? 0.3 / gmax : 1.0;
    }
    Vector trial;
    LmlObjective::Result res;
    bool accepted = false;
    double t = st.step;
    for (int bt = 0; bt < 30; ++bt) {
      trial = box.project(st.theta + t * st.grad);
      const Vector s = trial - st.theta;
      if (s.cwiseAbs().maxCoeff() < 1e-9) break;
      res = objective(trial, true);
      if (res.value >= st.value + 1e-4 * st.grad.dot(s)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      st.converged = true;
      return;
    }
    const Vector s = trial - st.theta;
    const Vector yv = res.grad - st.grad;
    const double sy = s.dot(yv);
    const double gain = res.value - st.value;
    st.step = sy < 0.0 ? std::clamp(s.squaredNorm() / -sy, 1e-6, 1e3) : std::min(2.0 * t, 1e3);
    st.theta = trial;
    st.value = res.value;
    st.grad = res.grad;
    if (gain < 1e-8 * (1.0 + std::abs(st.value))) st.converged = true;
  }
}

}  // namespace

bool KernelBounds::contains(const KernelParams& p) {
  constexpr double slack = 1e-9;
  const auto in = [](double v, double lo, double hi) {
    return v >= lo * (1.0 - slack) && v <= hi * (1.0 + slack);
  };
  for (Eigen::Index k = 0; k < p.lengthscales.size(); ++k) {
    if (!in(p.lengthscales(k), kScaleLo, kScaleHi)) return false;
  }
  return in(p.signal_std, kScaleLo, kScaleHi) && in(p.noise_variance(), kNoiseVarLo, kNoiseVarHi);
}

double matern52(double r, double signal_var) {
  return signal_var * (1.0 + kSqrt5 * r + (5.0 / 3.0) * r * r) * std::exp(-kSqrt5 * r);
}

GpModel GpModel::assemble(const Matrix& x, const Vector& y, const KernelParams& params, double y_mean,
                          double y_scale) {
  if (x.rows() != y.size()) throw ContractError("GpModel: x/y size mismatch");
  if (x.rows() < 1) throw InsufficientData("GpModel: no training data");
  if (params.lengthscales.size() != x.cols()) throw ContractError("GpModel: lengthscale count");
  GpModel model;
  model.x_ = x;
  model.y_mean_ = y_mean;
  model.y_scale_ = y_scale;
  model.y_ = (y.array() - y_mean) / y_scale;
  model.params_ = params;
  model.factorize();
  return model;
}

GpModel GpModel::with_params(const Matrix& x, const Vector& y, const KernelParams& params) {
  if (y.size() < 1) throw InsufficientData("GpModel: no training data");
  const double mean = y.mean();
  const double sd = std::sqrt((y.array() - mean).square().mean());
  return assemble(x, y, params, mean, sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0);
}

void GpModel::factorize() {
  const Eigen::Index n = x_.rows();
  inv_ls2_ = inverse_squares(params_.lengthscales);
  const double signal_var = params_.signal_std * params_.signal_std;
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = signal_var + params_.noise_variance();
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r = std::sqrt(((x_.row(i) - x_.row(j)).array().square() * inv_ls2_.transpose().array()).sum());
      k(i, j) = k(j, i) = matern52(r, signal_var);
    }
  }
  const auto jitter = robust_cholesky(k, chol_);
  if (!jitter) throw std::runtime_error("GpModel: kernel matrix is singular after maximum jitter");
  jitter_ = *jitter;
  const auto lower = chol_.triangularView<Eigen::Lower>();
  alpha_ = lower.solve(y_);
  chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(alpha_);
  lml_ = -0.5 * y_.dot(alpha_) - chol_.diagonal().array().log().sum() - 0.5 * static_cast<double>(n) * kLog2Pi;
}

double GpModel::log_marginal_likelihood(const Matrix& x, const Vector& y, const KernelParams& params) {
  return LmlObjective(x, y)(to_log(params), false).value;
}

GpModel GpModel::fit(const Matrix& x, const Vector& y, std::uint64_t seed, const std::optional<KernelParams>& warm,
                     const FitOptions& options) {
  if (x.rows() != y.size()) throw ContractError("GpModel::fit: x/y size mismatch");
  if (x.rows() < 2) throw InsufficientData("GpModel::fit: need at least two observations");
  const Eigen::Index d = x.cols();
  const double mean = y.mean();
  const double sd_raw = std::sqrt((y.array() - mean).square().mean());
  const double sd = sd_raw > 1e-12 * std::max(1.0, std::abs(mean)) ? sd_raw : 1.0;
  const Vector ys = (y.array() - mean) / sd;

  const LmlObjective objective(x, ys);
  const LogBox box(d);

  std::vector<Vector> starts;
  if (warm && warm->lengthscales.size() == d) starts.push_back(box.project(to_log(*warm)));
  {
    KernelParams def;
    def.lengthscales = Vector::Constant(d, 0.5);
    def.signal_std = 1.0;
    def.noise_std = 1e-2;
    if (starts.empty()) starts.push_back(to_log(def));
  }
  Rng rng(derive_seed(seed, {0x6770}));
  while (static_cast<int>(starts.size()) < std::max(1, options.num_starts)) {
    Vector theta(d + 2);
    for (Eigen::Index k = 0; k < d; ++k) theta(k) = rng.uniform(std::log(0.05), std::log(3.0));
    theta(d) = rng.uniform(std::log(0.5), std::log(2.0));
    theta(d + 1) = rng.uniform(box.lo(d + 1), box.hi(d + 1));
    starts.push_back(box.project(theta));
  }

  std::vector<AscentState> states;
  for (const auto& theta : starts) {
    auto res = objective(theta, true);
    AscentState st{theta, res.value, res.grad};
    if (std::isfinite(st.value)) ascend(objective, box, st, options.explore_iters);
    states.push_back(std::move(st));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < states.size(); ++i) {
    if (states[i].value > states[best].value) best = i;
  }
  if (!std::isfinite(states[best].value)) {
    throw std::runtime_error("GpModel::fit: kernel matrix is singular after maximum jitter");
  }
  ascend(objective, box, states[best], options.refine_iters);

  return assemble(x, y, from_log(states[best].theta), mean, sd);
}

GpModel::Prediction GpModel::predict(const Eigen::Ref<const Vector>& x) const {
  const Eigen::Index n = x_.rows();
  const double signal_var = params_.signal_std * params_.signal_std;
  Vector k(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = std::sqrt(((x_.row(i).transpose() - x).array().square() * inv_ls2_.array()).sum());
    k(i) = matern52(r, signal_var);
  }
  const double mean = k.dot(alpha_);
  const Vector v = chol_.triangularView<Eigen::Lower>().solve(k);
  const double var = std::max(0.0, signal_var - v.squaredNorm());
  return {y_mean_ + y_scale_ * mean, y_scale_ * std::sqrt(var)};
}

GpModel::Gradient GpModel::predict_with_gradient(const Eigen::Ref<const Vector>& x) const {
  const Eigen::Index n = x_.rows();
  const Eigen::Index d = x_.cols();
  const double signal_var = params_.signal_std * params_.signal_std;
  Vector k(n);
  Matrix dk(n, d);  // row i: dk_i/dx
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector delta = x - x_.row(i).transpose();
    const Vector scaled = delta.cwiseProduct(inv_ls2_);
    const double r = std::sqrt(delta.dot(scaled));
    const double e = std::exp(-kSqrt5 * r);
    k(i) = signal_var * (1.0 + kSqrt5 * r + (5.0 / 3.0) * r * r) * e;
    dk.row(i) = (-signal_var * (5.0 / 3.0) * (1.0 + kSqrt5 * r) * e) * scaled.transpose();
  }
  Gradient g;
  g.mean = y_mean_ + y_scale_ * k.dot(alpha_);
  g.grad_mean = y_scale_ * (dk.transpose() * alpha_);

  const auto lower = chol_.triangularView<Eigen::Lower>();
  Vector v = lower.solve(k);
  const double var = signal_var - v.squaredNorm();
  if (var <= 1e-300) {
    // zero-variance clamp: use the zero subgradient
    g.std = 0.0;
    g.grad_std = Vector::Zero(d);
    return g;
  }
  chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(v);  // v <- K^{-1} k
  const double sd = std::sqrt(var);
  g.std = y_scale_ * sd;
  g.grad_std = y_scale_ * (-(dk.transpose() * v) / sd);
  return g;
}

Matrix GpModel::mean_hessian(const Eigen::Ref<const Vector>& x) const {
  const Eigen::Index n = x_.rows();
  const Eigen::Index d = x_.cols();
  const double signal_var = params_.signal_std * params_.signal_std;
  Matrix h = Matrix::Zero(d, d);
  double diag_weight = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector delta = x - x_.row(i).transpose();
    const Vector scaled = delta.cwiseProduct(inv_ls2_);
    const double r = std::sqrt(delta.dot(scaled));
    const double e = std::exp(-kSqrt5 * r);
    // d2k/dx dx^T = -s^2 (5/3)(1+sqrt5 r) e diag(1/l^2) + s^2 (25/3) e (delta/l^2)(delta/l^2)^T
    diag_weight += alpha_(i) * (-signal_var * (5.0 / 3.0) * (1.0 + kSqrt5 * r) * e);
    h.noalias() += (alpha_(i) * signal_var * (25.0 / 3.0) * e) * (scaled * scaled.transpose());
  }
  h.diagonal() += diag_weight * inv_ls2_;
  return y_scale_ * h;
}

GpModel GpModel::condition_on(const Eigen::Ref<const Vector>& x, double y) const {
  if (x.size() != x_.cols()) throw ContractError("condition_on: dimension mismatch");
  const Eigen::Index n = x_.rows();
  const double signal_var = params_.signal_std * params_.signal_std;

  GpModel out;
  out.params_ = params_;
  out.inv_ls2_ = inv_ls2_;
  out.y_mean_ = y_mean_;
  out.y_scale_ = y_scale_;
  out.jitter_ = jitter_;
  out.x_.resize(n + 1, x_.cols());
  out.x_.topRows(n) = x_;
  out.x_.row(n) = x.transpose();
  out.y_.resize(n + 1);
  out.y_.head(n) = y_;
  out.y_(n) = (y - y_mean_) / y_scale_;

  Vector k(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = std::sqrt(((x_.row(i).transpose() - x).array().square() * inv_ls2_.array()).sum());
    k(i) = matern52(r, signal_var);
  }
  const Vector l = chol_.triangularView<Eigen::Lower>().solve(k);
  const double c = signal_var + params_.noise_variance() + jitter_;
  const double d2 = std::max(c - l.squaredNorm(), 1e-12 * signal_var);

  out.chol_ = Matrix::Zero(n + 1, n + 1);
  out.chol_.topLeftCorner(n, n) = chol_;
  out.chol_.block(n, 0, 1, n) = l.transpose();
  out.chol_(n, n) = std::sqrt(d2);

  const auto lower = out.chol_.triangularView<Eigen::Lower>();
  out.alpha_ = lower.solve(out.y_);
  out.chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(out.alpha_);
  out.lml_ = -0.5 * out.y_.dot(out.alpha_) - out.chol_.diagonal().array().log().sum() -
             0.5 * static_cast<double>(n + 1) * kLog2Pi;
  return out;
}

Surrogate Surrogate::fit(const Matrix& x, const Matrix& y, std::uint64_t seed, const std::vector<KernelParams>& warm,
                         const FitOptions& options) {
  std::vector<GpModel> models;
  models.reserve(static_cast<std::size_t>(y.cols()));
  for (Eigen::Index m = 0; m < y.cols(); ++m) {
    std::optional<KernelParams> start;
    if (static_cast<std::size_t>(m) < warm.size()) start = warm[static_cast<std::size_t>(m)];
    models.push_back(GpModel::fit(x, y.col(m), derive_seed(seed, {static_cast<std::uint64_t>(m)}), start, options));
  }
  return Surrogate(std::move(models));
}

Vector Surrogate::mean(const Eigen::Ref<const Vector>& x) const {
  Vector mu(num_objectives());
  for (Eigen::Index m = 0; m < mu.size(); ++m) mu(m) = model(m).predict(x).mean;
  return mu;
}

Vector Surrogate::std(const Eigen::Ref<const Vector>& x) const {
  Vector sd(num_objectives());
  for (Eigen::Index m = 0; m < sd.size(); ++m) sd(m) = model(m).predict(x).std;
  return sd;
}

PosteriorEval Surrogate::evaluate(const Eigen::Ref<const Vector>& x, int order) const {
  const Eigen::Index m_obj = num_objectives();
  PosteriorEval ev;
  ev.mu.resize(m_obj);
  ev.sigma.resize(m_obj);
  ev.jac_mu.resize(m_obj, x.size());
  ev.jac_sigma.resize(m_obj, x.size());
  for (Eigen::Index m = 0; m < m_obj; ++m) {
    const auto g = model(m).predict_with_gradient(x);
    ev.mu(m) = g.mean;
    ev.sigma(m) = g.std;
    ev.jac_mu.row(m) = g.grad_mean.transpose();
    ev.jac_sigma.row(m) = g.grad_std.transpose();
    if (order >= 2) ev.hess_mu.push_back(model(m).mean_hessian(x));
  }
  return ev;
}

Surrogate Surrogate::condition_on(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) const {
  std::vector<GpModel> models;
  models.reserve(models_.size());
  for (std::size_t m = 0; m < models_.size(); ++m) {
    models.push_back(models_[m].condition_on(x, y(static_cast<Eigen::Index>(m))));
  }
  return Surrogate(std::move(models));
}

std::vector<KernelParams> Surrogate::params() const {
  std::vector<KernelParams> out;
  for (const auto& m : models_) out.push_back(m.params());
  return out;
}

}  // namespace mobo
