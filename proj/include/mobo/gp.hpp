#pragma once

// Gaussian-process regression with a Matern-5/2 ARD kernel.
//
// Inputs are expected in the unit box; outputs are z-scored internally and
// every public prediction is in the caller's units.

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

#include "mobo/core.hpp"

namespace mobo {

struct KernelParams {
  Vector lengthscales;
  double signal_std = 1.0;
  double noise_std = 1e-2;

  [[nodiscard]] double noise_variance() const { return noise_std * noise_std; }
};

/// Hyperparameter box (lengthscales and signal std share one interval).
struct KernelBounds {
  static constexpr double kScaleLo = 0.031622776601683794;  // sqrt(1e-3)
  static constexpr double kScaleHi = 31.622776601683793;    // sqrt(1e3)
  static constexpr double kNoiseVarLo = 1e-6;
  static constexpr double kNoiseVarHi = 1e-3;

  static bool contains(const KernelParams& p);
};

/// Matern-5/2 kernel value at scaled distance r.
double matern52(double r, double signal_var);

struct FitOptions {
  int num_starts = 4;
  int explore_iters = 15;  // iterations given to every start
  int refine_iters = 60;   // extra iterations for the best start
};

class GpModel {
 public:
  struct Prediction {
    double mean;
    double std;
  };
  struct Gradient {
    double mean;
    double std;
    Vector grad_mean;
    Vector grad_std;
  };

  /// Maximizes the log marginal likelihood from `num_starts` starting
  /// points. `warm` (if given) is the first start.
  static GpModel fit(const Matrix& x, const Vector& y, std::uint64_t seed,
                     const std::optional<KernelParams>& warm = std::nullopt,
                     const FitOptions& options = {});

  /// Model with fixed hyperparameters, standardizing y from the data.
  static GpModel with_params(const Matrix& x, const Vector& y, const KernelParams& params);

  /// Model with fixed hyperparameters and explicit output standardization.
  static GpModel assemble(const Matrix& x, const Vector& y, const KernelParams& params, double y_mean,
                          double y_scale);

  [[nodiscard]] Prediction predict(const Eigen::Ref<const Vector>& x) const;
  [[nodiscard]] Gradient predict_with_gradient(const Eigen::Ref<const Vector>& x) const;
  /// Hessian of the posterior mean (symmetric D x D).
  [[nodiscard]] Matrix mean_hessian(const Eigen::Ref<const Vector>& x) const;

  /// Adds the pseudo-observation (x, y) keeping hyperparameters and output
  /// standardization fixed; the factorization is extended by one row.
  [[nodiscard]] GpModel condition_on(const Eigen::Ref<const Vector>& x, double y) const;

  [[nodiscard]] double log_marginal_likelihood() const { return lml_; }
  [[nodiscard]] const KernelParams& params() const { return params_; }
  [[nodiscard]] const Matrix& train_x() const { return x_; }
  [[nodiscard]] const Matrix& cholesky() const { return chol_; }
  [[nodiscard]] double jitter() const { return jitter_; }
  [[nodiscard]] double y_mean() const { return y_mean_; }
  [[nodiscard]] double y_scale() const { return y_scale_; }
  [[nodiscard]] Eigen::Index num_train() const { return x_.rows(); }
  [[nodiscard]] Eigen::Index dim() const { return x_.cols(); }

  /// Log marginal likelihood of standardized data under `params`
  /// (-inf when the kernel matrix cannot be factorized).
  static double log_marginal_likelihood(const Matrix& x, const Vector& y, const KernelParams& params);

 private:
  GpModel() = default;
  void factorize();

  Matrix x_;
  Vector y_;  // standardized targets
  KernelParams params_;
  Vector inv_ls2_;
  Matrix chol_;
  Vector alpha_;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  double jitter_ = 0.0;
  double lml_ = 0.0;
};

/// Posterior of all M objectives at one design point.
struct PosteriorEval {
  Vector mu;
  Vector sigma;
  Matrix jac_mu;     // M x D
  Matrix jac_sigma;  // M x D
  std::vector<Matrix> hess_mu;
};

/// One independent GP per objective.
class Surrogate {
 public:
  Surrogate() = default;
  explicit Surrogate(std::vector<GpModel> models) : models_(std::move(models)) {}

  /// Fits one model per column of y. Stream for objective m is derived from (seed, m).
  static Surrogate fit(const Matrix& x, const Matrix& y, std::uint64_t seed,
                       const std::vector<KernelParams>& warm = {}, const FitOptions& options = {});

  [[nodiscard]] Vector mean(const Eigen::Ref<const Vector>& x) const;
  [[nodiscard]] Vector std(const Eigen::Ref<const Vector>& x) const;
  /// order 1: mu, sigma and Jacobians; order 2 adds mean Hessians.
  [[nodiscard]] PosteriorEval evaluate(const Eigen::Ref<const Vector>& x, int order) const;
  [[nodiscard]] Surrogate condition_on(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) const;

  [[nodiscard]] std::vector<KernelParams> params() const;
  [[nodiscard]] Eigen::Index num_objectives() const { return static_cast<Eigen::Index>(models_.size()); }
  [[nodiscard]] Eigen::Index dim() const { return models_.empty() ? 0 : models_.front().dim(); }
  [[nodiscard]] const GpModel& model(Eigen::Index m) const { return models_[static_cast<std::size_t>(m)]; }

 private:
  std::vector<GpModel> models_;
};

}  // namespace mobo
