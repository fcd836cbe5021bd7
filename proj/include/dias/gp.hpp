#pragma once

#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "dias/geometry.hpp"

namespace dias::gp {

/// Squared-exponential kernel hyperparameters theta = (sigma_n, sigma_f, l).
struct Hyperparams {
  double sigma_n = 0.01;
  double sigma_f = 0.1;
  double length_scale = 1.0;

  void validate() const {
    if (sigma_n <= 0.0 || sigma_f <= 0.0 || length_scale <= 0.0)
      throw std::invalid_argument("Hyperparams: all parameters must be strictly positive");
  }
};

struct Interval {
  double lo;
  double hi;
  double clamp(double v) const { return std::min(std::max(v, lo), hi); }
};

struct HyperBounds {
  Interval sigma_n{1e-4, 0.1};
  Interval sigma_f{0.01, 1.0};
  Interval length_scale{0.1, 10.0};
};

/// k(q, q') = sigma_f^2 exp(-|q - q'|^2 / (2 l^2)).
double kernel(const Vec2& q, const Vec2& qp, const Hyperparams& theta);

/// Posterior over phi from one robot's dataset. Factorization of
/// (K_X + sigma_n^2 I) and alpha = (K_X + sigma_n^2 I)^-1 y are cached at
/// fit time; predictions are solves against the cached factor.
class GpModel {
 public:
  GpModel() = default;

  /// Builds and factorizes K_X + sigma_n^2 I. Retries once with 1e-8 diagonal
  /// jitter, then fails with diagnostics.
  static GpModel fit(std::vector<Vec2> X, Eigen::VectorXd y, const Hyperparams& theta);

  bool fitted() const { return !X_.empty(); }
  int size() const { return static_cast<int>(X_.size()); }
  const std::vector<Vec2>& inputs() const { return X_; }
  const Eigen::VectorXd& targets() const { return y_; }
  const Hyperparams& theta() const { return theta_; }

  /// Posterior mean and variance at each query point. Variances are clamped
  /// at zero against roundoff.
  void predict(std::span<const Vec2> queries, Eigen::VectorXd& mean, Eigen::VectorXd& variance) const;

  std::pair<double, double> predict_one(const Vec2& q) const;

 private:
  std::vector<Vec2> X_;
  Eigen::VectorXd y_;
  Hyperparams theta_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd alpha_;
};

/// Incrementally maintained posterior on a fixed query set (the environment
/// grid). Appending a sample extends the cached Cholesky factor by one row
/// — O(n·m) instead of a refit — and keeps mean/variance over the queries
/// current. Numerically matches GpModel::fit + predict on the same data.
class GridPosterior {
 public:
  GridPosterior(std::span<const Vec2> queries, const Hyperparams& theta);

  /// Drops all observations; new hyperparameters take effect on re-append.
  void reset(const Hyperparams& theta);

  /// Adds one observation and returns the posterior variance at x under the
  /// model *before* this append (the information-gain increment).
  double append(const Vec2& x, double y);

  int size() const { return n_; }
  int n_queries() const { return static_cast<int>(qx_.size()); }
  const Hyperparams& theta() const { return theta_; }
  const Eigen::VectorXd& mu() const { return mu_; }
  const Eigen::VectorXd& var() const { return var_; }

 private:
  void ensure_capacity(int n);

  Eigen::ArrayXd qx_, qy_;  // query coordinates, fixed at construction
  Hyperparams theta_;
  double sf2_ = 0.0, sn2_ = 0.0, inv2l2_ = 0.0;
  int n_ = 0;
  Eigen::ArrayXd dx_, dy_;  // observation coordinates
  Eigen::MatrixXd L_;       // growing lower Cholesky factor of K + sigma_n^2 I
  Eigen::MatrixXd V_;       // rows 0..n-1: L^-1 K_*
  Eigen::VectorXd w_;       // L^-1 y
  Eigen::VectorXd mu_;      // V^T w
  Eigen::ArrayXd sumsq_;    // column sums of V squared
  Eigen::VectorXd var_;     // max(0, sf2 - sumsq)
};

/// log p(y | X, theta) = -1/2 y^T K~^-1 y - 1/2 log|K~| - n/2 log(2 pi),
/// with K~ = K_X + sigma_n^2 I (same regularized matrix the posterior uses).
double log_marginal_likelihood(const std::vector<Vec2>& X, const Eigen::VectorXd& y,
                               const Hyperparams& theta);

struct TrainResult {
  Hyperparams theta;
  double lml = 0.0;
  bool improved = false;  // false means theta == theta_init (optimizer made no progress)
};

/// Maximizes the log marginal likelihood over log-theta with a multi-start
/// Nelder-Mead search projected into the bounds box. Never returns a theta
/// worse than theta_init. Past 160 samples the search evaluates the
/// likelihood on a deterministic stride subsample (the landscape is pinned
/// down long before that and the cubic factorization would otherwise
/// dominate); fitting and prediction always use the full dataset.
TrainResult train(const std::vector<Vec2>& X, const Eigen::VectorXd& y,
                  const Hyperparams& theta_init, const HyperBounds& bounds, int restarts = 3);

}  // namespace dias::gp
