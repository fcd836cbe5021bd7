#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dias/geometry.hpp"

namespace dias::ergodic {

/// Separable cosine basis on the rectangle, orthonormal under the
/// normalizers h_k:
///   F_k(q) = (1/h_k) cos(k1 pi x / W) cos(k2 pi y / H),  k in [0,k_max)^2.
/// Modes are flattened as m = k1 * k_max + k2. Per-axis cosine tables at the
/// grid cell centers are precomputed for field decompositions.
class FourierBasis {
 public:
  FourierBasis(const Domain& domain, int k_max);

  const Domain& domain() const { return domain_; }
  int k_max() const { return k_max_; }
  int n_modes() const { return k_max_ * k_max_; }
  std::pair<int, int> mode(int m) const { return {m / k_max_, m % k_max_}; }

  /// lambda_k = (1 + |k|^2)^(-3/2).
  double lambda(int m) const { return lambda_[static_cast<std::size_t>(m)]; }
  double normalizer(int m) const { return h_[static_cast<std::size_t>(m)]; }

  double eval(int m, const Vec2& q) const;
  Vec2 gradient(int m, const Vec2& q) const;
  Eigen::VectorXd eval_all(const Vec2& q) const;

 private:
  Domain domain_;
  int k_max_;
  std::vector<double> lambda_;
  std::vector<double> h_;
  Eigen::MatrixXd cos_x_;  // k_max x nx, cos(k1 pi x_c / W) at cell centers
  Eigen::MatrixXd cos_y_;  // k_max x ny

  friend Eigen::VectorXd fourier_coeffs_of_field(const Eigen::VectorXd&, const FourierBasis&);
};

/// Running time-average of the basis functions along a robot's trajectory.
struct TrajectoryStats {
  Eigen::VectorXd coeffs;  // c_k
  double t_elapsed = 0.0;

  static TrajectoryStats zero(const FourierBasis& basis) {
    return {Eigen::VectorXd::Zero(basis.n_modes()), 0.0};
  }
};

/// c_k <- (t c_k + dt F_k(x_new)) / (t + dt);  t <- t + dt.
void update_trajectory_stats(TrajectoryStats& stats, const FourierBasis& basis, const Vec2& x_new,
                             double dt);

/// Expected information density on the grid, clamped at zero. Normalization
/// to a unit-mass density happens separately (normalize_density) right
/// before the Fourier decomposition.
struct EidField {
  Eigen::VectorXd I_grid;
  double gamma = 0.0;  // the gamma_{t-1} this field was computed with
  double alpha = 1.0;
};

/// I(q) = mu(q) + alpha (sqrt(sigma^2(q) + gamma_prev) - sqrt(gamma_prev)),
/// elementwise, clamped at 0.
EidField compute_eid(const Eigen::VectorXd& mu_grid, const Eigen::VectorXd& var_grid,
                     double gamma_prev, double alpha);

/// gamma_t = gamma_{t-1} + sigma^2(x_t).
double update_gamma(double gamma_prev, double var_at_new_sample);

/// Rescale a non-negative grid so it integrates to 1 over the domain
/// (midpoint quadrature). A grid with ~zero mass falls back to uniform.
Eigen::VectorXd normalize_density(const Eigen::VectorXd& grid, const Domain& domain);

/// I_k = quadrature of I(q) F_k(q) over the grid, all modes.
Eigen::VectorXd fourier_coeffs_of_field(const Eigen::VectorXd& I_grid, const FourierBasis& basis);

/// E = sum_k lambda_k (I_k - c_k)^2.
double ergodic_metric(const FourierBasis& basis, const Eigen::VectorXd& I_k,
                      const Eigen::VectorXd& c_k);

/// Symmetric doubly stochastic Metropolis weights for a neighbor graph:
/// P_ij = 1/(1 + max(deg_i, deg_j)) for edges, self-weight = 1 - sum_j P_ij.
Eigen::MatrixXd metropolis_weights(const std::vector<std::vector<int>>& graph);

/// Applies v <- P v exactly t_c times to each robot's coefficient vector.
/// Double stochasticity preserves the global average every round.
std::vector<Eigen::VectorXd> consensus_round(const std::vector<Eigen::VectorXd>& local_values,
                                             const std::vector<std::vector<int>>& graph, int t_c);

/// Spectral-descent feedback toward ergodicity:
///   b = sum_k lambda_k (c_k - I_k) grad F_k(x),  u = -u_max b/|b|
/// (zero if |b| is negligible), clipped so x + u stays inside the domain.
Vec2 ergodic_control(const FourierBasis& basis, const Eigen::VectorXd& I_k_bar,
                     const Eigen::VectorXd& c_k_bar, const Vec2& position, double u_max);

}  // namespace dias::ergodic
