#pragma once

#include <vector>

#include <Eigen/Core>

#include "dias/geometry.hpp"
#include "dias/rng.hpp"

namespace dias {

/// One static emission point. The density contribution is an isotropic
/// Gaussian bump: intensity * exp(-|q - position|^2 / (2 spread^2)).
struct Source {
  Vec2 position;
  double intensity = 0.18;
  double spread = 1.0;
};

/// Ground-truth density phi(q) >= 0: superposition of Gaussian bumps.
struct ScalarField {
  std::vector<Source> sources;
  Domain domain;

  void validate() const;
};

/// Additive-noise point sensor. One stream per robot so robots can be
/// stepped in any order without perturbing each other's noise sequence.
class MeasurementModel {
 public:
  MeasurementModel(double noise_std, std::uint64_t master_seed, int n_robots);

  double noise_std() const { return noise_std_; }

  /// Noisy sample of the field at q drawn from robot_id's stream.
  double sample(const ScalarField& field, const Vec2& q, int robot_id);

 private:
  double noise_std_;
  std::vector<Rng> streams_;
};

/// phi(q) = sum_k intensity_k * exp(-|q - s_k|^2 / (2 spread_k^2)).
double density_at(const ScalarField& field, const Vec2& q);

/// Indices j with found[j] == false and |x - s_j| <= d (boundary inclusive).
std::vector<int> check_found(const std::vector<Source>& sources, const std::vector<bool>& found,
                             const Vec2& x, double d);

/// Row-major grid of density values at cell centers.
Eigen::VectorXd field_on_grid(const ScalarField& field);

}  // namespace dias
