#include "dias/env_model.hpp"

#include <cmath>
#include <stdexcept>

namespace dias {

void ScalarField::validate() const {
  domain.validate();
  for (const Source& s : sources) {
    if (!domain.contains(s.position))
      throw std::invalid_argument("ScalarField: source outside domain");
    if (s.intensity <= 0.0) throw std::invalid_argument("ScalarField: intensity must be > 0");
    if (s.spread <= 0.0) throw std::invalid_argument("ScalarField: spread must be > 0");
  }
}

double density_at(const ScalarField& field, const Vec2& q) {
  field.domain.require_inside(q, "density_at");
  double phi = 0.0;
  for (const Source& s : field.sources) {
    const double d2 = (q - s.position).squared_norm();
    phi += s.intensity * std::exp(-d2 / (2.0 * s.spread * s.spread));
  }
  return phi;
}

MeasurementModel::MeasurementModel(double noise_std, std::uint64_t master_seed, int n_robots)
    : noise_std_(noise_std) {
  if (noise_std < 0.0) throw std::invalid_argument("MeasurementModel: noise_std must be >= 0");
  streams_.reserve(static_cast<std::size_t>(n_robots));
  for (int i = 0; i < n_robots; ++i)
    streams_.emplace_back(master_seed, StreamTag::measurement, static_cast<std::uint64_t>(i));
}

double MeasurementModel::sample(const ScalarField& field, const Vec2& q, int robot_id) {
  field.domain.require_inside(q, "sample");
  const double phi = density_at(field, q);
  if (noise_std_ == 0.0) return phi;
  return phi + streams_.at(static_cast<std::size_t>(robot_id)).gaussian(0.0, noise_std_);
}

std::vector<int> check_found(const std::vector<Source>& sources, const std::vector<bool>& found,
                             const Vec2& x, double d) {
  if (d <= 0.0) throw std::invalid_argument("check_found: d must be > 0");
  std::vector<int> fresh;
  for (std::size_t j = 0; j < sources.size(); ++j) {
    if (j < found.size() && found[j]) continue;
    if (distance(x, sources[j].position) <= d) fresh.push_back(static_cast<int>(j));
  }
  return fresh;
}

Eigen::VectorXd field_on_grid(const ScalarField& field) {
  field.domain.validate();
  Eigen::VectorXd grid(field.domain.n_cells());
  for (int idx = 0; idx < field.domain.n_cells(); ++idx)
    grid[idx] = density_at(field, field.domain.cell_center(idx));
  return grid;
}

}  // namespace dias
