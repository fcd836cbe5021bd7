#include "dias/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dias::ergodic {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

FourierBasis::FourierBasis(const Domain& domain, int k_max) : domain_(domain), k_max_(k_max) {
  domain.validate();
  if (k_max < 1) throw std::invalid_argument("FourierBasis: k_max must be >= 1");

  lambda_.resize(static_cast<std::size_t>(n_modes()));
  h_.resize(static_cast<std::size_t>(n_modes()));
  for (int m = 0; m < n_modes(); ++m) {
    const auto [k1, k2] = mode(m);
    lambda_[static_cast<std::size_t>(m)] =
        std::pow(1.0 + static_cast<double>(k1 * k1 + k2 * k2), -1.5);
    const double hx = k1 == 0 ? domain.width : domain.width / 2.0;
    const double hy = k2 == 0 ? domain.height : domain.height / 2.0;
    h_[static_cast<std::size_t>(m)] = std::sqrt(hx * hy);
  }

  cos_x_.resize(k_max, domain.grid_nx);
  for (int k = 0; k < k_max; ++k)
    for (int ix = 0; ix < domain.grid_nx; ++ix)
      cos_x_(k, ix) = std::cos(k * kPi * (ix + 0.5) * domain.cell_dx() / domain.width);
  cos_y_.resize(k_max, domain.grid_ny);
  for (int k = 0; k < k_max; ++k)
    for (int iy = 0; iy < domain.grid_ny; ++iy)
      cos_y_(k, iy) = std::cos(k * kPi * (iy + 0.5) * domain.cell_dy() / domain.height);
}

double FourierBasis::eval(int m, const Vec2& q) const {
  const auto [k1, k2] = mode(m);
  return std::cos(k1 * kPi * q.x / domain_.width) * std::cos(k2 * kPi * q.y / domain_.height) /
         h_[static_cast<std::size_t>(m)];
}

Vec2 FourierBasis::gradient(int m, const Vec2& q) const {
  const auto [k1, k2] = mode(m);
  const double wx = k1 * kPi / domain_.width;
  const double wy = k2 * kPi / domain_.height;
  const double inv_h = 1.0 / h_[static_cast<std::size_t>(m)];
  return {-wx * std::sin(wx * q.x) * std::cos(wy * q.y) * inv_h,
          -wy * std::cos(wx * q.x) * std::sin(wy * q.y) * inv_h};
}

Eigen::VectorXd FourierBasis::eval_all(const Vec2& q) const {
  Eigen::VectorXd fk(n_modes());
  Eigen::VectorXd cx(k_max_), cy(k_max_);
  for (int k = 0; k < k_max_; ++k) {
    cx[k] = std::cos(k * kPi * q.x / domain_.width);
    cy[k] = std::cos(k * kPi * q.y / domain_.height);
  }
  for (int m = 0; m < n_modes(); ++m) {
    const auto [k1, k2] = mode(m);
    fk[m] = cx[k1] * cy[k2] / h_[static_cast<std::size_t>(m)];
  }
  return fk;
}

void update_trajectory_stats(TrajectoryStats& stats, const FourierBasis& basis, const Vec2& x_new,
                             double dt) {
  if (dt <= 0.0) throw std::invalid_argument("update_trajectory_stats: dt must be > 0");
  if (stats.coeffs.size() != basis.n_modes())
    throw std::invalid_argument("update_trajectory_stats: stats/basis mode mismatch");
  const Eigen::VectorXd fk = basis.eval_all(x_new);
  stats.coeffs = (stats.t_elapsed * stats.coeffs + dt * fk) / (stats.t_elapsed + dt);
  stats.t_elapsed += dt;
}

EidField compute_eid(const Eigen::VectorXd& mu_grid, const Eigen::VectorXd& var_grid,
                     double gamma_prev, double alpha) {
  if (mu_grid.size() != var_grid.size())
    throw std::invalid_argument("compute_eid: mu/var grid shape mismatch");
  if (gamma_prev < 0.0) throw std::invalid_argument("compute_eid: gamma_prev must be >= 0");

  EidField field;
  field.gamma = gamma_prev;
  field.alpha = alpha;
  const double sqrt_gamma = std::sqrt(gamma_prev);
  field.I_grid =
      (mu_grid.array() + alpha * ((var_grid.array() + gamma_prev).sqrt() - sqrt_gamma)).max(0.0);
  return field;
}

double update_gamma(double gamma_prev, double var_at_new_sample) {
  if (gamma_prev < 0.0 || var_at_new_sample < 0.0)
    throw std::invalid_argument("update_gamma: inputs must be >= 0");
  return gamma_prev + var_at_new_sample;
}

Eigen::VectorXd normalize_density(const Eigen::VectorXd& grid, const Domain& domain) {
  if (grid.size() != domain.n_cells())
    throw std::invalid_argument("normalize_density: grid does not match domain");
  const double mass = grid.sum() * domain.cell_area();
  const double area = domain.width * domain.height;
  if (mass <= 1e-12 * area)
    return Eigen::VectorXd::Constant(grid.size(), 1.0 / area);
  return grid / mass;
}

Eigen::VectorXd fourier_coeffs_of_field(const Eigen::VectorXd& I_grid, const FourierBasis& basis) {
  const Domain& d = basis.domain();
  if (I_grid.size() != d.n_cells())
    throw std::invalid_argument("fourier_coeffs_of_field: grid does not match basis domain");

  // Separable quadrature: contract over x, then over y.
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> field(
      I_grid.data(), d.grid_ny, d.grid_nx);
  const Eigen::MatrixXd zx = basis.cos_x_ * field.transpose();        // k_max x ny
  const Eigen::MatrixXd raw = zx * basis.cos_y_.transpose();          // (k1, k2)

  Eigen::VectorXd coeffs(basis.n_modes());
  const double cell = d.cell_area();
  for (int m = 0; m < basis.n_modes(); ++m) {
    const auto [k1, k2] = basis.mode(m);
    coeffs[m] = raw(k1, k2) * cell / basis.normalizer(m);
  }
  return coeffs;
}

double ergodic_metric(const FourierBasis& basis, const Eigen::VectorXd& I_k,
                      const Eigen::VectorXd& c_k) {
  if (I_k.size() != basis.n_modes() || c_k.size() != basis.n_modes())
    throw std::invalid_argument("ergodic_metric: coefficient/mode mismatch");
  double e = 0.0;
  for (int m = 0; m < basis.n_modes(); ++m) {
    const double diff = I_k[m] - c_k[m];
    e += basis.lambda(m) * diff * diff;
  }
  return e;
}

Eigen::MatrixXd metropolis_weights(const std::vector<std::vector<int>>& graph) {
  const int n = static_cast<int>(graph.size());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j : graph[static_cast<std::size_t>(i)]) {
      const double w = 1.0 / (1.0 + static_cast<double>(std::max(
                                        graph[static_cast<std::size_t>(i)].size(),
                                        graph[static_cast<std::size_t>(j)].size())));
      P(i, j) = w;
      off += w;
    }
    P(i, i) = 1.0 - off;
  }
  return P;
}

std::vector<Eigen::VectorXd> consensus_round(const std::vector<Eigen::VectorXd>& local_values,
                                             const std::vector<std::vector<int>>& graph, int t_c) {
  if (t_c < 1) throw std::invalid_argument("consensus_round: t_c must be >= 1");
  if (local_values.size() != graph.size())
    throw std::invalid_argument("consensus_round: value/graph size mismatch");
  const int n = static_cast<int>(local_values.size());
  for (int i = 0; i < n; ++i)
    for (int j : graph[static_cast<std::size_t>(i)]) {
      const auto& back = graph[static_cast<std::size_t>(j)];
      if (std::find(back.begin(), back.end(), i) == back.end())
        throw std::invalid_argument("consensus_round: neighbor graph must be symmetric");
    }

  const Eigen::MatrixXd P = metropolis_weights(graph);
  std::vector<Eigen::VectorXd> values = local_values;
  std::vector<Eigen::VectorXd> next(values.size());
  for (int round = 0; round < t_c; ++round) {
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd acc = P(i, i) * values[static_cast<std::size_t>(i)];
      for (int j : graph[static_cast<std::size_t>(i)])
        acc += P(i, j) * values[static_cast<std::size_t>(j)];
      next[static_cast<std::size_t>(i)] = std::move(acc);
    }
    values.swap(next);
  }
  return values;
}

Vec2 ergodic_control(const FourierBasis& basis, const Eigen::VectorXd& I_k_bar,
                     const Eigen::VectorXd& c_k_bar, const Vec2& position, double u_max) {
  if (u_max <= 0.0) throw std::invalid_argument("ergodic_control: u_max must be > 0");
  if (I_k_bar.size() != basis.n_modes() || c_k_bar.size() != basis.n_modes())
    throw std::invalid_argument("ergodic_control: coefficient/mode mismatch");

  Vec2 b{0.0, 0.0};
  for (int m = 0; m < basis.n_modes(); ++m) {
    const double w = basis.lambda(m) * (c_k_bar[m] - I_k_bar[m]);
    const Vec2 g = basis.gradient(m, position);
    b.x += w * g.x;
    b.y += w * g.y;
  }
  const double bn = b.norm();
  if (bn < 1e-12) return {0.0, 0.0};

  const Vec2 u{-u_max * b.x / bn, -u_max * b.y / bn};
  // Clip to a half-cell interior margin, not the exact walls: gradients of
  // every basis mode vanish on the boundary, so a robot parked exactly there
  // would never feel a push back into the domain.
  const Domain& dom = basis.domain();
  const double margin = std::min({0.5 * dom.cell_dx(), 0.5 * dom.cell_dy(),
                                  0.25 * dom.width, 0.25 * dom.height});
  Vec2 command = dom.clamp_margin(position + u, margin) - position;
  // a robot sitting outside the margin box gets pulled in; keep ‖u‖ <= u_max
  const double cn = command.norm();
  if (cn > u_max) command = {command.x * u_max / cn, command.y * u_max / cn};
  return command;
}

}  // namespace dias::ergodic
