#include "dias/gp.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "dias/rng.hpp"

namespace dias::gp {

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;
constexpr double kJitter = 1e-8;

Eigen::MatrixXd kernel_matrix(const std::vector<Vec2>& X, const Hyperparams& theta) {
  const int n = static_cast<int>(X.size());
  const double sf2 = theta.sigma_f * theta.sigma_f;
  const double inv2l2 = 1.0 / (2.0 * theta.length_scale * theta.length_scale);
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i) {
    K(i, i) = sf2;
    for (int j = 0; j < i; ++j) {
      const double v = sf2 * std::exp(-(X[i] - X[j]).squared_norm() * inv2l2);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

/// Factorize K + sigma_n^2 I, retrying once with extra jitter.
Eigen::LLT<Eigen::MatrixXd> factorize(const Eigen::MatrixXd& K, const Hyperparams& theta) {
  const int n = static_cast<int>(K.rows());
  Eigen::MatrixXd Kn = K;
  Kn.diagonal().array() += theta.sigma_n * theta.sigma_n;
  Eigen::LLT<Eigen::MatrixXd> llt(Kn);
  if (llt.info() == Eigen::Success) return llt;

  Kn.diagonal().array() += kJitter;
  llt.compute(Kn);
  if (llt.info() == Eigen::Success) return llt;

  std::ostringstream msg;
  msg << "GP factorization failed twice (n=" << n << ", sigma_n=" << theta.sigma_n
      << ", sigma_f=" << theta.sigma_f << ", l=" << theta.length_scale
      << ", jitter=" << kJitter << ")";
  throw std::runtime_error(msg.str());
}

double lml_from_factor(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& alpha) {
  const double n = static_cast<double>(y.size());
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * y.dot(alpha) - 0.5 * log_det - 0.5 * n * kLogTwoPi;
}

}  // namespace

double kernel(const Vec2& q, const Vec2& qp, const Hyperparams& theta) {
  const double sf2 = theta.sigma_f * theta.sigma_f;
  return sf2 * std::exp(-(q - qp).squared_norm() /
                        (2.0 * theta.length_scale * theta.length_scale));
}

GpModel GpModel::fit(std::vector<Vec2> X, Eigen::VectorXd y, const Hyperparams& theta) {
  theta.validate();
  if (X.empty()) throw std::invalid_argument("GpModel::fit: empty training set");
  if (static_cast<int>(X.size()) != y.size())
    throw std::invalid_argument("GpModel::fit: |X| != |y|");

  GpModel m;
  m.theta_ = theta;
  m.chol_ = factorize(kernel_matrix(X, theta), theta);
  m.alpha_ = m.chol_.solve(y);
  m.X_ = std::move(X);
  m.y_ = std::move(y);
  return m;
}

void GpModel::predict(std::span<const Vec2> queries, Eigen::VectorXd& mean,
                      Eigen::VectorXd& variance) const {
  if (!fitted()) throw std::logic_error("GpModel::predict: model not fitted");
  const int n = size();
  const int m = static_cast<int>(queries.size());
  const double sf2 = theta_.sigma_f * theta_.sigma_f;
  const double inv2l2 = 1.0 / (2.0 * theta_.length_scale * theta_.length_scale);

  Eigen::MatrixXd Ks(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i)
      Ks(i, j) = sf2 * std::exp(-(X_[i] - queries[j]).squared_norm() * inv2l2);

  mean = Ks.transpose() * alpha_;
  // sigma^2(q) = k(q,q) - v^T v with v = L^-1 k(q); one triangular solve for all queries.
  Eigen::MatrixXd V = chol_.matrixL().solve(Ks);
  variance = (sf2 - V.colwise().squaredNorm().array()).max(0.0).matrix().transpose();
}

std::pair<double, double> GpModel::predict_one(const Vec2& q) const {
  const Vec2 qs[1] = {q};
  Eigen::VectorXd mu, var;
  predict(std::span<const Vec2>(qs, 1), mu, var);
  return {mu[0], var[0]};
}

GridPosterior::GridPosterior(std::span<const Vec2> queries, const Hyperparams& theta) {
  if (queries.empty()) throw std::invalid_argument("GridPosterior: empty query set");
  const auto m = static_cast<Eigen::Index>(queries.size());
  qx_.resize(m);
  qy_.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    qx_[j] = queries[static_cast<std::size_t>(j)].x;
    qy_[j] = queries[static_cast<std::size_t>(j)].y;
  }
  mu_.resize(m);
  sumsq_.resize(m);
  var_.resize(m);
  reset(theta);
}

void GridPosterior::reset(const Hyperparams& theta) {
  theta.validate();
  theta_ = theta;
  sf2_ = theta.sigma_f * theta.sigma_f;
  sn2_ = theta.sigma_n * theta.sigma_n;
  inv2l2_ = 1.0 / (2.0 * theta.length_scale * theta.length_scale);
  n_ = 0;
  mu_.setZero();
  sumsq_.setZero();
  var_.setConstant(sf2_);
}

void GridPosterior::ensure_capacity(int n) {
  const auto cap = static_cast<Eigen::Index>(n);
  if (L_.rows() >= cap) return;
  const Eigen::Index grown = std::max<Eigen::Index>(2 * L_.rows(), 64);
  L_.conservativeResize(grown, grown);
  V_.conservativeResize(grown, qx_.size());
  w_.conservativeResize(grown);
  dx_.conservativeResize(grown);
  dy_.conservativeResize(grown);
}

double GridPosterior::append(const Vec2& x, double y) {
  const int n = n_;
  ensure_capacity(n + 1);

  Eigen::VectorXd l;
  double lsq = 0.0;
  if (n > 0) {
    const Eigen::VectorXd kvec =
        (sf2_ * (-((dx_.head(n) - x.x).square() + (dy_.head(n) - x.y).square()) * inv2l2_).exp())
            .matrix();
    l = L_.topLeftCorner(n, n).triangularView<Eigen::Lower>().solve(kvec);
    lsq = l.squaredNorm();
  }
  const double diag2 = sf2_ + sn2_ - lsq;
  if (diag2 <= 0.0)
    throw std::runtime_error("GridPosterior::append: factor breakdown (n=" + std::to_string(n) +
                             ")");
  const double d = std::sqrt(diag2);

  Eigen::RowVectorXd vrow =
      (sf2_ * (-((qx_ - x.x).square() + (qy_ - x.y).square()) * inv2l2_).exp()).matrix();
  if (n > 0) vrow.noalias() -= l.transpose() * V_.topRows(n);
  vrow /= d;

  if (n > 0) L_.row(n).head(n) = l.transpose();
  L_(n, n) = d;
  V_.row(n) = vrow;
  w_[n] = ((n > 0 ? y - l.dot(w_.head(n)) : y)) / d;
  dx_[n] = x.x;
  dy_[n] = x.y;
  n_ = n + 1;

  mu_.noalias() += w_[n] * vrow.transpose();
  sumsq_ += vrow.array().square().transpose();
  var_ = (sf2_ - sumsq_).max(0.0).matrix();

  return std::max(0.0, diag2 - sn2_);
}

double log_marginal_likelihood(const std::vector<Vec2>& X, const Eigen::VectorXd& y,
                               const Hyperparams& theta) {
  theta.validate();
  if (X.empty()) throw std::invalid_argument("log_marginal_likelihood: empty training set");
  if (static_cast<int>(X.size()) != y.size())
    throw std::invalid_argument("log_marginal_likelihood: |X| != |y|");
  const auto llt = factorize(kernel_matrix(X, theta), theta);
  return lml_from_factor(llt, y, llt.solve(y));
}

namespace {

using LogTheta = Eigen::Vector3d;  // (log sigma_n, log sigma_f, log l)

Hyperparams to_theta(const LogTheta& v) {
  return Hyperparams{std::exp(v[0]), std::exp(v[1]), std::exp(v[2])};
}

LogTheta project(LogTheta v, const LogTheta& lo, const LogTheta& hi) {
  for (int i = 0; i < 3; ++i) v[i] = std::min(std::max(v[i], lo[i]), hi[i]);
  return v;
}

/// Nelder-Mead on the projected box. Small and deterministic; the objective
/// is a 3-parameter likelihood so nothing heavier is warranted.
LogTheta nelder_mead(const std::function<double(const LogTheta&)>& f, const LogTheta& x0,
                     const LogTheta& lo, const LogTheta& hi, int max_iters) {
  constexpr int kDim = 3;
  struct Vertex {
    LogTheta x;
    double fx;
  };
  std::vector<Vertex> simplex;
  simplex.reserve(kDim + 1);
  simplex.push_back({x0, f(x0)});
  for (int i = 0; i < kDim; ++i) {
    LogTheta xi = x0;
    xi[i] += 0.4;
    xi = project(xi, lo, hi);
    if ((xi - x0).norm() < 1e-12) xi[i] = std::max(lo[i], x0[i] - 0.4);
    simplex.push_back({xi, f(xi)});
  }

  auto order = [&] {
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; });
  };
  order();

  for (int it = 0; it < max_iters; ++it) {
    if (simplex.back().fx - simplex.front().fx < 1e-9) break;

    LogTheta centroid = LogTheta::Zero();
    for (int i = 0; i < kDim; ++i) centroid += simplex[i].x;
    centroid /= kDim;

    const LogTheta xr = project(centroid + (centroid - simplex.back().x), lo, hi);
    const double fr = f(xr);
    if (fr < simplex.front().fx) {
      const LogTheta xe = project(centroid + 2.0 * (centroid - simplex.back().x), lo, hi);
      const double fe = f(xe);
      simplex.back() = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
    } else if (fr < simplex[kDim - 1].fx) {
      simplex.back() = {xr, fr};
    } else {
      const LogTheta xc = project(centroid + 0.5 * (simplex.back().x - centroid), lo, hi);
      const double fc = f(xc);
      if (fc < simplex.back().fx) {
        simplex.back() = {xc, fc};
      } else {
        for (int i = 1; i <= kDim; ++i) {
          simplex[i].x = simplex[0].x + 0.5 * (simplex[i].x - simplex[0].x);
          simplex[i].fx = f(simplex[i].x);
        }
      }
    }
    order();
  }
  return simplex.front().x;
}

}  // namespace

TrainResult train(const std::vector<Vec2>& X, const Eigen::VectorXd& y,
                  const Hyperparams& theta_init, const HyperBounds& bounds, int restarts) {
  if (X.size() < 2) throw std::invalid_argument("train: need at least 2 samples");
  if (restarts < 1) throw std::invalid_argument("train: restarts must be >= 1");

  const LogTheta lo(std::log(bounds.sigma_n.lo), std::log(bounds.sigma_f.lo),
                    std::log(bounds.length_scale.lo));
  const LogTheta hi(std::log(bounds.sigma_n.hi), std::log(bounds.sigma_f.hi),
                    std::log(bounds.length_scale.hi));

  // likelihood-search data: full set up to kSearchCap, stride subsample past it
  constexpr int kSearchCap = 160;
  const int n = static_cast<int>(X.size());
  const std::vector<Vec2>* Xs = &X;
  const Eigen::VectorXd* ys = &y;
  std::vector<Vec2> x_sub;
  Eigen::VectorXd y_sub;
  if (n > kSearchCap) {
    const int stride = (n + kSearchCap - 1) / kSearchCap;
    for (int i = 0; i < n; i += stride) x_sub.push_back(X[static_cast<std::size_t>(i)]);
    y_sub.resize(static_cast<Eigen::Index>(x_sub.size()));
    Eigen::Index j = 0;
    for (int i = 0; i < n; i += stride) y_sub[j++] = y[i];
    Xs = &x_sub;
    ys = &y_sub;
  }

  const double init_lml = log_marginal_likelihood(*Xs, *ys, theta_init);
  LogTheta best = project(LogTheta(std::log(theta_init.sigma_n), std::log(theta_init.sigma_f),
                                   std::log(theta_init.length_scale)),
                          lo, hi);
  double best_f = std::numeric_limits<double>::infinity();

  // Track the best evaluation ever seen so the result cannot regress even
  // if a search run wanders.
  auto objective = [&](const LogTheta& v) {
    double val;
    try {
      val = -log_marginal_likelihood(*Xs, *ys, to_theta(v));
    } catch (const std::runtime_error&) {
      return 1e30;  // factorization failure: treat as a terrible candidate
    }
    if (std::isfinite(val) && val < best_f) {
      best_f = val;
      best = v;
    }
    return std::isfinite(val) ? val : 1e30;
  };

  // Search runs shrink once the dataset pins the likelihood down; the first
  // start is always theta_init, the rest are drawn from a fixed-seed stream
  // so train stays a pure function of its arguments.
  const int effective_restarts = n > 120 ? 1 : restarts;
  const int max_iters = n > 200 ? 80 : 150;
  Rng start_rng(0x5EEDD1A5ULL);

  for (int r = 0; r < effective_restarts; ++r) {
    LogTheta x0;
    if (r == 0) {
      x0 = project(LogTheta(std::log(theta_init.sigma_n), std::log(theta_init.sigma_f),
                            std::log(theta_init.length_scale)),
                   lo, hi);
    } else {
      for (int i = 0; i < 3; ++i) x0[i] = start_rng.uniform(lo[i], hi[i]);
    }
    nelder_mead(objective, x0, lo, hi, max_iters);
  }

  TrainResult out;
  out.theta = to_theta(best);
  out.lml = -best_f;
  out.improved = out.lml > init_lml;
  if (!out.improved) {
    out.theta = theta_init;
    out.lml = init_lml;
  }
  return out;
}

}  // namespace dias::gp
