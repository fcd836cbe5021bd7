#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "check_prop.hpp"
#include "dias/env_model.hpp"
#include "testutil.hpp"

using namespace dias;

namespace {

ScalarField one_source(const Vec2& at, double intensity, double spread) {
  ScalarField field;
  field.sources.push_back({at, intensity, spread});
  return field;
}

}  // namespace

TEST_CASE("density_at: superposition of Gaussian bumps") {
  SUBCASE("no sources means zero everywhere") {
    ScalarField empty;
    CHECK(density_at(empty, {1.0, 2.0}) == 0.0);
    CHECK(density_at(empty, {9.9, 0.1}) == 0.0);
  }

  SUBCASE("peak value is the intensity") {
    const ScalarField field = one_source({4.0, 6.0}, 0.18, 1.0);
    CHECK(density_at(field, {4.0, 6.0}) == doctest::Approx(0.18).epsilon(1e-12));
  }

  SUBCASE("one length-scale away: intensity * exp(-1/2)") {
    const ScalarField field = one_source({5.0, 5.0}, 0.2, 1.0);
    CHECK(density_at(field, {6.0, 5.0}) ==
          doctest::Approx(0.2 * std::exp(-0.5)).epsilon(1e-12));  // ~0.12131
  }

  SUBCASE("two bumps add") {
    ScalarField field = one_source({2.0, 2.0}, 0.16, 1.0);
    field.sources.push_back({{8.0, 8.0}, 0.20, 1.0});
    const double lone = 0.16 + 0.20 * std::exp(-(6.0 * 6.0 + 6.0 * 6.0) / 2.0);
    CHECK(density_at(field, {2.0, 2.0}) == doctest::Approx(lone).epsilon(1e-12));
  }

  SUBCASE("out-of-domain query is rejected") {
    const ScalarField field = one_source({5.0, 5.0}, 0.18, 1.0);
    CHECK_THROWS_AS((void)density_at(field, {-0.1, 5.0}), std::domain_error);
    CHECK_THROWS_AS((void)density_at(field, {5.0, 10.1}), std::domain_error);
  }
}

TEST_CASE("sample: additive Gaussian sensor noise") {
  const ScalarField field = one_source({3.0, 3.0}, 0.16, 1.0);

  SUBCASE("zero noise reproduces the density at the peak") {
    MeasurementModel sensor(0.0, 42, 1);
    CHECK(sensor.sample(field, {3.0, 3.0}, 0) == 0.16);
  }

  SUBCASE("same seed, same call sequence, same outputs") {
    MeasurementModel a(0.02, 7, 2);
    MeasurementModel b(0.02, 7, 2);
    for (int k = 0; k < 25; ++k) {
      const Vec2 q{0.3 * k + 0.5, 9.0 - 0.3 * k};
      CHECK(a.sample(field, q, k % 2) == b.sample(field, q, k % 2));
    }
  }

  SUBCASE("sample mean obeys the law of large numbers") {
    const double noise = 0.01;
    const int n = 10000;
    MeasurementModel sensor(noise, 123, 1);
    const Vec2 q{3.5, 2.5};
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += sensor.sample(field, q, 0);
    CHECK(std::abs(sum / n - density_at(field, q)) <= 3.0 * noise / std::sqrt(double(n)));
  }

  SUBCASE("out-of-domain sample is rejected") {
    MeasurementModel sensor(0.01, 5, 1);
    CHECK_THROWS_AS((void)sensor.sample(field, {11.0, 5.0}, 0), std::domain_error);
  }
}

TEST_CASE("check_found: distance-d criterion over the unfound set") {
  const std::vector<Source> sources = {{{2.0, 2.0}, 0.18, 1.0},
                                       {{5.0, 5.0}, 0.17, 1.0},
                                       {{8.0, 2.0}, 0.19, 1.0}};

  SUBCASE("exactly at a source") {
    const std::vector<bool> found(3, false);
    CHECK(check_found(sources, found, {5.0, 5.0}, 0.4) == std::vector<int>{1});
  }

  SUBCASE("boundary distance counts (<= d)") {
    const std::vector<bool> found(3, false);
    CHECK(check_found(sources, found, {2.0, 2.4}, 0.4) == std::vector<int>{0});
  }

  SUBCASE("already-found sources are not re-reported") {
    const std::vector<bool> found(3, true);
    CHECK(check_found(sources, found, {5.0, 5.0}, 0.4).empty());
  }

  SUBCASE("one visit can confirm several sources") {
    const std::vector<Source> pair = {{{4.9, 5.0}, 0.18, 1.0}, {{5.1, 5.0}, 0.18, 1.0}};
    const std::vector<bool> found(2, false);
    CHECK(check_found(pair, found, {5.0, 5.0}, 0.4) == std::vector<int>{0, 1});
  }

  SUBCASE("d must be positive") {
    const std::vector<bool> found(3, false);
    CHECK_THROWS_AS((void)check_found(sources, found, {5.0, 5.0}, 0.0), std::invalid_argument);
  }
}

TEST_CASE("field_on_grid: density rasterized at cell centers") {
  SUBCASE("no sources, all zeros") {
    ScalarField empty;
    const Eigen::VectorXd grid = field_on_grid(empty);
    CHECK(grid.size() == empty.domain.n_cells());
    CHECK(grid.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("grid maximum sits in the cell holding a lone source") {
    const ScalarField field = one_source({6.3, 2.9}, 0.18, 0.6);
    const Eigen::VectorXd grid = field_on_grid(field);
    Eigen::Index argmax = 0;
    grid.maxCoeff(&argmax);
    CHECK(static_cast<int>(argmax) == field.domain.cell_at({6.3, 2.9}));
  }

  SUBCASE("midpoint quadrature recovers the Gaussian mass within 1%") {
    // Both bumps sit >= 3 spreads inside, so boundary truncation is
    // negligible against a 1% band.
    ScalarField field = one_source({5.0, 5.0}, 0.18, 1.0);
    field.sources.push_back({{4.0, 6.0}, 0.20, 0.9});
    const Eigen::VectorXd grid = field_on_grid(field);
    const double quadrature = grid.sum() * field.domain.cell_area();
    double analytic = 0.0;
    for (const Source& s : field.sources)
      analytic += s.intensity * 2.0 * 3.14159265358979323846 * s.spread * s.spread;
    CHECK(std::abs(quadrature - analytic) <= 0.01 * analytic);
  }
}

TEST_CASE("env_model invariants") {
  CHECK_PROPERTY(props::env_phi_nonnegative());
  CHECK_PROPERTY(props::env_zero_noise_sample_is_density());
  CHECK_PROPERTY(props::env_check_found_monotone());
  CHECK_PROPERTY(props::env_measurement_determinism());
}
