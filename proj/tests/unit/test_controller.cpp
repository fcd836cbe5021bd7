#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "check_prop.hpp"
#include "dias/controller.hpp"
#include "dias/env_model.hpp"
#include "testutil.hpp"

using namespace dias;
using controller::ControllerConfig;
using controller::Mode;
using controller::WorldView;

namespace {

const Domain kDom{};

std::vector<bool> all_cells(bool value = true) {
  return std::vector<bool>(static_cast<std::size_t>(kDom.n_cells()), value);
}

/// Strict 8-neighborhood scan, written independently of the library.
std::vector<int> scan_maxima(const Eigen::VectorXd& mu, const std::vector<bool>& mask,
                             const std::vector<bool>& excluded) {
  std::vector<int> out;
  for (int iy = 0; iy < kDom.grid_ny; ++iy)
    for (int ix = 0; ix < kDom.grid_nx; ++ix) {
      const int idx = kDom.cell_index(ix, iy);
      if (!mask[static_cast<std::size_t>(idx)] || excluded[static_cast<std::size_t>(idx)]) continue;
      bool strict = true;
      for (int dy = -1; dy <= 1 && strict; ++dy)
        for (int dx = -1; dx <= 1 && strict; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = ix + dx, ny = iy + dy;
          if (nx < 0 || nx >= kDom.grid_nx || ny < 0 || ny >= kDom.grid_ny) continue;
          strict = mu[idx] > mu[kDom.cell_index(nx, ny)];
        }
      if (strict) out.push_back(idx);
    }
  return out;
}

/// mu grid with a handmade strict peak: `value` at the cell, half of it on
/// the ring around it.
void stamp_peak(Eigen::VectorXd& mu, int ix, int iy, double value) {
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx)
      mu[kDom.cell_index(ix + dx, iy + dy)] = dx == 0 && dy == 0 ? value : 0.5 * value;
}

}  // namespace

TEST_CASE("find_local_maxima: strict 8-neighborhood peaks under masks") {
  SUBCASE("constant field has no strict maxima") {
    const Eigen::VectorXd mu = Eigen::VectorXd::Constant(kDom.n_cells(), 0.2);
    CHECK(controller::find_local_maxima(mu, all_cells(), all_cells(false), kDom).empty());
  }

  SUBCASE("a single bump yields exactly its peak cell") {
    ScalarField field;
    field.sources = {{{5.1, 5.1}, 0.18, 0.8}};  // centered in cell (25,25)
    const Eigen::VectorXd mu = field_on_grid(field);
    const auto maxima = controller::find_local_maxima(mu, all_cells(), all_cells(false), kDom);
    REQUIRE(maxima.size() == 1);
    CHECK(maxima[0] == kDom.cell_at({5.1, 5.1}));
  }

  SUBCASE("a bump inside an exclusion disk disappears") {
    ScalarField field;
    field.sources = {{{5.1, 5.1}, 0.18, 0.8}};
    const Eigen::VectorXd mu = field_on_grid(field);
    const std::vector<Vec2> found{{5.1, 5.1}};
    const auto excluded = controller::exclusion_mask_of(found, 1.5, kDom);
    // Everything the mask leaves visible is a monotone tail, so no maxima.
    CHECK(controller::find_local_maxima(mu, all_cells(), excluded, kDom).empty());
  }

  SUBCASE("agrees with an exhaustive scan on random smooth fields") {
    Rng rng(47);
    for (int rep = 0; rep < 25; ++rep) {
      const Eigen::VectorXd mu = testutil::random_smooth_grid(rng, kDom, 4);
      std::vector<bool> mask = all_cells();
      std::vector<bool> excluded = all_cells(false);
      for (std::size_t i = 0; i < mask.size(); ++i) {
        mask[i] = rng.uniform01() < 0.8;
        excluded[i] = rng.uniform01() < 0.1;
      }
      CHECK(controller::find_local_maxima(mu, mask, excluded, kDom) ==
            scan_maxima(mu, mask, excluded));
    }
  }
}

TEST_CASE("identify_on_grids: LCB gate and candidate choice") {
  ControllerConfig cfg;
  cfg.beta = 10.0;
  cfg.tau = 0.1;
  cfg.exclusion_radius = 0.8;

  SUBCASE("no local maxima, no candidate") {
    const Eigen::VectorXd mu = Eigen::VectorXd::Zero(kDom.n_cells());
    const Eigen::VectorXd var = Eigen::VectorXd::Constant(kDom.n_cells(), 0.001);
    CHECK_FALSE(controller::identify_on_grids(mu, var, all_cells(), all_cells(false), kDom, cfg)
                    .has_value());
  }

  SUBCASE("one confident peak: LCB = 0.18 - 10 * 0.001 = 0.17 > tau") {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(kDom.n_cells());
    stamp_peak(mu, 25, 25, 0.18);
    const Eigen::VectorXd var = Eigen::VectorXd::Constant(kDom.n_cells(), 0.001);
    const auto cand =
        controller::identify_on_grids(mu, var, all_cells(), all_cells(false), kDom, cfg);
    REQUIRE(cand.has_value());
    CHECK(cand->grid_idx == kDom.cell_index(25, 25));
    CHECK(cand->lcb == doctest::Approx(0.17).epsilon(1e-12));
    CHECK(cand->position.x == doctest::Approx(5.1).epsilon(1e-12));
    CHECK(cand->position.y == doctest::Approx(5.1).epsilon(1e-12));
  }

  SUBCASE("a diffident peak stays below tau") {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(kDom.n_cells());
    stamp_peak(mu, 25, 25, 0.18);
    const Eigen::VectorXd var = Eigen::VectorXd::Constant(kDom.n_cells(), 0.012);
    // LCB = 0.18 - 0.12 = 0.06 < 0.1: not confident enough.
    CHECK_FALSE(controller::identify_on_grids(mu, var, all_cells(), all_cells(false), kDom, cfg)
                    .has_value());
  }

  SUBCASE("of two clearing candidates the higher LCB wins") {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(kDom.n_cells());
    stamp_peak(mu, 10, 10, 0.16);  // LCB 0.15
    stamp_peak(mu, 35, 35, 0.13);  // LCB 0.12
    const Eigen::VectorXd var = Eigen::VectorXd::Constant(kDom.n_cells(), 0.001);
    const auto cand =
        controller::identify_on_grids(mu, var, all_cells(), all_cells(false), kDom, cfg);
    REQUIRE(cand.has_value());
    CHECK(cand->grid_idx == kDom.cell_index(10, 10));
    CHECK(cand->lcb == doctest::Approx(0.15).epsilon(1e-12));
  }

  SUBCASE("equal LCBs resolve to the lower grid index") {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(kDom.n_cells());
    stamp_peak(mu, 10, 10, 0.16);
    stamp_peak(mu, 35, 35, 0.16);
    const Eigen::VectorXd var = Eigen::VectorXd::Constant(kDom.n_cells(), 0.001);
    const auto cand =
        controller::identify_on_grids(mu, var, all_cells(), all_cells(false), kDom, cfg);
    REQUIRE(cand.has_value());
    CHECK(cand->grid_idx == kDom.cell_index(10, 10));
  }
}

TEST_CASE("identify_potential_source: full GP path respects the found list") {
  // A tight cluster of high samples around (7,7) and low samples elsewhere.
  std::vector<Vec2> X;
  Eigen::VectorXd y(14);
  int n = 0;
  for (const Vec2& q : {Vec2{6.6, 6.6}, Vec2{7.4, 6.6}, Vec2{7.0, 7.0}, Vec2{6.6, 7.4},
                        Vec2{7.4, 7.4}, Vec2{7.0, 6.6}}) {
    X.push_back(q);
    y[n++] = 0.17;
  }
  for (const Vec2& q : {Vec2{1.0, 1.0}, Vec2{3.0, 1.5}, Vec2{1.5, 3.5}, Vec2{4.5, 4.0},
                        Vec2{2.5, 6.0}, Vec2{5.0, 8.0}, Vec2{8.5, 2.0}, Vec2{9.0, 9.0}}) {
    X.push_back(q);
    y[n++] = 0.01;
  }
  const gp::GpModel model = gp::GpModel::fit(X, y, {0.01, 0.2, 1.2});
  const Tessellation tess = update_voronoi({{6.0, 6.0}}, kDom);

  ControllerConfig cfg;
  cfg.beta = 5.0;
  cfg.tau = 0.08;
  cfg.exclusion_radius = 1.5;

  const auto cand = controller::identify_potential_source(model, tess, 0, {}, cfg);
  REQUIRE(cand.has_value());
  CHECK(distance(cand->position, {7.0, 7.0}) < 0.5);

  // Once that region is on the shared found list the candidate vanishes.
  const std::vector<Vec2> found{{7.0, 7.0}};
  const auto masked = controller::identify_potential_source(model, tess, 0, found, cfg);
  CHECK_FALSE(masked.has_value());
}

TEST_CASE("source_seeking_step: clamped pursuit") {
  SUBCASE("standing on the target holds position") {
    const Vec2 u = controller::source_seeking_step({4.0, 4.0}, {4.0, 4.0}, 0.5, kDom);
    CHECK(u.x == 0.0);
    CHECK(u.y == 0.0);
  }

  SUBCASE("distant target: full step along the segment") {
    const Vec2 u = controller::source_seeking_step({2.0, 3.0}, {2.0, 6.0}, 0.5, kDom);
    CHECK(u.norm() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(u.x == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(u.y == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("repeated application reaches the target in ceil(d/u_max) steps") {
    Rng rng(53);
    for (int rep = 0; rep < 50; ++rep) {
      Vec2 pos = testutil::random_point(rng, kDom);
      const Vec2 target = testutil::random_point(rng, kDom);
      const int budget = static_cast<int>(std::ceil(distance(pos, target) / 0.5));
      for (int t = 0; t < budget; ++t)
        pos = pos + controller::source_seeking_step(pos, target, 0.5, kDom);
      CHECK(distance(pos, target) <= 1e-9);
    }
  }

  SUBCASE("out-of-domain target is rejected") {
    CHECK_THROWS_AS((void)controller::source_seeking_step({1.0, 1.0}, {11.0, 1.0}, 0.5, kDom),
                    std::domain_error);
  }
}

TEST_CASE("controller_step: hybrid switch") {
  const ergodic::FourierBasis basis(kDom, 10);
  Eigen::VectorXd ik = Eigen::VectorXd::Zero(basis.n_modes());
  Eigen::VectorXd ck = Eigen::VectorXd::Zero(basis.n_modes());
  ik[0] = 0.1;
  ck[3] = 0.05;
  ControllerConfig cfg;
  cfg.beta = 10.0;
  cfg.tau = 0.1;
  cfg.exclusion_radius = 0.8;

  Eigen::VectorXd mu = Eigen::VectorXd::Zero(kDom.n_cells());
  stamp_peak(mu, 40, 40, 0.18);  // peak cell center (8.1, 8.1)
  const Eigen::VectorXd var = Eigen::VectorXd::Constant(kDom.n_cells(), 0.001);
  const auto mask = all_cells();
  const auto none_excluded = all_cells(false);

  SUBCASE("confident candidate: SEEKING straight toward it") {
    const WorldView view{mu, var, mask, none_excluded, basis, ik, ck, {2.0, 2.0}, 0.5, 9, false};
    const auto decision = controller::controller_step(view, cfg);
    CHECK(decision.mode == Mode::seeking);
    REQUIRE(decision.target.has_value());
    const Vec2 want =
        controller::source_seeking_step({2.0, 2.0}, decision.target->position, 0.5, kDom);
    CHECK(decision.command.x == want.x);
    CHECK(decision.command.y == want.y);
  }

  SUBCASE("no candidate: SENSING delegates to the ergodic law bit-for-bit") {
    const Eigen::VectorXd flat = Eigen::VectorXd::Zero(kDom.n_cells());
    const WorldView view{flat, var, mask, none_excluded, basis, ik, ck, {2.0, 2.0}, 0.5, 9, false};
    const auto decision = controller::controller_step(view, cfg);
    CHECK(decision.mode == Mode::sensing);
    CHECK_FALSE(decision.target.has_value());
    const Vec2 want = ergodic::ergodic_control(basis, ik, ck, {2.0, 2.0}, 0.5);
    CHECK(decision.command.x == want.x);
    CHECK(decision.command.y == want.y);
  }

  SUBCASE("force_sensing overrides a confident candidate (cold start)") {
    const WorldView view{mu, var, mask, none_excluded, basis, ik, ck, {2.0, 2.0}, 0.5, 0, true};
    CHECK(controller::controller_step(view, cfg).mode == Mode::sensing);
  }

  SUBCASE("candidate masked after being found: back to SENSING") {
    const WorldView before{mu, var, mask, none_excluded, basis, ik, ck, {7.9, 7.9}, 0.5, 4, false};
    const auto first = controller::controller_step(before, cfg);
    REQUIRE(first.mode == Mode::seeking);

    const auto excluded =
        controller::exclusion_mask_of(std::vector<Vec2>{first.target->position}, 0.8, kDom);
    const WorldView after{mu, var, mask, excluded, basis, ik, ck, {7.9, 7.9}, 0.5, 5, false};
    CHECK(controller::controller_step(after, cfg).mode == Mode::sensing);
  }

  SUBCASE("arrived at an unconfirmed candidate: orbits instead of parking") {
    const Vec2 peak{8.1, 8.1};
    const WorldView view{mu, var, mask, none_excluded, basis, ik, ck, peak, 0.5, 2, false};
    const auto decision = controller::controller_step(view, cfg);
    CHECK(decision.mode == Mode::seeking);
    CHECK(decision.command.norm() > 0.0);  // a parked robot would sit still
    const Vec2 next = peak + decision.command;
    CHECK(distance(next, peak) == doctest::Approx(cfg.probe_radius).epsilon(1e-9));

    // The ring point advances with the iteration counter.
    const WorldView later{mu, var, mask, none_excluded, basis, ik, ck, peak, 0.5, 3, false};
    const auto turned = controller::controller_step(later, cfg);
    CHECK(distance(peak + turned.command, next) > 1e-6);

    // probe_radius = 0 restores plain pursuit (parking on the estimate).
    ControllerConfig parked = cfg;
    parked.probe_radius = 0.0;
    const auto still = controller::controller_step(view, parked);
    CHECK(still.command.x == 0.0);
    CHECK(still.command.y == 0.0);
  }
}

TEST_CASE("hybrid_controller invariants") {
  CHECK_PROPERTY(props::controller_target_in_cell());
  CHECK_PROPERTY(props::controller_lcb_formula());
  CHECK_PROPERTY(props::controller_step_pure());
  CHECK_PROPERTY(props::controller_commands_stay_inside());
}
