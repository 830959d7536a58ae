#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "rdode/errors.hpp"
#include "rdode/model.hpp"

using namespace rdode;

namespace {

std::vector<ModelSpec> builtin_models() {
  return {build_hysteresis_model(hysteresis_default()),
          build_hysteresis_model(bistable_default()),
          build_hysteresis_model(stable_hysteresis_params()),
          build_ddi_model(ddi_default())};
}

Eigen::MatrixXd central_difference_jacobian(const ModelSpec& model, const Eigen::VectorXd& u,
                                            const Eigen::VectorXd& v, double x) {
  const int dims = model.m + model.k;
  Eigen::MatrixXd J(dims, dims);
  const double step = 1e-5;
  for (int col = 0; col < dims; ++col) {
    Eigen::VectorXd up = u, um = u, vp = v, vm = v;
    if (col < model.m) {
      up[col] += step;
      um[col] -= step;
    } else {
      vp[col - model.m] += step;
      vm[col - model.m] -= step;
    }
    Eigen::VectorXd fp(model.m), gp(model.k), fm(model.m), gm(model.k);
    model.reaction(up, vp, x, fp, gp);
    model.reaction(um, vm, x, fm, gm);
    for (int row = 0; row < model.m; ++row) J(row, col) = (fp[row] - fm[row]) / (2 * step);
    for (int row = 0; row < model.k; ++row)
      J(model.m + row, col) = (gp[row] - gm[row]) / (2 * step);
  }
  return J;
}

}  // namespace

TEST_CASE("default parameter sets pass validation") {
  CHECK_NOTHROW(validate(hysteresis_default()));
  CHECK_NOTHROW(validate(bistable_default()));
  CHECK_NOTHROW(validate(stable_hysteresis_params()));
  CHECK_NOTHROW(validate(ddi_default()));
}

TEST_CASE("validation rejects a nullcline slope at zero below alpha/beta") {
  HysteresisParams params = bistable_default();
  params.alpha = 2.0;
  params.beta = 1.0;
  CHECK_THROWS_AS(validate(params), InvalidParams);
  CHECK_THROWS_AS(build_hysteresis_model(params), InvalidParams);
}

TEST_CASE("validation rejects cubics with extra real roots or bad scalars") {
  HysteresisParams extra_roots = hysteresis_default();
  extra_roots.p_coeffs = {2.5, -3.0, 0.5};  // c2^2 - 4 c1 c3 = 4 > 0
  CHECK_THROWS_AS(validate(extra_roots), InvalidParams);

  HysteresisParams no_cubic = hysteresis_default();
  no_cubic.p_coeffs = {2.5, -3.0, 0.0};
  CHECK_THROWS_AS(validate(no_cubic), InvalidParams);

  HysteresisParams bad_diffusion = hysteresis_default();
  bad_diffusion.diffusion = 0.0;
  CHECK_THROWS_AS(validate(bad_diffusion), InvalidParams);

  HysteresisParams bad_beta = hysteresis_default();
  bad_beta.beta = -1.0;
  CHECK_THROWS_AS(validate(bad_beta), InvalidParams);
}

TEST_CASE("ddi validation requires m1 strictly above 2 sqrt(kappa)") {
  DdiParams boundary = ddi_default();
  boundary.m1 = 2.0;  // equals 2 sqrt(kappa) for kappa = 1
  CHECK_THROWS_AS(validate(boundary), InvalidParams);

  DdiParams bad_mu = ddi_default();
  bad_mu.mu = 0.0;
  CHECK_THROWS_AS(validate(bad_mu), InvalidParams);
}

TEST_CASE("hysteresis model carries the analytic jacobian blocks") {
  const ModelSpec model = build_hysteresis_model(hysteresis_default());
  CHECK(model.m == 1);
  CHECK(model.k == 1);
  CHECK(model.diffusion[0] == doctest::Approx(1e-2));
  REQUIRE(model.hysteresis.has_value());

  Eigen::VectorXd u(1), v(1);
  u << 0.7;
  v << -0.3;
  const Eigen::MatrixXd J = model.reaction_jacobian(u, v, 0.5);
  CHECK(J(0, 0) == doctest::Approx(-cubic_dp(model.hysteresis->p_coeffs, 0.7)).epsilon(1e-14));
  CHECK(J(0, 1) == doctest::Approx(1.0));
  CHECK(J(1, 0) == doctest::Approx(model.hysteresis->alpha));
  CHECK(J(1, 1) == doctest::Approx(-model.hysteresis->beta));
}

TEST_CASE("nullcline intersections sit at the root-formula values") {
  const HysteresisParams params = hysteresis_default();
  // p(u) = u at u = 0, (3 -/+ sqrt(3))/2 for the default cubic.
  for (const double u : {0.0, 0.6339745962155614, 2.3660254037844384})
    CHECK(std::abs(cubic_p(params.p_coeffs, u) - u) <= 1e-12);

  const HysteresisParams bistable = bistable_default();
  for (const double u : {0.0, 0.5, 1.0})
    CHECK(std::abs(cubic_p(bistable.p_coeffs, u) - u) <= 1e-15);
  // The bistable cubic is strictly increasing: its derivative has no real root.
  const auto& c = bistable.p_coeffs;
  CHECK(4.0 * c[1] * c[1] - 12.0 * c[0] * c[2] < 0.0);
}

TEST_CASE("ddi model at the origin has jacobian diag(-1, -mu)") {
  const ModelSpec model = build_ddi_model(ddi_default());
  Eigen::VectorXd zero(1);
  zero << 0.0;
  const Eigen::MatrixXd J = model.reaction_jacobian(zero, zero, 0.0);
  CHECK(J(0, 0) == doctest::Approx(-1.0));
  CHECK(J(0, 1) == doctest::Approx(0.0));
  CHECK(J(1, 0) == doctest::Approx(0.0));
  CHECK(J(1, 1) == doctest::Approx(-model.ddi->mu));
}

TEST_CASE("reaction vanishes at the known constant equilibria") {
  const Grid grid = Grid::make(5);
  auto constant_state = [&](const ModelSpec& model, double u, double v) {
    StateField state = StateField::zero(model.m, model.k, grid.n);
    state.u.setConstant(u);
    state.v.setConstant(v);
    return state;
  };

  const ModelSpec hysteresis = build_hysteresis_model(hysteresis_default());
  CHECK(evaluate_reaction(hysteresis, constant_state(hysteresis, 0.0, 0.0), grid).sup_norm() ==
        0.0);

  const ModelSpec ddi = build_ddi_model(ddi_default());
  CHECK(evaluate_reaction(ddi, constant_state(ddi, 0.0, 0.0), grid).sup_norm() == 0.0);

  const ModelSpec bistable = build_hysteresis_model(bistable_default());
  CHECK(evaluate_reaction(bistable, constant_state(bistable, 0.5, 0.5), grid).sup_norm() <=
        1e-15);
}

TEST_CASE("analytic jacobians match central differences at random points") {
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> uv(-2.0, 3.0), xs(0.0, 1.0);
  for (const ModelSpec& model : builtin_models()) {
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd u(1), v(1);
      u << uv(gen);
      v << uv(gen);
      const double x = xs(gen);
      const Eigen::MatrixXd J = model.reaction_jacobian(u, v, x);
      const Eigen::MatrixXd Jfd = central_difference_jacobian(model, u, v, x);
      const double rel =
          (J - Jfd).cwiseAbs().maxCoeff() / std::max(1.0, J.cwiseAbs().maxCoeff());
      CHECK(rel <= 1e-5);
    }
  }
}

TEST_CASE("built-in reactions do not depend on the node coordinate") {
  const Grid grid = Grid::make(12);
  std::mt19937 gen(23);
  std::uniform_real_distribution<double> dist(-1.0, 2.0);
  for (const ModelSpec& model : builtin_models()) {
    StateField state = StateField::zero(1, 1, grid.n);
    for (int i = 0; i < grid.n; ++i) {
      state.u(0, i) = dist(gen);
      state.v(0, i) = dist(gen);
    }
    const StateField base = evaluate_reaction(model, state, grid);

    StateField reversed = StateField::zero(1, 1, grid.n);
    for (int i = 0; i < grid.n; ++i) {
      reversed.u(0, i) = state.u(0, grid.n - 1 - i);
      reversed.v(0, i) = state.v(0, grid.n - 1 - i);
    }
    const StateField out = evaluate_reaction(model, reversed, grid);
    for (int i = 0; i < grid.n; ++i) {
      CHECK(out.u(0, i) == base.u(0, grid.n - 1 - i));
      CHECK(out.v(0, i) == base.v(0, grid.n - 1 - i));
    }
  }
}

TEST_CASE("evaluate_reaction rejects mismatched shapes") {
  const ModelSpec model = build_hysteresis_model(hysteresis_default());
  const Grid grid = Grid::make(6);
  CHECK_THROWS_AS(evaluate_reaction(model, StateField::zero(1, 1, 5), grid), DimensionMismatch);
  CHECK_THROWS_AS(evaluate_reaction(model, StateField::zero(2, 1, 6), grid), DimensionMismatch);
}

TEST_CASE("state fields pack component-major and round-trip") {
  StateField state = StateField::zero(2, 1, 3);
  state.u << 1, 2, 3, 4, 5, 6;
  state.v << 7, 8, 9;
  const Eigen::VectorXd y = state.pack();
  REQUIRE(y.size() == 9);
  CHECK(y[0] == 1.0);
  CHECK(y[2] == 3.0);
  CHECK(y[3] == 4.0);
  CHECK(y[6] == 7.0);
  CHECK(y[8] == 9.0);

  const StateField back = StateField::unpack(y, 2, 1, 3);
  CHECK((back.u - state.u).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.v - state.v).cwiseAbs().maxCoeff() == 0.0);

  const StateField sum = state + (-1.0) * state;
  CHECK(sum.sup_norm() == 0.0);
  const StateField diff = state - state;
  CHECK(diff.sup_norm() == 0.0);
  CHECK(state.sup_norm() == 9.0);
}

TEST_CASE("cubic helpers evaluate the polynomial and its derivatives") {
  const std::array<double, 3> c{2.5, -3.0, 1.0};
  CHECK(cubic_p(c, 1.0) == doctest::Approx(0.5));
  CHECK(cubic_dp(c, 1.0) == doctest::Approx(2.5 - 6.0 + 3.0));
  CHECK(cubic_d2p(c, 1.0) == doctest::Approx(0.0));
  CHECK(cubic_p(c, 0.0) == 0.0);
}
