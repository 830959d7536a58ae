#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "rdode/errors.hpp"
#include "rdode/linearize.hpp"
#include "rdode/model.hpp"
#include "rdode/spectra.hpp"
#include "rdode/steady.hpp"

using namespace rdode;

namespace {

// Constant-coefficient scalar pair f = a u + b v, g = c u + d v.
ModelSpec linear_model(double a, double b, double c, double d, double diffusion) {
  ModelSpec model;
  model.m = 1;
  model.k = 1;
  model.diffusion = Eigen::VectorXd::Constant(1, diffusion);
  model.name = "linear_test";
  model.reaction = [a, b, c, d](const Eigen::VectorXd& u, const Eigen::VectorXd& v, double,
                                Eigen::VectorXd& f, Eigen::VectorXd& g) {
    f.resize(1);
    g.resize(1);
    f[0] = a * u[0] + b * v[0];
    g[0] = c * u[0] + d * v[0];
  };
  model.reaction_jacobian = [a, b, c, d](const Eigen::VectorXd&, const Eigen::VectorXd&, double) {
    Eigen::MatrixXd J(2, 2);
    J << a, b, c, d;
    return J;
  };
  return model;
}

SpectrumReport spectrum_of_constant(const ModelSpec& model, const Eigen::VectorXd& guess,
                                    const Grid& grid, double tol = 0.0) {
  const SteadyState steady = find_constant_steady(model, guess, grid);
  const JacobianField jac = jacobian_field(model, steady, grid);
  const DiscreteOperator op = assemble_operator(jac, grid, model.diffusion);
  return compute_spectrum(op, jac, grid, tol);
}

std::vector<Complex> by_descending_real(std::vector<Complex> eigs) {
  std::sort(eigs.begin(), eigs.end(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  return eigs;
}

// Upper intersection of the default cubic nullcline with the line v = u, and
// the ODE-block value there.
constexpr double kU2 = 2.3660254037844384;
constexpr double kAStarAtU2 = -5.0980762113533107;

// Middle intersection u1; the cubic has negative slope there, so the ODE block
// is positive and the constant state is unstable at every grid size.
constexpr double kU1 = 0.6339745962155614;
constexpr double kAStarAtU1 = 0.098076211353316012;

// Four rightmost eigenvalues of the n = 8, diffusion 1e-2 operator at the
// upper constant state, from the independent per-mode assembly.
constexpr double kRightmost4[4] = {-0.76900364135051791, -0.86140010583424531,
                                   -1.1233158271651527, -1.5113587464111704};

}  // namespace

TEST_CASE("constant-state eigenvalues match the independent per-mode assembly") {
  const Grid grid = Grid::make(8);
  const ModelSpec model = build_hysteresis_model(hysteresis_default());
  const SpectrumReport report =
      spectrum_of_constant(model, Eigen::Vector2d(kU2, kU2), grid);

  std::vector<Complex> all = report.discrete_eigs;
  all.insert(all.end(), report.essential_cluster_eigs.begin(),
             report.essential_cluster_eigs.end());
  REQUIRE(all.size() == 16);
  all = by_descending_real(all);
  for (int j = 0; j < 4; ++j) {
    CHECK(all[j].real() == doctest::Approx(kRightmost4[j]).epsilon(1e-12));
    CHECK(std::abs(all[j].imag()) <= 1e-12);
  }
  CHECK(report.s_inf == doctest::Approx(kRightmost4[0]).epsilon(1e-12));
  CHECK(report.s_L == doctest::Approx(kRightmost4[0]).epsilon(1e-12));
}

TEST_CASE("essential samples replicate the ODE block at every node") {
  const Grid grid = Grid::make(8);
  const ModelSpec model = build_hysteresis_model(hysteresis_default());
  const SteadyState steady = find_constant_steady(model, Eigen::Vector2d(kU2, kU2), grid);
  const JacobianField jac = jacobian_field(model, steady, grid);
  const std::vector<Complex> samples = essential_spectrum(jac);
  REQUIRE(samples.size() == 8);
  for (const Complex& z : samples) {
    CHECK(z.real() == doctest::Approx(kAStarAtU2).epsilon(1e-13));
    CHECK(z.imag() == 0.0);
  }
}

TEST_CASE("essential samples along a jump pattern track the nodal cubic slope") {
  const Grid grid = Grid::make(32);
  const ModelSpec model = build_hysteresis_model(stable_hysteresis_params());
  const SteadyState pattern = solve_hysteresis_pattern(model, 0.5, grid);
  const JacobianField jac = jacobian_field(model, pattern, grid);
  const std::vector<Complex> samples = essential_spectrum(jac);
  REQUIRE(samples.size() == 32);
  const auto& coeffs = model.hysteresis->p_coeffs;
  for (int i = 0; i < 32; ++i) {
    CHECK(samples[i].real() ==
          doctest::Approx(-cubic_dp(coeffs, pattern.field.u(0, i))).epsilon(1e-13));
    CHECK(samples[i].imag() == 0.0);
  }
}

TEST_CASE("an oversized tolerance discards every eigenvalue") {
  const Grid grid = Grid::make(12);
  const ModelSpec model = build_hysteresis_model(hysteresis_default());
  const SpectrumReport report =
      spectrum_of_constant(model, Eigen::Vector2d(kU2, kU2), grid, 1e9);
  CHECK(report.discrete_eigs.empty());
  CHECK(report.essential_cluster_eigs.size() == 24);
  CHECK(std::isinf(report.s_inf));
  CHECK(report.s_inf < 0.0);
  CHECK(report.s_L == report.s_A);
}

TEST_CASE("tolerance filtering requires a positive tolerance") {
  const Grid grid = Grid::make(8);
  const ModelSpec model = linear_model(-1.0, 0.0, 0.0, -1.0, 0.1);
  const SteadyState zero{StateField::zero(1, 1, 8), 0.0, {}, {}};
  const JacobianField jac = jacobian_field(model, zero, grid);
  const DiscreteOperator op = assemble_operator(jac, grid, model.diffusion);
  CHECK_THROWS_AS(discrete_eigenvalues(op, {}, 0.0), InvalidParams);
  CHECK_THROWS_AS(discrete_eigenvalues(op, {}, -1.0), InvalidParams);
}

TEST_CASE("shooting mismatch changes sign across filtered eigenvalues") {
  const Grid grid = Grid::make(64);
  const ModelSpec model = build_hysteresis_model(hysteresis_default());
  const SteadyState steady = find_constant_steady(model, Eigen::Vector2d(kU2, kU2), grid);
  const JacobianField jac = jacobian_field(model, steady, grid);
  const DiscreteOperator op = assemble_operator(jac, grid, model.diffusion);
  const SpectrumReport report = compute_spectrum(op, jac, grid);
  REQUIRE(report.discrete_eigs.size() >= 2);

  const std::vector<Complex> kept = by_descending_real(report.discrete_eigs);
  const double d = model.diffusion[0];
  for (int j = 0; j < 2; ++j) {
    const double lambda = kept[j].real();
    const Complex left = evans_function(jac, grid, d, Complex(lambda - 0.02, 0.0));
    const Complex right = evans_function(jac, grid, d, Complex(lambda + 0.02, 0.0));
    CHECK(left.real() * right.real() < 0.0);
    CHECK(std::abs(left.imag()) <= 1e-10);
    CHECK(std::abs(right.imag()) <= 1e-10);
  }
}

TEST_CASE("shooting mismatch stays nonzero to the right of the spectrum") {
  const Grid grid = Grid::make(64);
  const ModelSpec model = build_hysteresis_model(hysteresis_default());
  const SteadyState steady = find_constant_steady(model, Eigen::Vector2d(kU2, kU2), grid);
  const JacobianField jac = jacobian_field(model, steady, grid);
  for (const double lambda : {0.0, 1.0, 5.0}) {
    const Complex value = evans_function(jac, grid, model.diffusion[0], Complex(lambda, 0.0));
    CHECK(value.real() > 0.0);
  }
}

TEST_CASE("shooting mismatch rejects arguments on the essential samples") {
  const Grid grid = Grid::make(16);
  const ModelSpec model = build_hysteresis_model(hysteresis_default());
  const SteadyState steady = find_constant_steady(model, Eigen::Vector2d(kU2, kU2), grid);
  const JacobianField jac = jacobian_field(model, steady, grid);
  CHECK_THROWS_AS(evans_function(jac, grid, 1e-2, Complex(kAStarAtU2, 0.0)),
                  ResolventSingular);
  CHECK_THROWS_AS(evans_function(jac, grid, 0.0, Complex(1.0, 0.0)), InvalidParams);
}

TEST_CASE("shooting mismatch requires one component of each kind") {
  ModelSpec wide;
  wide.m = 2;
  wide.k = 1;
  wide.diffusion = Eigen::VectorXd::Constant(1, 0.1);
  wide.reaction = [](const Eigen::VectorXd& u, const Eigen::VectorXd& v, double,
                     Eigen::VectorXd& f, Eigen::VectorXd& g) {
    f = -u;
    g = -v;
  };
  wide.reaction_jacobian = [](const Eigen::VectorXd&, const Eigen::VectorXd&, double) {
    return Eigen::MatrixXd(-Eigen::MatrixXd::Identity(3, 3));
  };
  const Grid grid = Grid::make(8);
  const JacobianField jac = jacobian_field(wide, StateField::zero(2, 1, 8), grid);
  CHECK_THROWS_AS(evans_function(jac, grid, 0.1, Complex(1.0, 0.0)), UnsupportedShape);
  CHECK_THROWS_AS(check_sufficient_stability(jac), UnsupportedShape);
}

TEST_CASE("pointwise condition passes along the stable jump pattern") {
  const Grid grid = Grid::make(64);
  const ModelSpec model = build_hysteresis_model(stable_hysteresis_params());
  const SteadyState pattern = solve_hysteresis_pattern(model, 0.5, grid);
  const JacobianField jac = jacobian_field(model, pattern, grid);
  const SufficientReport rep = check_sufficient_stability(jac);
  CHECK(rep.passed);
  CHECK(rep.cond_A);
  CHECK(rep.cond_D);
  CHECK(rep.cond_det);
  CHECK(rep.max_A_star <= -1e-10);
  CHECK(rep.max_D_star == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(rep.min_det > 1e-10);

  const DiscreteOperator op = assemble_operator(jac, grid, model.diffusion);
  const SpectrumReport report = compute_spectrum(op, jac, grid);
  const Verdict verdict = classify(report, default_margin(report));
  CHECK(verdict.label == "Stable");
  CHECK(report.s_L < 0.0);
}

TEST_CASE("pointwise condition fails at the middle constant state") {
  const Grid grid = Grid::make(16);
  const ModelSpec model = build_hysteresis_model(hysteresis_default());
  const SteadyState steady = find_constant_steady(model, Eigen::Vector2d(kU1, kU1), grid);
  const JacobianField jac = jacobian_field(model, steady, grid);
  const SufficientReport rep = check_sufficient_stability(jac);
  CHECK_FALSE(rep.passed);
  CHECK_FALSE(rep.cond_A);
  CHECK(rep.max_A_star == doctest::Approx(kAStarAtU1).epsilon(1e-12));
}

TEST_CASE("middle constant state classifies unstable through the ODE block") {
  const Grid grid = Grid::make(16);
  const ModelSpec model = build_hysteresis_model(hysteresis_default());
  const SpectrumReport report = spectrum_of_constant(model, Eigen::Vector2d(kU1, kU1), grid);
  CHECK(report.s_A == doctest::Approx(kAStarAtU1).epsilon(1e-12));
  const Verdict verdict = classify(report, default_margin(report));
  CHECK(verdict.label == "Unstable");
  REQUIRE(!verdict.reasons.empty());
  bool names_ode_block = false;
  for (const std::string& reason : verdict.reasons)
    if (reason.find("s(A*) > 0") != std::string::npos) names_ode_block = true;
  CHECK(names_ode_block);
}

TEST_CASE("monotone-nullcline front fails the determinant condition and is unstable") {
  const int n = 64;
  const Grid grid = Grid::make(n);
  const ModelSpec model = build_hysteresis_model(bistable_default());
  StateField sigmoid = StateField::zero(1, 1, n);
  for (int i = 0; i < n; ++i) {
    const double s = 0.5 + 0.5 * std::tanh((grid.nodes[i] - 0.5) / 0.1);
    sigmoid.u(0, i) = s;
    sigmoid.v(0, i) = s;
  }
  const SteadyState front = solve_newton_steady(model, sigmoid, grid);
  REQUIRE(front.field.u.maxCoeff() - front.field.u.minCoeff() > 0.5);

  const JacobianField jac = jacobian_field(model, front, grid);
  const SufficientReport rep = check_sufficient_stability(jac);
  CHECK_FALSE(rep.passed);
  CHECK(rep.cond_A);
  CHECK(rep.cond_D);
  CHECK_FALSE(rep.cond_det);
  CHECK(rep.min_det < 0.0);

  const DiscreteOperator op = assemble_operator(jac, grid, model.diffusion);
  const SpectrumReport report = compute_spectrum(op, jac, grid);
  CHECK(report.s_A < 0.0);
  CHECK(report.s_inf > 0.0);
  const Verdict verdict = classify(report, default_margin(report));
  CHECK(verdict.label == "Unstable");
  bool names_discrete = false;
  for (const std::string& reason : verdict.reasons)
    if (reason.find("positive discrete eigenvalue") != std::string::npos) names_discrete = true;
  CHECK(names_discrete);
}

TEST_CASE("zero reaction sits in the dead zone and stays inconclusive") {
  const Grid grid = Grid::make(16);
  const ModelSpec model = linear_model(0.0, 0.0, 0.0, 0.0, 0.3);
  const SpectrumReport report =
      spectrum_of_constant(model, Eigen::Vector2d(0.0, 0.0), grid);
  CHECK(report.s_A == 0.0);
  CHECK(std::abs(report.s_L) <= 1e-12);
  const Verdict verdict = classify(report, default_margin(report));
  CHECK(verdict.label == "Inconclusive");
  REQUIRE(!verdict.reasons.empty());
  CHECK(verdict.reasons[0].find("dead zone") != std::string::npos);
}

TEST_CASE("classification refuses a non-positive margin") {
  SpectrumReport report;
  report.s_A = -1.0;
  report.s_L = -1.0;
  CHECK_THROWS_AS(classify(report, 0.0), InvalidParams);
  CHECK_THROWS_AS(classify(report, -1e-3), InvalidParams);
}

TEST_CASE("spectrum is invariant under rescaling the non-diffusing component") {
  const Grid grid = Grid::make(24);
  const ModelSpec base = linear_model(-1.2, 0.8, 0.5, -2.0, 0.07);
  const ModelSpec scaled = linear_model(-1.2, 3.0 * 0.8, 0.5 / 3.0, -2.0, 0.07);
  const SpectrumReport a = spectrum_of_constant(base, Eigen::Vector2d(0.0, 0.0), grid);
  const SpectrumReport b = spectrum_of_constant(scaled, Eigen::Vector2d(0.0, 0.0), grid);

  std::vector<Complex> ea = a.discrete_eigs, eb = b.discrete_eigs;
  ea.insert(ea.end(), a.essential_cluster_eigs.begin(), a.essential_cluster_eigs.end());
  eb.insert(eb.end(), b.essential_cluster_eigs.begin(), b.essential_cluster_eigs.end());
  ea = by_descending_real(ea);
  eb = by_descending_real(eb);
  REQUIRE(ea.size() == eb.size());
  for (size_t i = 0; i < ea.size(); ++i) CHECK(std::abs(ea[i] - eb[i]) <= 1e-9);
}

TEST_CASE("fields passing the pointwise condition have no unstable eigenvalue") {
  const Grid grid = Grid::make(32);
  std::mt19937_64 gen(97);
  const auto uniform = [&gen]() { return (gen() >> 11) * 0x1.0p-53; };
  for (int trial = 0; trial < 10; ++trial) {
    const double A = -(0.5 + 2.5 * uniform());
    const double D = -(0.1 + 1.9 * uniform());
    const double B = 2.0 * (2.0 * uniform() - 1.0);
    if (std::abs(B) < 1e-3) continue;
    const double C = 0.9 * (A * D - 0.05) / B * (2.0 * uniform() - 1.0);
    const double diffusion = std::pow(10.0, -3.0 + 2.0 * uniform());
    const ModelSpec model = linear_model(A, B, C, D, diffusion);
    const SteadyState zero{StateField::zero(1, 1, 32), 0.0, {}, {}};
    const JacobianField jac = jacobian_field(model, zero, grid);
    REQUIRE(check_sufficient_stability(jac).passed);
    const DiscreteOperator op = assemble_operator(jac, grid, model.diffusion);
    const auto [kept, discarded] = discrete_eigenvalues(op, {}, 1e-300);
    CHECK(discarded.empty());
    for (const Complex& z : kept) CHECK(z.real() < 1e-8);
  }
}

TEST_CASE("default tolerance scales with grid spacing and sample spread") {
  const Grid coarse = Grid::make(10);
  const Grid fine = Grid::make(100);
  CHECK(default_tol_ess(coarse, {}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(default_tol_ess(fine, {}) == doctest::Approx(0.1).epsilon(1e-15));
  const std::vector<Complex> spread = {Complex(1.0, 2.0), Complex(3.0, -1.0)};
  CHECK(default_tol_ess(fine, spread) == doctest::Approx(0.6).epsilon(1e-14));
}

TEST_CASE("default margin keeps an absolute floor") {
  SpectrumReport report;
  report.s_A = -2.5;
  CHECK(default_margin(report) == doctest::Approx(2.5e-4).epsilon(1e-15));
  report.s_A = -0.3;
  CHECK(default_margin(report) == doctest::Approx(1e-4).epsilon(1e-15));
}

TEST_CASE("spectral bound combines both parts and tolerates an empty discrete set") {
  SpectrumReport report;
  report.s_A = -1.0;
  CHECK(spectral_bound(report) == -1.0);
  report.s_inf = -0.25;
  CHECK(spectral_bound(report) == -0.25);
}

TEST_CASE("hull flag keeps only strictly enclosed eigenvalues") {
  const std::vector<Complex> corners = {Complex(0, 0), Complex(4, 0), Complex(0, 4),
                                        Complex(4, 4)};
  const std::vector<Complex> eigs = {Complex(2, 2), Complex(5, 1), Complex(2, 0),
                                     Complex(-1, -1)};
  const std::vector<Complex> inside = enclosed_candidates(corners, eigs);
  REQUIRE(inside.size() == 1);
  CHECK(inside[0] == Complex(2, 2));

  // Fewer than three distinct samples span no area, so nothing is enclosed.
  CHECK(enclosed_candidates({Complex(0, 0), Complex(1, 0)}, eigs).empty());
}

TEST_CASE("mode-one eigenvalue converges at second order under refinement") {
  const ModelSpec model = build_hysteresis_model(hysteresis_default());
  const Eigen::Vector2d guess(kU2, kU2);
  double lambda[3];
  int idx = 0;
  for (const int n : {16, 32, 64}) {
    const SpectrumReport report = spectrum_of_constant(model, guess, Grid::make(n));
    REQUIRE(report.discrete_eigs.size() >= 2);
    lambda[idx++] = by_descending_real(report.discrete_eigs)[1].real();
  }
  const double ratio = (lambda[0] - lambda[1]) / (lambda[1] - lambda[2]);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}
