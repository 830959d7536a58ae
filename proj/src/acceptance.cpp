#include "rdode/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include "rdode/dynamics.hpp"
#include "rdode/errors.hpp"
#include "rdode/spectra.hpp"

namespace rdode {

namespace {

struct Setup {
  int default_n;
  int min_n;
  int max_n;
};

double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

std::vector<Complex> all_eigenvalues(const DiscreteOperator& op) {
  return discrete_eigenvalues(op, {}, 1.0).first;
}

SteadyState stable_jump_pattern(const ModelSpec& model, int n) {
  return solve_hysteresis_pattern(model, 0.5, Grid::make(n));
}

SpectrumReport spectrum_at(const ModelSpec& model, const SteadyState& steady, const Grid& grid) {
  const JacobianField jac = jacobian_field(model, steady, grid);
  const DiscreteOperator op = assemble_operator(jac, grid, model.diffusion);
  return compute_spectrum(op, jac, grid);
}

// The envelope and terminal-decay checks shared by the three perturbation
// kinds of the nonlinear stability criterion.
void check_decay_trace(const SimulationTrace& trace, double s_L, double& worst_envelope,
                       double& worst_final) {
  const double rate = s_L + 0.1 * std::abs(s_L);
  const double initial = trace.sup_norms.front();
  for (size_t i = 0; i < trace.times.size(); ++i) {
    const double bound = 10.0 * std::exp(rate * trace.times[i]) * initial;
    worst_envelope = std::max(worst_envelope, trace.sup_norms[i] / bound);
  }
  worst_final = std::max(worst_final, trace.sup_norms.back() / initial);
}

void criterion_mode_decoupling(int n, CriterionResult& result) {
  const ModelSpec model = build_hysteresis_model(hysteresis_default());
  const HysteresisGeometry geo = hysteresis_geometry(*model.hysteresis);
  const Grid grid = Grid::make(n);
  Eigen::VectorXd guess(2);
  guess << geo.u2, geo.v2;
  const SteadyState s2 = find_constant_steady(model, guess, grid);
  const JacobianField jac = jacobian_field(model, s2, grid);
  const DiscreteOperator op = assemble_operator(jac, grid, model.diffusion);
  std::vector<Complex> assembled = all_eigenvalues(op);

  // Independent side: the operator decouples over the cosine modes, leaving a
  // quadratic characteristic polynomial per mode, solved in closed form.
  const double d = model.diffusion[0];
  const double A = jac.A_star[0](0, 0), B = jac.B_star[0](0, 0);
  const double C = jac.C_star[0](0, 0), D = jac.D_star[0](0, 0);
  std::vector<Complex> modal;
  for (int j = 0; j < n; ++j) {
    const double Dj = D + d * laplacian_mode_eigenvalue(grid, j);
    const Complex tr(A + Dj, 0.0), det(A * Dj - B * C, 0.0);
    const Complex root = std::sqrt(tr * tr - 4.0 * det);
    modal.push_back(0.5 * (tr + root));
    modal.push_back(0.5 * (tr - root));
  }

  auto by_re_desc = [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  };
  std::sort(assembled.begin(), assembled.end(), by_re_desc);
  std::sort(modal.begin(), modal.end(), by_re_desc);

  double worst = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double rel = std::abs(assembled[i] - modal[i]) / std::max(1.0, std::abs(modal[i]));
    worst = std::max(worst, rel);
  }
  result.measured.emplace_back("max_relative_error", worst);
  result.passed = worst <= 1e-8;
}

void criterion_growth_bound(int n, CriterionResult& result) {
  const ModelSpec model = build_hysteresis_model(stable_hysteresis_params());
  const Grid grid = Grid::make(n);
  const SteadyState pattern = stable_jump_pattern(model, n);
  const JacobianField jac = jacobian_field(model, pattern, grid);
  const DiscreteOperator op = assemble_operator(jac, grid, model.diffusion);
  double s_max = -std::numeric_limits<double>::infinity();
  for (const Complex& z : all_eigenvalues(op)) s_max = std::max(s_max, z.real());

  const StateField xi0 = perturb_uniform_random(1, 1, n, 1e-3, 2024);
  const SimulationTrace trace = simulate_linear(op, xi0, 20.0 / std::abs(s_max), 0.01);
  const RateFit fit = estimate_rate(trace, 0.3);

  result.measured.emplace_back("fitted_rate", fit.rate);
  result.measured.emplace_back("max_re_eigenvalue", s_max);
  result.passed = std::abs(fit.rate - s_max) <= 0.02 * std::abs(s_max);
}

void criterion_nonlinear_stability(int n, CriterionResult& result) {
  const ModelSpec model = build_hysteresis_model(stable_hysteresis_params());
  const Grid grid = Grid::make(n);
  const SteadyState pattern = stable_jump_pattern(model, n);
  const JacobianField jac = jacobian_field(model, pattern, grid);
  const DiscreteOperator op = assemble_operator(jac, grid, model.diffusion);
  const SpectrumReport report = compute_spectrum(op, jac, grid);
  const double s_L = report.s_L;
  if (s_L >= 0.0) {
    result.notes = "pattern not classified stable; decay envelope unavailable";
    result.passed = false;
    return;
  }

  const double amplitude = 1e-3;
  std::vector<StateField> kinds;
  kinds.push_back(perturb_eigenmode(op, amplitude));
  kinds.push_back(perturb_uniform_random(1, 1, n, amplitude, 7));
  kinds.push_back(perturb_indicator_bump(1, 1, grid, 0.25, 0.5, amplitude));

  const double t_end = 15.0 / std::abs(s_L);
  const double dt = default_dt(s_L);
  double worst_envelope = 0.0, worst_final = 0.0;
  for (const StateField& xi0 : kinds) {
    const SimulationTrace trace = simulate(model, pattern, xi0, t_end, dt);
    check_decay_trace(trace, s_L, worst_envelope, worst_final);
  }
  result.measured.emplace_back("s_L", s_L);
  result.measured.emplace_back("worst_envelope_ratio", worst_envelope);
  result.measured.emplace_back("worst_final_over_initial", worst_final);
  result.passed = worst_envelope <= 1.0 && worst_final <= 1e-5;
}

void criterion_front_instability(int n, CriterionResult& result) {
  const ModelSpec model = build_hysteresis_model(bistable_default());
  const Grid grid = Grid::make(n);
  StateField sigmoid = StateField::zero(1, 1, n);
  for (int i = 0; i < n; ++i) {
    const double s = 0.5 + 0.5 * std::tanh((grid.nodes[i] - 0.5) / 0.1);
    sigmoid.u(0, i) = s;
    sigmoid.v(0, i) = s;
  }
  const SteadyState front = solve_newton_steady(model, sigmoid, grid);
  const double swing = front.field.u.maxCoeff() - front.field.u.minCoeff();
  if (swing < 0.5) {
    result.notes = "Newton collapsed the sigmoid onto a constant state";
    result.passed = false;
    return;
  }

  const JacobianField jac = jacobian_field(model, front, grid);
  const DiscreteOperator op = assemble_operator(jac, grid, model.diffusion);
  const SpectrumReport report = compute_spectrum(op, jac, grid);
  const Verdict verdict = classify(report, default_margin(report));
  const bool unstable_by_eig = verdict.label == "Unstable" && report.s_inf > 0.0;

  const StateField xi0 = perturb_eigenmode(op, 1e-6);
  const double s_L = report.s_L;
  SimulationTrace trace = simulate(model, front, xi0, 12.0 / s_L, default_dt(s_L));
  // Fit over the stretch where the deviation is still within the linear range.
  SimulationTrace window = trace;
  size_t cut = trace.sup_norms.size();
  for (size_t i = 0; i < trace.sup_norms.size(); ++i)
    if (trace.sup_norms[i] > 1e-2) {
      cut = i;
      break;
    }
  window.times.assign(trace.times.begin(), trace.times.begin() + cut);
  window.sup_norms.assign(trace.sup_norms.begin(), trace.sup_norms.begin() + cut);
  window.l2_norms.assign(trace.l2_norms.begin(), trace.l2_norms.begin() + cut);
  const RateFit fit = estimate_rate(window, 0.5);

  result.measured.emplace_back("s_L", s_L);
  result.measured.emplace_back("fitted_rate", fit.rate);
  result.measured.emplace_back("u_swing", swing);
  result.passed = unstable_by_eig && std::abs(fit.rate - s_L) <= 0.1 * std::abs(s_L);
}

void criterion_ddi_classes(int n, CriterionResult& result) {
  const ModelSpec model = build_ddi_model(ddi_default());
  const Grid grid = Grid::make(n);
  const DdiBranchTable table = ddi_branch_table(*model.ddi);

  TwoBranchProblem lower;
  lower.u_before = [table](double v) { return table.u0(v); };
  lower.u_after = [table](double v) { return table.u_minus(v); };
  lower.label_before = "u0";
  lower.label_after = "u-";
  lower.v_min = 0.0;
  const SteadyState mixed = solve_two_branch_pattern(model, lower, 0.3, model.diffusion[0], grid);
  const SpectrumReport mixed_report = spectrum_at(model, mixed, grid);
  const Verdict mixed_verdict = classify(mixed_report, default_margin(mixed_report));
  bool has_minus = false;
  for (const std::string& label : mixed.branch_labels) has_minus |= label == "u-";
  const bool part_a =
      has_minus && mixed_report.s_A > 0.0 && mixed_verdict.label == "Unstable";

  TwoBranchProblem upper;
  upper.u_before = [table](double v) { return table.u0(v); };
  upper.u_after = [table](double v) { return table.u_plus(v); };
  upper.label_before = "u0";
  upper.label_after = "u+";
  upper.v_min = 0.0;
  const SteadyState stable = solve_two_branch_pattern(model, upper, 0.25, model.diffusion[0], grid);
  double min_plus_u = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    if (stable.branch_labels[i] == "u+") min_plus_u = std::min(min_plus_u, stable.field.u(0, i));
  const JacobianField stable_jac = jacobian_field(model, stable, grid);
  const SufficientReport sufficient = check_sufficient_stability(stable_jac);
  const SpectrumReport stable_report = spectrum_at(model, stable, grid);
  const Verdict stable_verdict = classify(stable_report, default_margin(stable_report));
  const bool part_b = sufficient.passed && stable_report.s_L < 0.0 &&
                      stable_verdict.label == "Stable" &&
                      min_plus_u > 1.0 / std::sqrt(model.ddi->kappa);

  result.measured.emplace_back("mixed_s_A", mixed_report.s_A);
  result.measured.emplace_back("stable_s_L", stable_report.s_L);
  result.measured.emplace_back("stable_min_uplus", min_plus_u);
  result.passed = part_a && part_b;
  if (!part_a) result.notes += "class-u- pattern not flagged unstable; ";
  if (!part_b) result.notes += "class-u0/u+ pattern not certified stable; ";
}

void criterion_pointwise_condition(int n, CriterionResult& result) {
  const Grid grid = Grid::make(n);
  std::mt19937_64 gen(42);
  double worst = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 20; ++trial) {
    JacobianField jac;
    jac.m = jac.k = 1;
    jac.n = n;
    jac.A_star.resize(n);
    jac.B_star.resize(n);
    jac.C_star.resize(n);
    jac.D_star.resize(n);
    for (int i = 0; i < n; ++i) {
      const double A = -(0.5 + 2.5 * uniform01(gen));
      const double D = -(0.1 + 1.9 * uniform01(gen));
      const double B = 2.0 * (2.0 * uniform01(gen) - 1.0);
      const double slack = A * D - 0.05;
      const double C = B != 0.0 ? 0.9 * slack / B * (2.0 * uniform01(gen) - 1.0)
                                : 2.0 * uniform01(gen) - 1.0;
      jac.A_star[i] = Eigen::MatrixXd::Constant(1, 1, A);
      jac.B_star[i] = Eigen::MatrixXd::Constant(1, 1, B);
      jac.C_star[i] = Eigen::MatrixXd::Constant(1, 1, C);
      jac.D_star[i] = Eigen::MatrixXd::Constant(1, 1, D);
    }
    if (!check_sufficient_stability(jac).passed) {
      result.notes = "generated field missed the pointwise condition";
      result.passed = false;
      return;
    }
    const double d = std::pow(10.0, -3.0 + 2.0 * uniform01(gen));
    const DiscreteOperator op =
        assemble_operator(jac, grid, Eigen::VectorXd::Constant(1, d));
    for (const Complex& z : all_eigenvalues(op)) worst = std::max(worst, z.real());
  }
  result.measured.emplace_back("max_re_over_20_fields", worst);
  result.passed = worst < 1e-8;
}

void criterion_quadratic_remainder(int n, CriterionResult& result) {
  struct Case {
    ModelSpec model;
    SteadyState steady;
    int n;
  };
  std::vector<Case> cases;

  const ModelSpec hyst = build_hysteresis_model(hysteresis_default());
  const HysteresisGeometry geo = hysteresis_geometry(*hyst.hysteresis);
  const Grid grid = Grid::make(n);
  Eigen::VectorXd guess(2);
  guess << geo.u2, geo.v2;
  cases.push_back({hyst, find_constant_steady(hyst, guess, grid), n});

  const ModelSpec bistable = build_hysteresis_model(bistable_default());
  guess << 1.0, 1.0;
  cases.push_back({bistable, find_constant_steady(bistable, guess, grid), n});

  const ModelSpec ddi = build_ddi_model(ddi_default());
  guess << 0.0, 0.0;
  cases.push_back({ddi, find_constant_steady(ddi, guess, grid), n});

  if (n >= 32) {
    const ModelSpec stable_model = build_hysteresis_model(stable_hysteresis_params());
    cases.push_back({stable_model, stable_jump_pattern(stable_model, n), n});
  }

  double worst = 0.0;
  for (const Case& item : cases) {
    const Grid case_grid = Grid::make(item.n);
    for (int j = 0; j < 20; ++j) {
      StateField xi = perturb_uniform_random(1, 1, item.n, 1.0, 100 + j);
      xi = (1.0 / xi.sup_norm()) * xi;
      const double r3 =
          nonlinear_remainder(item.model, item.steady, 1e-3 * xi, case_grid).sup_norm() / 1e-6;
      const double r4 =
          nonlinear_remainder(item.model, item.steady, 1e-4 * xi, case_grid).sup_norm() / 1e-8;
      worst = std::max(worst, std::abs(r3 - r4) / r4);
    }
  }
  result.measured.emplace_back("worst_ratio_variation", worst);
  result.passed = worst < 0.05;
}

void criterion_mild_solution_agreement(int n, CriterionResult& result) {
  struct Case {
    ModelSpec model;
    SteadyState steady;
  };
  std::vector<Case> cases;
  const Grid grid = Grid::make(n);

  const ModelSpec hyst = build_hysteresis_model(hysteresis_default());
  const HysteresisGeometry geo = hysteresis_geometry(*hyst.hysteresis);
  Eigen::VectorXd guess(2);
  guess << geo.u2, geo.v2;
  cases.push_back({hyst, find_constant_steady(hyst, guess, grid)});

  const ModelSpec bistable = build_hysteresis_model(bistable_default());
  guess << 1.0, 1.0;
  cases.push_back({bistable, find_constant_steady(bistable, guess, grid)});

  const ModelSpec ddi = build_ddi_model(ddi_default());
  guess << 0.0, 0.0;
  cases.push_back({ddi, find_constant_steady(ddi, guess, grid)});

  if (n >= 32) {
    const ModelSpec stable_model = build_hysteresis_model(stable_hysteresis_params());
    cases.push_back({stable_model, stable_jump_pattern(stable_model, n)});
  }

  double worst_distance = 0.0, worst_ratio = 0.0;
  for (const Case& item : cases) {
    const JacobianField jac = jacobian_field(item.model, item.steady, grid);
    const DiscreteOperator op = assemble_operator(jac, grid, item.model.diffusion);
    const StateField xi0 = perturb_uniform_random(1, 1, n, 1e-2, 313);
    auto [mild_final, gaps] = picard_mild(op, item.model, item.steady, xi0, 0.1, 64, 6);
    const SimulationTrace trace = simulate(item.model, item.steady, xi0, 0.1, 1e-4, 1000);
    const StateField final_state = trace.snapshots.back();
    worst_distance = std::max(worst_distance, (mild_final - final_state).sup_norm());
    for (size_t i = 2; i < gaps.size(); ++i)
      if (gaps[i - 1] > 1e-12)
        worst_ratio = std::max(worst_ratio, gaps[i] / gaps[i - 1]);
  }
  result.measured.emplace_back("worst_final_distance", worst_distance);
  result.measured.emplace_back("worst_gap_ratio", worst_ratio);
  result.passed = worst_distance <= 1e-4 && worst_ratio <= 0.6;
}

void criterion_heat_exactness(int n, CriterionResult& result) {
  const Grid grid = Grid::make(n);
  const Eigen::VectorXd c3 = cosine_modes(grid).col(3);
  const double t = 0.1;
  const Eigen::VectorXd propagated = heat_propagate(grid, 1.0, c3, t);
  const Eigen::VectorXd expected = std::exp(laplacian_mode_eigenvalue(grid, 3) * t) * c3;
  const double mode_error = (propagated - expected).cwiseAbs().maxCoeff();

  std::mt19937_64 gen(5);
  Eigen::VectorXd field(n);
  for (int i = 0; i < n; ++i) field[i] = 2.0 * uniform01(gen) - 1.0;
  const double mean_drift =
      std::abs(heat_propagate(grid, 1.0, field, t).mean() - field.mean());

  result.measured.emplace_back("mode_pointwise_error", mode_error);
  result.measured.emplace_back("mean_drift", mean_drift);
  result.passed = mode_error <= 1e-12 && mean_drift <= 1e-12;
}

void criterion_eigenvalue_convergence(int n, CriterionResult& result) {
  const ModelSpec model = build_hysteresis_model(stable_hysteresis_params());
  std::vector<double> leading;
  for (const int size : {n, 2 * n, 4 * n}) {
    const Grid grid = Grid::make(size);
    const SteadyState pattern = stable_jump_pattern(model, size);
    const SpectrumReport report = spectrum_at(model, pattern, grid);
    leading.push_back(report.s_inf);
  }
  const double ratio = (leading[0] - leading[1]) / (leading[1] - leading[2]);
  result.measured.emplace_back("richardson_ratio", ratio);
  result.measured.emplace_back("leading_coarse", leading[0]);
  result.measured.emplace_back("leading_fine", leading[2]);
  result.passed = ratio >= 3.5 && ratio <= 4.5;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(int grid_n) {
  struct Entry {
    const char* id;
    const char* name;
    Setup setup;
    std::function<void(int, CriterionResult&)> run;
  };
  const std::vector<Entry> entries = {
      {"1", "mode_decoupling_oracle", {128, 8, 2048}, criterion_mode_decoupling},
      {"2", "growth_bound_matches_spectral_bound", {128, 8, 2048}, criterion_growth_bound},
      {"3", "jump_pattern_nonlinear_decay", {128, 32, 1024}, criterion_nonlinear_stability},
      {"4", "continuous_front_instability", {128, 32, 1024}, criterion_front_instability},
      {"5", "branch_class_stability", {128, 32, 1024}, criterion_ddi_classes},
      {"6", "pointwise_condition_negative_spectrum", {64, 8, 2048}, criterion_pointwise_condition},
      {"7", "quadratic_remainder_scaling", {128, 8, 1024}, criterion_quadratic_remainder},
      {"8", "mild_solution_oracle_agreement", {64, 8, 1024}, criterion_mild_solution_agreement},
      {"9", "heat_propagator_exactness", {64, 8, 4096}, criterion_heat_exactness},
      {"10", "eigenvalue_grid_convergence", {64, 64, 512}, criterion_eigenvalue_convergence},
  };

  std::vector<CriterionResult> results;
  for (const Entry& entry : entries) {
    CriterionResult result;
    result.id = entry.id;
    result.name = entry.name;
    const int n = grid_n > 0 ? grid_n : entry.setup.default_n;
    if (n < entry.setup.min_n || n > entry.setup.max_n) {
      result.skipped = true;
      result.notes = "needs grid_n in [" + std::to_string(entry.setup.min_n) + ", " +
                     std::to_string(entry.setup.max_n) + "]";
      results.push_back(result);
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      entry.run(n, result);
    } catch (const Error& err) {
      result.passed = false;
      result.notes += std::string("error: ") + err.what();
    }
    result.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(result);
  }
  return results;
}

}  // namespace rdode
