#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rdode/acceptance.hpp"
#include "rdode/dynamics.hpp"
#include "rdode/errors.hpp"
#include "rdode/io.hpp"
#include "rdode/spectra.hpp"

namespace {

using nlohmann::json;

[[noreturn]] void fail_operational(const std::string& kind, const std::string& message) {
  json err;
  err["error"] = kind;
  err["message"] = message;
  std::cerr << err.dump() << "\n";
  std::exit(2);
}

// Maps a thrown solver error to its public name so scripts can dispatch on it.
[[noreturn]] void rethrow_as_operational() {
  try {
    throw;
  } catch (const rdode::InvalidParams& e) {
    fail_operational("InvalidParams", e.what());
  } catch (const rdode::DimensionMismatch& e) {
    fail_operational("DimensionMismatch", e.what());
  } catch (const rdode::NegativeTime& e) {
    fail_operational("NegativeTime", e.what());
  } catch (const rdode::NoConvergence& e) {
    fail_operational("NoConvergence", e.what());
  } catch (const rdode::SingularJacobian& e) {
    fail_operational("SingularJacobian", e.what());
  } catch (const rdode::NoSolution& e) {
    fail_operational("NoSolution", e.what());
  } catch (const rdode::EventNotCrossed& e) {
    fail_operational("EventNotCrossed", e.what());
  } catch (const rdode::BranchUndefined& e) {
    fail_operational("BranchUndefined", e.what());
  } catch (const rdode::EigensolveFailure& e) {
    fail_operational("EigensolveFailure", e.what());
  } catch (const rdode::ResolventSingular& e) {
    fail_operational("ResolventSingular", e.what());
  } catch (const rdode::UnsupportedShape& e) {
    fail_operational("UnsupportedShape", e.what());
  } catch (const rdode::Divergence& e) {
    fail_operational("Divergence", e.what());
  } catch (const rdode::InsufficientData& e) {
    fail_operational("InsufficientData", e.what());
  } catch (const rdode::NonPositiveNorms& e) {
    fail_operational("NonPositiveNorms", e.what());
  } catch (const rdode::BlowUp& e) {
    fail_operational("BlowUp", e.what());
  } catch (const rdode::Error& e) {
    fail_operational("Error", e.what());
  } catch (const json::exception& e) {
    fail_operational("ConfigParse", e.what());
  } catch (const std::exception& e) {
    fail_operational("Internal", e.what());
  }
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      fail_operational("InvalidParams", "unknown key '" + item.key() + "' in " + where);
}

const json* find_key(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double require_number(const json& obj, const std::string& key, const std::string& where) {
  const json* value = find_key(obj, key);
  if (!value || !value->is_number())
    fail_operational("InvalidParams", where + " needs numeric field '" + key + "'");
  return value->get<double>();
}

std::string require_string(const json& obj, const std::string& key, const std::string& where) {
  const json* value = find_key(obj, key);
  if (!value || !value->is_string())
    fail_operational("InvalidParams", where + " needs string field '" + key + "'");
  return value->get<std::string>();
}

struct Cli {
  std::string config_path;
  std::string out_dir;
  long long grid_n = 0;
  unsigned long long seed = 0;
  bool seed_given = false;
};

json load_config(const Cli& cli) {
  if (cli.config_path.empty()) return json::object();
  std::ifstream in(cli.config_path);
  if (!in) fail_operational("ConfigParse", "cannot open config file " + cli.config_path);
  json config;
  try {
    config = json::parse(in);
  } catch (const json::exception& e) {
    fail_operational("ConfigParse", e.what());
  }
  if (!config.is_object()) fail_operational("ConfigParse", "config root must be a JSON object");
  reject_unknown_keys(
      config, {"model", "grid_n", "diffusion", "steady", "spectrum", "simulate", "output_dir"},
      "config");
  return config;
}

int resolve_grid_n(const json& config, const Cli& cli) {
  long long n = 512;
  if (const json* value = find_key(config, "grid_n")) {
    if (!value->is_number_integer())
      fail_operational("InvalidParams", "grid_n must be an integer");
    n = value->get<long long>();
  }
  if (cli.grid_n > 0) n = cli.grid_n;
  if (n < 8 || n > 4096)
    fail_operational("InvalidParams", "grid_n must lie in [8, 4096], got " + std::to_string(n));
  return static_cast<int>(n);
}

std::string resolve_out_dir(const json& config, const Cli& cli) {
  std::string dir = ".";
  if (const json* value = find_key(config, "output_dir")) {
    if (!value->is_string()) fail_operational("InvalidParams", "output_dir must be a string");
    dir = value->get<std::string>();
  }
  if (!cli.out_dir.empty()) dir = cli.out_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail_operational("Internal", "cannot create output directory " + dir);
  return dir;
}

rdode::ModelSpec build_model(const json& config) {
  const json* model = find_key(config, "model");
  if (!model) fail_operational("InvalidParams", "config needs a 'model' field");

  std::optional<double> diffusion_override;
  if (const json* value = find_key(config, "diffusion")) {
    if (!value->is_number()) fail_operational("InvalidParams", "diffusion must be a number");
    diffusion_override = value->get<double>();
  }

  auto hysteresis_from = [&](rdode::HysteresisParams params) {
    if (diffusion_override) params.diffusion = *diffusion_override;
    return build_hysteresis_model(params);
  };
  auto ddi_from = [&](rdode::DdiParams params) {
    if (diffusion_override) params.diffusion = *diffusion_override;
    return build_ddi_model(params);
  };

  if (model->is_string()) {
    const std::string name = model->get<std::string>();
    if (name == "hysteresis") return hysteresis_from(rdode::hysteresis_default());
    if (name == "bistable") return hysteresis_from(rdode::bistable_default());
    if (name == "ddi") return ddi_from(rdode::ddi_default());
    fail_operational("InvalidParams", "unknown model name '" + name + "'");
  }
  if (!model->is_object())
    fail_operational("InvalidParams", "model must be a name or an object");

  const std::string type = require_string(*model, "type", "model");
  if (type == "hysteresis") {
    reject_unknown_keys(*model, {"type", "alpha", "beta", "p_coeffs", "diffusion"}, "model");
    rdode::HysteresisParams params;
    params.alpha = require_number(*model, "alpha", "model");
    params.beta = require_number(*model, "beta", "model");
    const json* coeffs = find_key(*model, "p_coeffs");
    if (!coeffs || !coeffs->is_array() || coeffs->size() != 3)
      fail_operational("InvalidParams", "model.p_coeffs must be an array of 3 numbers");
    for (int i = 0; i < 3; ++i) {
      if (!(*coeffs)[i].is_number())
        fail_operational("InvalidParams", "model.p_coeffs must be an array of 3 numbers");
      params.p_coeffs[i] = (*coeffs)[i].get<double>();
    }
    if (const json* value = find_key(*model, "diffusion")) {
      if (!value->is_number()) fail_operational("InvalidParams", "model.diffusion must be a number");
      params.diffusion = value->get<double>();
    }
    return hysteresis_from(params);
  }
  if (type == "ddi") {
    reject_unknown_keys(*model, {"type", "kappa", "mu", "m1", "m2", "diffusion"}, "model");
    rdode::DdiParams params;
    params.kappa = require_number(*model, "kappa", "model");
    params.mu = require_number(*model, "mu", "model");
    params.m1 = require_number(*model, "m1", "model");
    params.m2 = require_number(*model, "m2", "model");
    if (const json* value = find_key(*model, "diffusion")) {
      if (!value->is_number()) fail_operational("InvalidParams", "model.diffusion must be a number");
      params.diffusion = value->get<double>();
    }
    return ddi_from(params);
  }
  fail_operational("InvalidParams", "model.type must be 'hysteresis' or 'ddi'");
}

bool config_fixes_diffusion(const json& config) {
  if (find_key(config, "diffusion")) return true;
  const json* model = find_key(config, "model");
  return model && model->is_object() && find_key(*model, "diffusion");
}

struct SteadyRun {
  rdode::SteadyState steady;
  rdode::Grid grid;
  rdode::ModelSpec model;
  std::string method;
};

// Shoots the jump pattern over a logarithmic diffusion ladder when the config
// leaves the diffusion magnitude open, keeping the first magnitude that admits
// a monotone pattern.
rdode::SteadyState shoot_with_ladder(const rdode::ModelSpec& model, bool diffusion_fixed,
                                     double v_jump, const rdode::Grid& grid,
                                     rdode::ModelSpec& chosen) {
  if (diffusion_fixed) {
    chosen = model;
    return solve_hysteresis_pattern(model, v_jump, grid);
  }
  const double ladder[] = {1e-4, 3.2e-4, 1e-3, 3.2e-3, 1e-2, 3.2e-2, 1e-1};
  std::string failures;
  for (const double d : ladder) {
    rdode::HysteresisParams params = *model.hysteresis;
    params.diffusion = d;
    const rdode::ModelSpec candidate = build_hysteresis_model(params);
    try {
      rdode::SteadyState steady = solve_hysteresis_pattern(candidate, v_jump, grid);
      chosen = candidate;
      return steady;
    } catch (const rdode::Error& e) {
      failures += rdode::format_g17(d) + ": " + e.what() + "; ";
    }
  }
  throw rdode::NoSolution("no diffusion magnitude on the ladder admits a pattern: " + failures);
}

SteadyRun run_steady_section(const json& config, const Cli& cli) {
  const json* section = find_key(config, "steady");
  if (!section || !section->is_object())
    fail_operational("InvalidParams", "config needs a 'steady' object");
  const std::string method = require_string(*section, "method", "steady");
  rdode::ModelSpec model = build_model(config);

  if (method == "constant") {
    reject_unknown_keys(*section, {"method", "guess"}, "steady");
    const json* guess_json = find_key(*section, "guess");
    const int dims = model.m + model.k;
    if (!guess_json || !guess_json->is_array() ||
        static_cast<int>(guess_json->size()) != dims)
      fail_operational("InvalidParams",
                       "steady.guess must be an array of " + std::to_string(dims) + " numbers");
    Eigen::VectorXd guess(dims);
    for (int i = 0; i < dims; ++i) {
      if (!(*guess_json)[i].is_number())
        fail_operational("InvalidParams", "steady.guess entries must be numbers");
      guess[i] = (*guess_json)[i].get<double>();
    }
    const rdode::Grid grid = rdode::Grid::make(resolve_grid_n(config, cli));
    return {find_constant_steady(model, guess, grid), grid, model, method};
  }

  if (method == "hysteresis_shoot") {
    reject_unknown_keys(*section, {"method", "v_jump"}, "steady");
    if (!model.hysteresis)
      fail_operational("InvalidParams", "hysteresis_shoot needs a hysteresis-form model");
    const json* v_jump_json = find_key(*section, "v_jump");
    if (!v_jump_json) fail_operational("InvalidParams", "steady.v_jump is required");
    double v_jump;
    if (v_jump_json->is_string() && v_jump_json->get<std::string>() == "auto") {
      const rdode::HysteresisGeometry geo = hysteresis_geometry(*model.hysteresis);
      v_jump = 0.5 * (geo.admissible_lo + geo.admissible_hi);
    } else if (v_jump_json->is_number()) {
      v_jump = v_jump_json->get<double>();
    } else {
      fail_operational("InvalidParams", "steady.v_jump must be a number or \"auto\"");
    }
    const rdode::Grid grid = rdode::Grid::make(resolve_grid_n(config, cli));
    rdode::ModelSpec chosen = model;
    rdode::SteadyState steady =
        shoot_with_ladder(model, config_fixes_diffusion(config), v_jump, grid, chosen);
    return {std::move(steady), grid, chosen, method};
  }

  if (method == "newton" || method == "load") {
    const char* file_key = method == "newton" ? "initial" : "file";
    reject_unknown_keys(*section, {"method", file_key}, "steady");
    const std::string path = require_string(*section, file_key, "steady");
    int file_n = 0;
    rdode::SteadyState loaded = rdode::load_steady_csv(path, &file_n);
    if (const json* value = find_key(config, "grid_n")) {
      if (!value->is_number_integer() || value->get<long long>() != file_n)
        fail_operational("InvalidParams", "config grid_n disagrees with " + path);
    }
    if (cli.grid_n > 0 && cli.grid_n != file_n)
      fail_operational("InvalidParams", "--grid-n disagrees with " + path);
    const rdode::Grid grid = rdode::Grid::make(file_n);
    if (loaded.field.m() != model.m || loaded.field.k() != model.k)
      fail_operational("DimensionMismatch", path + " does not match the model shape");
    if (method == "newton")
      return {solve_newton_steady(model, loaded.field, grid), grid, model, method};
    loaded.residual_sup =
        steady_residual_field(model, loaded.field, grid).sup_norm();
    return {std::move(loaded), grid, model, method};
  }

  fail_operational("InvalidParams", "steady.method must be one of constant, hysteresis_shoot, "
                                    "newton, load");
}

void write_steady_outputs(const SteadyRun& run, const std::string& out_dir) {
  rdode::write_steady_csv(out_dir + "/steady.csv", run.steady, run.grid);
  json meta;
  meta["residual_sup"] = run.steady.residual_sup;
  meta["jump_points"] = run.steady.jump_points;
  meta["grid_n"] = run.grid.n;
  meta["method"] = run.method;
  json diffusion = json::array();
  for (int i = 0; i < run.model.diffusion.size(); ++i) diffusion.push_back(run.model.diffusion[i]);
  meta["diffusion"] = diffusion;
  std::ofstream out(out_dir + "/steady.meta.json");
  out << meta.dump(2) << "\n";
}

int cmd_steady(const json& config, const Cli& cli) {
  const SteadyRun run = run_steady_section(config, cli);
  write_steady_outputs(run, resolve_out_dir(config, cli));
  return 0;
}

struct SpectrumRun {
  rdode::SpectrumReport report;
  rdode::Verdict verdict;
  std::optional<rdode::SufficientReport> sufficient;
  double margin = 0.0;
};

SpectrumRun run_spectrum_section(const json& config, const SteadyRun& steady_run) {
  double tol_ess = 0.0;
  std::optional<double> margin_override;
  if (const json* section = find_key(config, "spectrum")) {
    if (!section->is_object()) fail_operational("InvalidParams", "spectrum must be an object");
    reject_unknown_keys(*section, {"tol_ess", "margin"}, "spectrum");
    if (find_key(*section, "tol_ess")) {
      tol_ess = require_number(*section, "tol_ess", "spectrum");
      if (tol_ess <= 0) fail_operational("InvalidParams", "spectrum.tol_ess must be positive");
    }
    if (find_key(*section, "margin")) {
      margin_override = require_number(*section, "margin", "spectrum");
      if (*margin_override <= 0)
        fail_operational("InvalidParams", "spectrum.margin must be positive");
    }
  }

  const rdode::JacobianField jac =
      jacobian_field(steady_run.model, steady_run.steady, steady_run.grid);
  const rdode::DiscreteOperator op =
      assemble_operator(jac, steady_run.grid, steady_run.model.diffusion);
  SpectrumRun result;
  result.report = compute_spectrum(op, jac, steady_run.grid, tol_ess);
  result.margin = margin_override ? *margin_override : default_margin(result.report);
  result.verdict = classify(result.report, result.margin);
  if (steady_run.model.m == 1 && steady_run.model.k == 1)
    result.sufficient = check_sufficient_stability(jac);
  return result;
}

void write_spectrum_outputs(const SpectrumRun& run, const std::string& out_dir) {
  rdode::write_spectrum_csv(out_dir + "/spectrum.csv", run.report);
  json verdict;
  verdict["label"] = run.verdict.label;
  verdict["reasons"] = run.verdict.reasons;
  verdict["s_A"] = run.report.s_A;
  verdict["s_inf"] = run.report.s_inf;
  verdict["s_L"] = run.report.s_L;
  verdict["tol_ess"] = run.report.tol_ess;
  verdict["margin"] = run.margin;
  if (run.sufficient) {
    json sufficient;
    sufficient["passed"] = run.sufficient->passed;
    sufficient["cond_A"] = run.sufficient->cond_A;
    sufficient["cond_D"] = run.sufficient->cond_D;
    sufficient["cond_det"] = run.sufficient->cond_det;
    sufficient["max_A_star"] = run.sufficient->max_A_star;
    sufficient["max_D_star"] = run.sufficient->max_D_star;
    sufficient["min_det"] = run.sufficient->min_det;
    verdict["sufficient_condition"] = sufficient;
  } else {
    verdict["sufficient_condition"] = nullptr;
  }
  std::ofstream out(out_dir + "/verdict.json");
  out << verdict.dump(2) << "\n";
}

int cmd_spectrum(const json& config, const Cli& cli) {
  const SteadyRun steady_run = run_steady_section(config, cli);
  const SpectrumRun spectrum_run = run_spectrum_section(config, steady_run);
  const std::string out_dir = resolve_out_dir(config, cli);
  write_steady_outputs(steady_run, out_dir);
  write_spectrum_outputs(spectrum_run, out_dir);
  std::cout << spectrum_run.verdict.label << "\n";
  return 0;
}

int cmd_simulate(const json& config, const Cli& cli) {
  const json* section = find_key(config, "simulate");
  if (!section || !section->is_object())
    fail_operational("InvalidParams", "config needs a 'simulate' object");
  reject_unknown_keys(*section, {"t_end", "dt", "snapshot_stride", "perturbation"}, "simulate");
  const double t_end = require_number(*section, "t_end", "simulate");
  if (t_end <= 0) fail_operational("InvalidParams", "simulate.t_end must be positive");
  std::optional<double> dt;
  if (find_key(*section, "dt")) {
    dt = require_number(*section, "dt", "simulate");
    if (*dt <= 0) fail_operational("InvalidParams", "simulate.dt must be positive");
  }
  int snapshot_stride = 0;
  if (const json* value = find_key(*section, "snapshot_stride")) {
    if (!value->is_number_integer() || value->get<long long>() < 0)
      fail_operational("InvalidParams", "simulate.snapshot_stride must be a nonnegative integer");
    snapshot_stride = static_cast<int>(value->get<long long>());
  }

  const json* perturbation = find_key(*section, "perturbation");
  if (!perturbation || !perturbation->is_object())
    fail_operational("InvalidParams", "simulate needs a 'perturbation' object");
  const std::string kind = require_string(*perturbation, "kind", "perturbation");
  const double amplitude = require_number(*perturbation, "amplitude", "perturbation");
  if (amplitude <= 0) fail_operational("InvalidParams", "perturbation.amplitude must be positive");

  const SteadyRun steady_run = run_steady_section(config, cli);
  const int n = steady_run.grid.n;

  // The operator is only assembled when something actually needs the spectrum:
  // the default time step and the eigenmode perturbation.
  std::optional<rdode::DiscreteOperator> op;
  auto ensure_op = [&]() {
    if (!op) {
      const rdode::JacobianField jac =
          jacobian_field(steady_run.model, steady_run.steady, steady_run.grid);
      op = assemble_operator(jac, steady_run.grid, steady_run.model.diffusion);
    }
  };

  rdode::StateField xi0 = rdode::StateField::zero(steady_run.model.m, steady_run.model.k, n);
  std::uint64_t seed = 1;
  if (kind == "eigenmode") {
    reject_unknown_keys(*perturbation, {"kind", "amplitude", "rank"}, "perturbation");
    int rank = 0;
    if (const json* value = find_key(*perturbation, "rank")) {
      if (!value->is_number_integer() || value->get<long long>() < 0)
        fail_operational("InvalidParams", "perturbation.rank must be a nonnegative integer");
      rank = static_cast<int>(value->get<long long>());
    }
    ensure_op();
    xi0 = perturb_eigenmode(*op, amplitude, rank);
  } else if (kind == "uniform_random") {
    reject_unknown_keys(*perturbation, {"kind", "amplitude", "seed"}, "perturbation");
    if (const json* value = find_key(*perturbation, "seed")) {
      if (!value->is_number_unsigned())
        fail_operational("InvalidParams", "perturbation.seed must be a nonnegative integer");
      seed = value->get<std::uint64_t>();
    }
    if (cli.seed_given) seed = cli.seed;
    xi0 = rdode::perturb_uniform_random(steady_run.model.m, steady_run.model.k, n, amplitude,
                                        seed);
  } else if (kind == "indicator_bump") {
    reject_unknown_keys(*perturbation, {"kind", "amplitude", "lo", "hi"}, "perturbation");
    const double lo = require_number(*perturbation, "lo", "perturbation");
    const double hi = require_number(*perturbation, "hi", "perturbation");
    if (!(0.0 <= lo && lo < hi && hi <= 1.0))
      fail_operational("InvalidParams", "perturbation needs 0 <= lo < hi <= 1");
    xi0 = perturb_indicator_bump(steady_run.model.m, steady_run.model.k, steady_run.grid, lo, hi,
                                 amplitude);
  } else {
    fail_operational("InvalidParams", "perturbation.kind must be one of eigenmode, "
                                      "uniform_random, indicator_bump");
  }

  double step = 0.0;
  if (dt) {
    step = *dt;
  } else {
    ensure_op();
    const rdode::JacobianField jac =
        jacobian_field(steady_run.model, steady_run.steady, steady_run.grid);
    const rdode::SpectrumReport report = compute_spectrum(*op, jac, steady_run.grid);
    step = rdode::default_dt(report.s_L);
  }

  const rdode::SimulationTrace trace =
      simulate(steady_run.model, steady_run.steady, xi0, t_end, step, snapshot_stride);

  const std::string out_dir = resolve_out_dir(config, cli);
  rdode::write_trace_csv(out_dir + "/trace.csv", trace);
  for (size_t i = 0; i < trace.snapshots.size(); ++i) {
    rdode::SteadyState wrapper;
    wrapper.field = trace.snapshots[i];
    char name[64];
    std::snprintf(name, sizeof(name), "/snapshot_%04zu.csv", i);
    rdode::write_steady_csv(out_dir + name, wrapper, steady_run.grid);
  }

  json meta;
  meta["t_end"] = t_end;
  meta["dt"] = step;
  meta["scheme"] = trace.scheme;
  meta["perturbation"] = {{"kind", kind}, {"amplitude", amplitude}};
  if (kind == "uniform_random") meta["perturbation"]["seed"] = seed;
  meta["snapshot_times"] = trace.snapshot_times;
  try {
    const rdode::RateFit fit = estimate_rate(trace);
    meta["rate_fit"] = {{"rate", fit.rate},
                        {"intercept", fit.intercept},
                        {"t_start", fit.t_start},
                        {"t_end", fit.t_end},
                        {"residual", fit.residual}};
  } catch (const rdode::Error&) {
    meta["rate_fit"] = nullptr;
  }
  std::ofstream out(out_dir + "/simulate.meta.json");
  out << meta.dump(2) << "\n";
  return 0;
}

int cmd_verify(const json& config, const Cli& cli) {
  int grid_n = 0;
  if (find_key(config, "grid_n") || cli.grid_n > 0) grid_n = resolve_grid_n(config, cli);
  const std::vector<rdode::CriterionResult> results = rdode::run_acceptance(grid_n);

  static const std::map<std::string, std::string> tolerances = {
      {"1", "relative eigenvalue error <= 1e-8"},
      {"2", "|fitted rate - max Re| <= 0.02 * |max Re|"},
      {"3", "sup <= 10*exp((s_L+0.1|s_L|)t)*initial; final <= 1e-5*initial"},
      {"4", "Unstable verdict; |fitted rate - s_L| <= 0.1 * |s_L|"},
      {"5", "s_A > 0 => Unstable; certified pattern => Stable with s_L < 0"},
      {"6", "max Re over all eigenvalues < 1e-8"},
      {"7", "remainder ratio variation < 5%"},
      {"8", "sup distance <= 1e-4; iterate gap ratio <= 0.6"},
      {"9", "mode and mean errors <= 1e-12"},
      {"10", "Richardson ratio in [3.5, 4.5]"},
  };

  json doc;
  doc["grid_n"] = grid_n;
  doc["criteria"] = json::array();
  bool all_passed = true;
  std::string failed_ids;
  for (const rdode::CriterionResult& result : results) {
    const char* status = result.skipped ? "skip" : (result.passed ? "pass" : "fail");
    if (!result.skipped && !result.passed) {
      all_passed = false;
      failed_ids += (failed_ids.empty() ? "" : ", ") + result.id;
    }
    json entry;
    entry["id"] = result.id;
    entry["name"] = result.name;
    entry["status"] = status;
    entry["runtime_seconds"] = result.runtime_seconds;
    json measured = json::object();
    for (const auto& [key, value] : result.measured) measured[key] = value;
    entry["measured"] = measured;
    const auto tolerance = tolerances.find(result.id);
    entry["tolerance"] = tolerance == tolerances.end() ? "" : tolerance->second;
    entry["notes"] = result.notes;
    doc["criteria"].push_back(entry);

    char line[256];
    std::snprintf(line, sizeof(line), "[%s] %2s %-42s (%.2f s) %s",
                  result.skipped ? "SKIP" : (result.passed ? "PASS" : "FAIL"), result.id.c_str(),
                  result.name.c_str(), result.runtime_seconds, result.notes.c_str());
    std::cout << line << "\n";
  }
  doc["all_passed"] = all_passed;

  const std::string out_dir = resolve_out_dir(config, cli);
  std::ofstream out(out_dir + "/verify.json");
  out << doc.dump(2) << "\n";

  if (!all_passed) {
    std::cout << "failed criteria: " << failed_ids << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stationary patterns and spectral stability of reaction-diffusion-ODE systems"};
  app.require_subcommand(1);

  Cli cli;
  std::string chosen;
  for (const char* name : {"steady", "spectrum", "classify", "simulate", "verify"}) {
    CLI::App* sub = app.add_subcommand(name);
    CLI::Option* config_opt =
        sub->add_option("--config", cli.config_path, "path to the JSON run configuration");
    if (std::string(name) != "verify") config_opt->required();
    sub->add_option("--out", cli.out_dir, "output directory (overrides config output_dir)");
    sub->add_option("--grid-n", cli.grid_n, "grid resolution override");
    sub->add_option("--seed", cli.seed, "perturbation seed override")
        ->each([&cli](const std::string&) { cli.seed_given = true; });
    sub->callback([&chosen, name]() { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    fail_operational("UsageError", e.what());
  }

  try {
    const json config = load_config(cli);
    if (chosen == "steady") return cmd_steady(config, cli);
    if (chosen == "spectrum" || chosen == "classify") return cmd_spectrum(config, cli);
    if (chosen == "simulate") return cmd_simulate(config, cli);
    return cmd_verify(config, cli);
  } catch (...) {
    rethrow_as_operational();
  }
}
