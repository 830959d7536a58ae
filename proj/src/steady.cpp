#include "rdode/steady.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "rdode/errors.hpp"
#include "rdode/linearize.hpp"

namespace rdode {

namespace {

bool has_turning_points(const std::array<double, 3>& c) {
  return c[1] * c[1] - 3.0 * c[0] * c[2] > 0.0 && c[2] != 0.0;
}

// Labels each node by the branch interval its u value falls into; only defined
// for the scalar built-in families.
void attach_branch_labels(const ModelSpec& model, SteadyState& steady) {
  if (model.m != 1 || model.k != 1) return;
  const int n = steady.field.n();
  if (model.hysteresis && has_turning_points(model.hysteresis->p_coeffs)) {
    const HysteresisGeometry geo = hysteresis_geometry(*model.hysteresis);
    steady.branch_labels.resize(n);
    for (int i = 0; i < n; ++i) {
      const double u = steady.field.u(0, i);
      steady.branch_labels[i] = u < geo.u_H ? "H" : (u > geo.u_T ? "T" : "0");
    }
  } else if (model.ddi) {
    const double split = 1.0 / std::sqrt(model.ddi->kappa);
    steady.branch_labels.resize(n);
    for (int i = 0; i < n; ++i) {
      const double u = steady.field.u(0, i);
      steady.branch_labels[i] = std::abs(u) <= 1e-6 ? "u0" : (u < split ? "u-" : "u+");
    }
  }
}

// Cell-boundary positions where adjacent branch labels differ.
void detect_jump_points(SteadyState& steady, const Grid& grid) {
  if (steady.branch_labels.empty()) return;
  steady.jump_points.clear();
  for (int i = 0; i + 1 < grid.n; ++i)
    if (steady.branch_labels[i] != steady.branch_labels[i + 1])
      steady.jump_points.push_back((i + 1) * grid.h);
}

// Root of p(u) - v on an interval where p is strictly monotone: Newton with a
// sign-preserving bracket and bisection fallback.
double cubic_branch_root(const std::array<double, 3>& c, double v, double lo, double hi) {
  double flo = cubic_p(c, lo) - v;
  double fhi = cubic_p(c, hi) - v;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) throw BranchUndefined("branch value outside the bracketed interval");
  double u = 0.5 * (lo + hi);
  for (int iter = 0; iter < 100; ++iter) {
    const double f = cubic_p(c, u) - v;
    if (std::abs(f) < 1e-14 * (1.0 + std::abs(v))) return u;
    if (f * flo > 0.0) lo = u;
    else hi = u;
    const double dp = cubic_dp(c, u);
    double next = dp != 0.0 ? u - f / dp : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo < 1e-16 * (1.0 + std::abs(u))) return 0.5 * (lo + hi);
    u = next;
  }
  return u;
}

struct NewtonWorkspace {
  std::vector<Eigen::MatrixXd> W;   // back-substitution factors
  std::vector<Eigen::VectorXd> r;   // forward-eliminated right-hand side
};

// One damped-Newton solve of the coupled discrete steady system; the linear
// systems are block tridiagonal in node-major order (Laplacian coupling only
// in the v rows) and solved by block elimination.
StateField newton_step_direction(const ModelSpec& model, const StateField& field,
                                 const StateField& residual, const Grid& grid) {
  const int m = model.m, k = model.k, n = grid.n, p = m + k;
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  JacobianField jac = jacobian_field(model, field, grid);

  Eigen::MatrixXd couple = Eigen::MatrixXd::Zero(p, p);
  for (int b = 0; b < k; ++b) couple(m + b, m + b) = model.diffusion[b] * inv_h2;

  NewtonWorkspace ws;
  ws.W.resize(n);
  ws.r.resize(n);
  Eigen::MatrixXd diag(p, p);
  for (int i = 0; i < n; ++i) {
    diag.topLeftCorner(m, m) = jac.A_star[i];
    diag.topRightCorner(m, k) = jac.B_star[i];
    diag.bottomLeftCorner(k, m) = jac.C_star[i];
    diag.bottomRightCorner(k, k) = jac.D_star[i];
    const double stencil_center = (i == 0 || i == n - 1) ? -1.0 : -2.0;
    for (int b = 0; b < k; ++b)
      diag(m + b, m + b) += stencil_center * model.diffusion[b] * inv_h2;

    Eigen::VectorXd rhs(p);
    for (int a = 0; a < m; ++a) rhs[a] = -residual.u(a, i);
    for (int b = 0; b < k; ++b) rhs[m + b] = -residual.v(b, i);

    Eigen::MatrixXd pivot = diag;
    if (i > 0) {
      pivot -= couple * ws.W[i - 1];
      rhs -= couple * ws.r[i - 1];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(pivot);
    if (!lu.isInvertible()) {
      std::ostringstream msg;
      msg << "singular Newton block at node " << i << " (rcond ~ " << lu.rcond() << ")";
      throw SingularJacobian(msg.str());
    }
    ws.W[i] = i < n - 1 ? Eigen::MatrixXd(lu.solve(couple)) : Eigen::MatrixXd::Zero(p, p);
    ws.r[i] = lu.solve(rhs);
  }

  StateField delta = StateField::zero(m, k, n);
  Eigen::VectorXd z = ws.r[n - 1];
  for (int i = n - 1;; --i) {
    for (int a = 0; a < m; ++a) delta.u(a, i) = z[a];
    for (int b = 0; b < k; ++b) delta.v(b, i) = z[m + b];
    if (i == 0) break;
    z = ws.r[i - 1] - ws.W[i - 1] * z;
  }
  return delta;
}

}  // namespace

StateField steady_residual_field(const ModelSpec& model, const StateField& field,
                                 const Grid& grid) {
  StateField res = evaluate_reaction(model, field, grid);
  const int n = grid.n;
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  for (int b = 0; b < model.k; ++b) {
    const double d = model.diffusion[b];
    for (int i = 0; i < n; ++i) {
      const double center = field.v(b, i);
      double lap = 0.0;
      if (i > 0) lap += field.v(b, i - 1) - center;
      if (i < n - 1) lap += field.v(b, i + 1) - center;
      res.v(b, i) += d * inv_h2 * lap;
    }
  }
  return res;
}

double steady_residual(const ModelSpec& model, const StateField& field, const Grid& grid) {
  return steady_residual_field(model, field, grid).sup_norm();
}

SteadyState find_constant_steady(const ModelSpec& model, const Eigen::VectorXd& guess,
                                 const Grid& grid) {
  if (guess.size() != model.m + model.k)
    throw DimensionMismatch("constant guess must have m+k entries");
  Eigen::VectorXd u = guess.head(model.m);
  Eigen::VectorXd v = guess.tail(model.k);
  Eigen::VectorXd f(model.m), g(model.k), F(model.m + model.k);
  const double x0 = grid.nodes[0];

  for (int iter = 0; iter <= 50; ++iter) {
    model.reaction(u, v, x0, f, g);
    F << f, g;
    if (F.cwiseAbs().maxCoeff() <= 1e-13) break;
    if (iter == 50) {
      if (F.cwiseAbs().maxCoeff() <= 1e-12) break;
      throw NoConvergence("constant-state Newton did not reach tolerance in 50 iterations");
    }
    Eigen::MatrixXd jac = model.reaction_jacobian(u, v, x0);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible()) throw SingularJacobian("singular reaction Jacobian at constant guess");
    Eigen::VectorXd step = lu.solve(F);
    u -= step.head(model.m);
    v -= step.tail(model.k);
    if (!u.allFinite() || !v.allFinite())
      throw NoConvergence("constant-state Newton left the finite domain");
  }

  SteadyState steady;
  steady.field = StateField{u.replicate(1, grid.n), v.replicate(1, grid.n)};
  steady.residual_sup = steady_residual(model, steady.field, grid);
  attach_branch_labels(model, steady);
  return steady;
}

SteadyState solve_newton_steady(const ModelSpec& model, const StateField& initial,
                                const Grid& grid) {
  if (initial.m() != model.m || initial.k() != model.k || initial.n() != grid.n)
    throw DimensionMismatch("initial field dimensions do not match model and grid");
  if (!initial.u.allFinite() || !initial.v.allFinite())
    throw InvalidParams("initial field must be finite");

  StateField field = initial;
  StateField residual = steady_residual_field(model, field, grid);
  double norm = residual.sup_norm();

  for (int iter = 0; iter < 100 && norm > 1e-11; ++iter) {
    StateField delta = newton_step_direction(model, field, residual, grid);
    double lambda = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 8; ++halving) {
      StateField trial = field + lambda * delta;
      StateField trial_residual = steady_residual_field(model, trial, grid);
      const double trial_norm = trial_residual.sup_norm();
      if (std::isfinite(trial_norm) && trial_norm < norm * (1.0 - 1e-4 * lambda)) {
        field = trial;
        residual = trial_residual;
        norm = trial_norm;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      if (norm <= 1e-10) break;  // stalled at the rounding floor, still in contract
      throw NoConvergence("damped Newton stalled at residual " + std::to_string(norm));
    }
  }
  if (norm > 1e-10)
    throw NoConvergence("damped Newton stopped above tolerance, residual " + std::to_string(norm));

  SteadyState steady;
  steady.field = field;
  steady.residual_sup = steady_residual(model, field, grid);
  attach_branch_labels(model, steady);
  detect_jump_points(steady, grid);
  return steady;
}

double HysteresisGeometry::h_H(double v) const {
  if (v > v_H + 1e-12) throw BranchUndefined("h_H is only defined for v <= v_H");
  double lo = 0.0;
  if (v < 0.0) {
    lo = -1.0;
    while (cubic_p(p_coeffs, lo) > v) lo *= 2.0;
  }
  return cubic_branch_root(p_coeffs, std::min(v, v_H), lo, u_H);
}

double HysteresisGeometry::h_0(double v) const {
  if (v < v_T - 1e-12 || v > v_H + 1e-12)
    throw BranchUndefined("h_0 is only defined for v in [v_T, v_H]");
  return cubic_branch_root(p_coeffs, std::clamp(v, v_T, v_H), u_H, u_T);
}

double HysteresisGeometry::h_T(double v) const {
  if (v < v_T - 1e-12) throw BranchUndefined("h_T is only defined for v >= v_T");
  double hi = u_T + 1.0;
  while (cubic_p(p_coeffs, hi) < v) hi = u_T + 2.0 * (hi - u_T);
  return cubic_branch_root(p_coeffs, std::max(v, v_T), u_T, hi);
}

HysteresisGeometry hysteresis_geometry(const HysteresisParams& params) {
  validate(params);
  const auto& c = params.p_coeffs;
  if (!has_turning_points(c))
    throw InvalidParams("p is monotone, so there are no hysteresis branches");
  HysteresisGeometry geo;
  geo.p_coeffs = c;
  geo.alpha = params.alpha;
  geo.beta = params.beta;
  const double root = std::sqrt(c[1] * c[1] - 3.0 * c[0] * c[2]);
  geo.u_H = (-c[1] - root) / (3.0 * c[2]);
  geo.u_T = (-c[1] + root) / (3.0 * c[2]);
  geo.v_H = cubic_p(c, geo.u_H);
  geo.v_T = cubic_p(c, geo.u_T);
  const double slope = params.alpha / params.beta;
  const double disc = std::sqrt(c[1] * c[1] - 4.0 * c[2] * (c[0] - slope));
  geo.u1 = (-c[1] - disc) / (2.0 * c[2]);
  geo.u2 = (-c[1] + disc) / (2.0 * c[2]);
  geo.v1 = slope * geo.u1;
  geo.v2 = slope * geo.u2;
  geo.admissible_lo = geo.v_T;
  geo.admissible_hi = std::min(geo.v_H, geo.v2);
  return geo;
}

SteadyState solve_two_branch_pattern(const ModelSpec& model, const TwoBranchProblem& problem,
                                     double v_jump, double diffusion, const Grid& grid) {
  if (model.m != 1 || model.k != 1)
    throw UnsupportedShape("two-branch shooting requires a scalar (m = k = 1) model");
  if (diffusion <= 0.0) throw InvalidParams("diffusion must be positive");

  const int n = grid.n;
  const int steps = 4 * n;
  const double dx = grid.h / 4.0;

  Eigen::VectorXd uv_u(1), uv_v(1), f(1), g(1);
  auto accel = [&](bool after, double v, double x) {
    uv_u[0] = after ? problem.u_after(v) : problem.u_before(v);
    uv_v[0] = v;
    model.reaction(uv_u, uv_v, x, f, g);
    return -g[0] / diffusion;
  };
  auto rk4 = [&](bool after, double x, double step, double& v, double& w) {
    const double k1v = w, k1w = accel(after, v, x);
    const double k2v = w + 0.5 * step * k1w, k2w = accel(after, v + 0.5 * step * k1v, x + 0.5 * step);
    const double k3v = w + 0.5 * step * k2w, k3w = accel(after, v + 0.5 * step * k2v, x + 0.5 * step);
    const double k4v = w + step * k3w, k4w = accel(after, v + step * k3v, x + step);
    v += step / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    w += step / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
  };

  struct Shot {
    double w_end = 0.0;
    double x_event = -1.0;
    Eigen::VectorXd v_nodes;
    std::vector<bool> after_nodes;
  };
  auto shoot = [&](double a, bool record) {
    Shot shot;
    if (record) {
      shot.v_nodes.resize(n);
      shot.after_nodes.assign(n, false);
    }
    double v = a, w = 0.0;
    bool after = false;
    try {
      for (int j = 0; j < steps; ++j) {
        const double x = j * dx;
        const double v_prev = v, w_prev = w;
        rk4(after, x, dx, v, w);
        if (!after && v_prev < v_jump && v >= v_jump) {
          const double theta = (v_jump - v_prev) / (v - v_prev);
          shot.x_event = x + theta * dx;
          v = v_prev;
          w = w_prev;
          rk4(false, x, theta * dx, v, w);
          after = true;
          rk4(true, shot.x_event, (1.0 - theta) * dx, v, w);
        }
        if (record && (j + 1) % 4 == 2) {
          const int node = (j + 1 - 2) / 4;
          shot.v_nodes[node] = v;
          shot.after_nodes[node] = after;
        }
      }
      shot.w_end = w;
    } catch (const BranchUndefined&) {
      // The trajectory fell off a branch domain past its apex; for bracketing
      // this behaves like a strongly negative boundary mismatch.
      shot.w_end = -1.0;
    }
    return shot;
  };

  const double scan_lo = problem.v_min + 1e-8;
  const double scan_hi = v_jump - 1e-8;
  if (scan_lo >= scan_hi) throw NoSolution("empty shooting range for v(0)");

  // Bisects one bracket to a trajectory with matched boundary slope and
  // polishes the sampled nodes to the discrete root. The sampled trajectory
  // solves the continuum problem; the discrete stencil across the jump sees an
  // O(1) defect there, which is what the polish removes.
  auto solve_bracket = [&](double lo, double hi, double w_lo) {
    double a_root = 0.5 * (lo + hi), w_root = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      a_root = 0.5 * (lo + hi);
      w_root = shoot(a_root, false).w_end;
      if (std::abs(w_root) <= 1e-10 || hi - lo < 1e-17) break;
      if (w_lo * w_root > 0.0) {
        lo = a_root;
        w_lo = w_root;
      } else {
        hi = a_root;
      }
    }
    if (std::abs(w_root) > 1e-10)
      throw NoConvergence("shooting bisection left boundary mismatch " + std::to_string(w_root));

    Shot shot = shoot(a_root, true);
    if (shot.x_event < 0.0)
      throw EventNotCrossed("converged trajectory never reaches the jump value");

    // The discrete root sometimes wants the branch switch one cell earlier or
    // later than the continuum crossing, so retry the polish with the label
    // boundary nudged by one cell before giving up on this bracket.
    std::exception_ptr polish_failure;
    for (const double shift : {0.0, 1.0, -1.0}) {
      const double boundary = shot.x_event + shift * grid.h;
      if (boundary <= 0.0 || boundary >= 1.0) continue;
      SteadyState sampled;
      sampled.field = StateField::zero(1, 1, n);
      sampled.branch_labels.resize(n);
      bool resample_ok = true;
      int after_count = 0;
      for (int i = 0; i < n && resample_ok; ++i) {
        const double v = shot.v_nodes[i];
        const bool after = grid.nodes[i] > boundary;
        after_count += after ? 1 : 0;
        sampled.field.v(0, i) = v;
        try {
          sampled.field.u(0, i) = after ? problem.u_after(v) : problem.u_before(v);
        } catch (const BranchUndefined&) {
          resample_ok = false;
        }
        sampled.branch_labels[i] = after ? problem.label_after : problem.label_before;
      }
      if (!resample_ok || after_count == 0 || after_count == n) continue;
      try {
        SteadyState polished = solve_newton_steady(model, sampled.field, grid);
        // Reject a polish that wandered to some other solution instead of
        // correcting the sampled trajectory by a discretization-sized amount.
        double drift = 0.0;
        double scale = 1.0;
        for (int i = 0; i < n; ++i) {
          drift = std::max(drift, std::abs(polished.field.u(0, i) - sampled.field.u(0, i)));
          drift = std::max(drift, std::abs(polished.field.v(0, i) - sampled.field.v(0, i)));
          scale = std::max({scale, std::abs(sampled.field.u(0, i)),
                            std::abs(sampled.field.v(0, i))});
        }
        if (drift > 0.25 * scale)
          throw NoConvergence("polish drifted away from the shooting trajectory");
        polished.branch_labels = sampled.branch_labels;
        polished.jump_points = {shot.x_event};
        return polished;
      } catch (const Error&) {
        polish_failure = std::current_exception();
      }
    }
    std::rethrow_exception(polish_failure);
  };

  // Some brackets carry trajectories whose discrete counterpart does not
  // exist on this grid (the polish stalls); later brackets usually do, so try
  // every sign change before giving up.
  bool bracketed = false;
  std::exception_ptr last_failure;
  double prev_a = scan_lo;
  double prev_w = shoot(scan_lo, false).w_end;
  for (int s = 1; s < 64; ++s) {
    const double a = scan_lo + (scan_hi - scan_lo) * s / 63.0;
    const double w = shoot(a, false).w_end;
    if (prev_w == 0.0 || prev_w * w < 0.0) {
      bracketed = true;
      try {
        return solve_bracket(prev_a, a, prev_w);
      } catch (const Error&) {
        last_failure = std::current_exception();
      }
    }
    prev_a = a;
    prev_w = w;
  }
  if (!bracketed)
    throw NoSolution("no shooting bracket for v(0): boundary mismatch has constant sign");
  std::rethrow_exception(last_failure);
}

SteadyState solve_hysteresis_pattern(const ModelSpec& model, double v_jump, const Grid& grid) {
  if (!model.hysteresis)
    throw InvalidParams("jump-pattern construction requires a hysteresis-family model");
  const HysteresisGeometry geo = hysteresis_geometry(*model.hysteresis);
  if (v_jump <= geo.admissible_lo || v_jump >= geo.admissible_hi)
    throw NoSolution("v_jump " + std::to_string(v_jump) + " outside the admissible interval (" +
                     std::to_string(geo.admissible_lo) + ", " + std::to_string(geo.admissible_hi) +
                     ")");
  TwoBranchProblem problem;
  problem.u_before = [geo](double v) { return geo.h_H(v); };
  problem.u_after = [geo](double v) { return geo.h_T(v); };
  problem.label_before = "H";
  problem.label_after = "T";
  problem.v_min = 0.0;
  // If the branch-H equilibrium S1 sits below the jump value, trajectories must
  // start above it or they converge to S1 instead of crossing.
  if (geo.u1 <= geo.u_H && geo.v1 < v_jump) problem.v_min = geo.v1;
  return solve_two_branch_pattern(model, problem, v_jump, model.diffusion[0], grid);
}

double DdiBranchTable::u0(double v) const {
  if (v < -1e-12) throw BranchUndefined("u0 is only defined for v >= 0");
  return 0.0;
}

double DdiBranchTable::u_minus(double v) const {
  if (v < -1e-12 || v > v_r + 1e-12)
    throw BranchUndefined("u_minus is only defined for v in [0, v_r]");
  const double q = 1.0 + std::clamp(v, 0.0, v_r);
  const double disc = std::max(m1 * m1 - 4.0 * kappa * q * q, 0.0);
  return (m1 - std::sqrt(disc)) / (2.0 * kappa * q);
}

double DdiBranchTable::u_plus(double v) const {
  if (v < -1e-12 || v > v_r + 1e-12)
    throw BranchUndefined("u_plus is only defined for v in [0, v_r]");
  const double q = 1.0 + std::clamp(v, 0.0, v_r);
  const double disc = std::max(m1 * m1 - 4.0 * kappa * q * q, 0.0);
  return (m1 + std::sqrt(disc)) / (2.0 * kappa * q);
}

DdiBranchTable ddi_branch_table(const DdiParams& params) {
  validate(params);
  DdiBranchTable table;
  table.kappa = params.kappa;
  table.m1 = params.m1;
  table.v_r = params.m1 / (2.0 * std::sqrt(params.kappa)) - 1.0;
  return table;
}

}  // namespace rdode
