#pragma once

#include <string>
#include <vector>

#include "rdode/model.hpp"

namespace rdode {

// A stationary solution on the grid. branch_labels, when present, holds one
// label per node (H/0/T for the cubic nullcline, u0/u-/u+ for the DDI one).
struct SteadyState {
  StateField field;
  double residual_sup = 0.0;
  std::vector<std::string> branch_labels;
  std::vector<double> jump_points;
};

// Residual field (f, D^v Lap_h v + g) evaluated with the direct stencil; the
// sup norm of it is steady_residual. This is the independent check: solvers
// assemble matrices, this does not.
StateField steady_residual_field(const ModelSpec& model, const StateField& field,
                                 const Grid& grid);
double steady_residual(const ModelSpec& model, const StateField& field, const Grid& grid);

// Newton on (f, g)(u, v) = 0 from the given (m+k) guess; the constant solution
// is replicated over the grid. Residual <= 1e-12, at most 50 iterations.
// Throws NoConvergence, SingularJacobian.
SteadyState find_constant_steady(const ModelSpec& model, const Eigen::VectorXd& guess,
                                 const Grid& grid);

// Damped Newton on the coupled discrete system {f = 0, D^v Lap_h v + g = 0}.
// Polishes shooting output or continues continuous patterns; residual <= 1e-10.
// Throws NoConvergence, SingularJacobian (with a condition estimate).
SteadyState solve_newton_steady(const ModelSpec& model, const StateField& initial,
                                const Grid& grid);

// Cubic nullcline geometry for a hysteresis-family model: turning points of p,
// intersections with the line (alpha/beta) u, the admissible jump interval,
// and the three branches of p(u) = v solved by guarded Newton.
struct HysteresisGeometry {
  std::array<double, 3> p_coeffs;
  double alpha = 0.0, beta = 0.0;
  double u_H = 0.0, u_T = 0.0;  // local max / local min of p
  double v_H = 0.0, v_T = 0.0;
  double u1 = 0.0, u2 = 0.0;    // nonzero intersections S1, S2
  double v1 = 0.0, v2 = 0.0;
  double admissible_lo = 0.0;   // (v_T, min{v_H, v_2})
  double admissible_hi = 0.0;

  double h_H(double v) const;  // branch with u <= u_H
  double h_0(double v) const;  // middle branch, v in [v_T, v_H]
  double h_T(double v) const;  // branch with u >= u_T
};
HysteresisGeometry hysteresis_geometry(const HysteresisParams& params);

// Two-branch shooting problem for d v'' + g(u_b(v), v) = 0, v'(0) = v'(1) = 0:
// u follows u_before while v < v_jump and u_after once the crossing event has
// fired. v_min is the lower end of the bracket scan for v(0).
struct TwoBranchProblem {
  std::function<double(double)> u_before;
  std::function<double(double)> u_after;
  std::string label_before;
  std::string label_after;
  double v_min = 0.0;
};

// RK4 shooting (fixed step h/4, linear-interpolation event detection) with
// bisection on v(0) over a 64-point bracket scan, then a damped-Newton polish
// of the sampled nodal values against the discrete steady equations.
// Throws NoSolution (no bracket), EventNotCrossed, NoConvergence.
SteadyState solve_two_branch_pattern(const ModelSpec& model, const TwoBranchProblem& problem,
                                     double v_jump, double diffusion, const Grid& grid);

// Monotone increasing jump pattern of a hysteresis-family model: branch h_H
// before the crossing of v_jump, h_T after. Requires v_jump inside the
// admissible interval (throws NoSolution otherwise).
SteadyState solve_hysteresis_pattern(const ModelSpec& model, double v_jump, const Grid& grid);

// Closed-form branches u0(v) = 0 and u_pm(v) of the DDI nullcline f = 0,
// defined for 0 <= v <= v_r = m1/(2 sqrt(kappa)) - 1. u_minus and u_plus throw
// BranchUndefined outside that interval; u0 exists for every v >= 0.
struct DdiBranchTable {
  double kappa = 0.0;
  double m1 = 0.0;
  double v_r = 0.0;

  double u0(double v) const;
  double u_minus(double v) const;
  double u_plus(double v) const;
};
DdiBranchTable ddi_branch_table(const DdiParams& params);

}  // namespace rdode
