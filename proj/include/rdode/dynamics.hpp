#pragma once

#include <cstdint>
#include <utility>

#include "rdode/linearize.hpp"
#include "rdode/steady.hpp"

namespace rdode {

struct SimulationTrace {
  std::vector<double> times;
  std::vector<double> sup_norms;  // deviation from the steady state, all components
  std::vector<double> l2_norms;   // sqrt(h) * Euclidean norm of the packed deviation
  std::vector<StateField> snapshots;
  std::vector<double> snapshot_times;
  std::string scheme;
};

struct RateFit {
  double rate = 0.0;       // slope of the least-squares line through (t, log sup_norm)
  double intercept = 0.0;
  double t_start = 0.0;    // fitted window
  double t_end = 0.0;
  double residual = 0.0;   // root mean square of the log-norm fit errors
};

// Nonlinear evolution of the deviation xi from the steady state, one Lie step
// per dt: exact diffusion propagator on the v rows of xi, then RK4 on
// reaction(steady + xi) - reaction(steady) + rho, where rho is the steady
// residual field (so the drift of the zero deviation is set by the residual,
// nothing else). Throws BlowUp (with the time) when the deviation sup norm
// exceeds 1e6 or turns NaN.
SimulationTrace simulate(const ModelSpec& model, const SteadyState& steady,
                         const StateField& xi0, double t_end, double dt,
                         int snapshot_stride = 0);

// Linear evolution xi' = L xi by the dense exponential of dt * L, computed
// once and applied per step.
SimulationTrace simulate_linear(const DiscreteOperator& op, const StateField& xi0,
                                double t_end, double dt);

// Successive approximation of the mild solution on an n_time grid over
// [0, t_end]: curve 0 is T(t) xi0 with T(t) = exp(t op), curve i+1 adds the
// trapezoid Duhamel integral of T(t-s) N(xi_i(s)). Returns the final iterate
// at t_end and the sup-norm gaps between consecutive curves; contraction on
// short horizons makes the gaps shrink geometrically. Requires t_end <= 1,
// n_time >= 8, n_iter >= 2. Throws Divergence after three consecutive gap
// increases.
std::pair<StateField, std::vector<double>> picard_mild(
    const DiscreteOperator& op, const ModelSpec& model, const SteadyState& steady,
    const StateField& xi0, double t_end, int n_time, int n_iter);

// Perturbation generators.
// Eigenmode: real part of the eigenvector whose eigenvalue has the largest
// real part (rank > 0 picks the next ones down), scaled to sup norm amplitude.
StateField perturb_eigenmode(const DiscreteOperator& op, double amplitude, int rank = 0);
// Independent values in [-amplitude, amplitude] per component and node;
// bit-reproducible for a fixed seed.
StateField perturb_uniform_random(int m, int k, int n, double amplitude, std::uint64_t seed);
// amplitude on every component at nodes with lo <= x <= hi, zero elsewhere.
StateField perturb_indicator_bump(int m, int k, const Grid& grid, double lo, double hi,
                                  double amplitude);

// Least-squares slope of log sup_norms over the trailing `fraction` of the
// trace. Throws InsufficientData (fewer than 10 usable samples in the window)
// and NonPositiveNorms.
RateFit estimate_rate(const SimulationTrace& trace, double fraction = 0.5);

// min(1e-3, 0.1 / |s_L|); plain 1e-3 when s_L = 0.
double default_dt(double s_L);

}  // namespace rdode
