#include "rdode/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "rdode/errors.hpp"

namespace rdode {

namespace {

double l2_norm(const StateField& xi, double h) {
  const double sq = xi.u.squaredNorm() + xi.v.squaredNorm();
  return std::sqrt(h * sq);
}

void record(SimulationTrace& trace, double t, const StateField& xi, double h) {
  trace.times.push_back(t);
  trace.sup_norms.push_back(xi.sup_norm());
  trace.l2_norms.push_back(l2_norm(xi, h));
}

}  // namespace

SimulationTrace simulate(const ModelSpec& model, const SteadyState& steady,
                         const StateField& xi0, double t_end, double dt,
                         int snapshot_stride) {
  if (dt <= 0.0) throw InvalidParams("dt must be positive");
  if (t_end < dt) throw InvalidParams("t_end must be at least dt");
  if (!xi0.u.allFinite() || !xi0.v.allFinite()) throw InvalidParams("xi0 must be finite");
  if (xi0.m() != model.m || xi0.k() != model.k || steady.field.m() != model.m ||
      steady.field.k() != model.k || xi0.n() != steady.field.n())
    throw DimensionMismatch("perturbation and steady state must match the model");

  const Grid grid = Grid::make(steady.field.n());
  const StateField base = evaluate_reaction(model, steady.field, grid);
  const StateField rho = steady_residual_field(model, steady.field, grid);
  std::vector<Eigen::MatrixXd> propagators;
  propagators.reserve(model.k);
  for (int b = 0; b < model.k; ++b)
    propagators.push_back(heat_propagator_matrix(grid, model.diffusion[b], dt));

  auto reaction_rate = [&](const StateField& xi) {
    return evaluate_reaction(model, steady.field + xi, grid) - base + rho;
  };

  const int steps = static_cast<int>(std::ceil(t_end / dt - 1e-12));
  SimulationTrace trace;
  trace.scheme = "lie_splitting_rk4";
  StateField xi = xi0;
  record(trace, 0.0, xi, grid.h);
  if (snapshot_stride > 0) {
    trace.snapshots.push_back(xi);
    trace.snapshot_times.push_back(0.0);
  }

  for (int step = 1; step <= steps; ++step) {
    for (int b = 0; b < model.k; ++b)
      xi.v.row(b) = (propagators[b] * xi.v.row(b).transpose()).transpose();
    const StateField r1 = reaction_rate(xi);
    const StateField r2 = reaction_rate(xi + (0.5 * dt) * r1);
    const StateField r3 = reaction_rate(xi + (0.5 * dt) * r2);
    const StateField r4 = reaction_rate(xi + dt * r3);
    xi = xi + (dt / 6.0) * (r1 + 2.0 * r2 + 2.0 * r3 + r4);

    const double t = step * dt;
    const double sup = xi.sup_norm();
    if (!std::isfinite(sup) || sup > 1e6)
      throw BlowUp(t, "deviation sup norm left the admissible range at t = " + std::to_string(t));
    record(trace, t, xi, grid.h);
    if (snapshot_stride > 0 && step % snapshot_stride == 0) {
      trace.snapshots.push_back(xi);
      trace.snapshot_times.push_back(t);
    }
  }
  return trace;
}

SimulationTrace simulate_linear(const DiscreteOperator& op, const StateField& xi0,
                                double t_end, double dt) {
  if (dt <= 0.0) throw InvalidParams("dt must be positive");
  if (t_end < dt) throw InvalidParams("t_end must be at least dt");
  if (xi0.m() != op.m || xi0.k() != op.k || xi0.n() != op.n)
    throw DimensionMismatch("perturbation dimensions do not match the operator");

  const double h = 1.0 / op.n;
  const Eigen::MatrixXd propagator = (dt * op.matrix).exp();
  const int steps = static_cast<int>(std::ceil(t_end / dt - 1e-12));

  SimulationTrace trace;
  trace.scheme = "matrix_exponential";
  Eigen::VectorXd y = xi0.pack();
  record(trace, 0.0, xi0, h);
  for (int step = 1; step <= steps; ++step) {
    y = propagator * y;
    record(trace, step * dt, StateField::unpack(y, op.m, op.k, op.n), h);
  }
  return trace;
}

std::pair<StateField, std::vector<double>> picard_mild(
    const DiscreteOperator& op, const ModelSpec& model, const SteadyState& steady,
    const StateField& xi0, double t_end, int n_time, int n_iter) {
  if (t_end <= 0.0 || t_end > 1.0)
    throw InvalidParams("the mild-solution oracle is restricted to horizons 0 < t_end <= 1");
  if (n_time < 8) throw InvalidParams("n_time must be at least 8");
  if (n_iter < 2) throw InvalidParams("n_iter must be at least 2");
  if (xi0.m() != op.m || xi0.k() != op.k || xi0.n() != op.n)
    throw DimensionMismatch("perturbation dimensions do not match the operator");

  const Grid grid = Grid::make(op.n);
  const double delta = t_end / n_time;
  const Eigen::MatrixXd P = (delta * op.matrix).exp();

  // Curve 0: the semigroup applied to the initial deviation.
  std::vector<Eigen::VectorXd> homogeneous(n_time + 1);
  homogeneous[0] = xi0.pack();
  for (int j = 1; j <= n_time; ++j) homogeneous[j] = P * homogeneous[j - 1];
  std::vector<Eigen::VectorXd> curve = homogeneous;

  auto remainder_at = [&](const Eigen::VectorXd& y) {
    return nonlinear_remainder(model, steady, StateField::unpack(y, op.m, op.k, op.n), grid)
        .pack();
  };

  std::vector<double> gaps;
  int rises = 0;
  for (int it = 0; it < n_iter; ++it) {
    std::vector<Eigen::VectorXd> forcing(n_time + 1);
    for (int j = 0; j <= n_time; ++j) forcing[j] = remainder_at(curve[j]);

    std::vector<Eigen::VectorXd> next(n_time + 1);
    next[0] = homogeneous[0];
    Eigen::VectorXd integral = Eigen::VectorXd::Zero(homogeneous[0].size());
    double gap = 0.0;
    for (int j = 1; j <= n_time; ++j) {
      integral = P * integral + (0.5 * delta) * (P * forcing[j - 1] + forcing[j]);
      next[j] = homogeneous[j] + integral;
      gap = std::max(gap, (next[j] - curve[j]).cwiseAbs().maxCoeff());
    }
    curve = std::move(next);

    if (!gaps.empty() && gap > gaps.back()) {
      if (++rises >= 3)
        throw Divergence("mild-solution iteration gaps rose three times in a row");
    } else {
      rises = 0;
    }
    gaps.push_back(gap);
  }
  return {StateField::unpack(curve[n_time], op.m, op.k, op.n), gaps};
}

StateField perturb_eigenmode(const DiscreteOperator& op, double amplitude, int rank) {
  if (amplitude <= 0.0) throw InvalidParams("amplitude must be positive");
  const int size = static_cast<int>(op.matrix.rows());
  if (rank < 0 || rank >= size) throw InvalidParams("eigenmode rank out of range");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(op.matrix);
  if (solver.info() != Eigen::Success)
    throw EigensolveFailure("dense eigensolver did not converge");
  std::vector<int> order(size);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const std::complex<double> za = solver.eigenvalues()[a], zb = solver.eigenvalues()[b];
    return za.real() != zb.real() ? za.real() > zb.real() : za.imag() > zb.imag();
  });
  Eigen::VectorXd mode = solver.eigenvectors().col(order[rank]).real();
  if (mode.cwiseAbs().maxCoeff() < 1e-12)
    mode = solver.eigenvectors().col(order[rank]).imag();
  int lead = 0;
  mode.cwiseAbs().maxCoeff(&lead);
  if (mode[lead] < 0.0) mode = -mode;
  mode *= amplitude / mode.cwiseAbs().maxCoeff();
  return StateField::unpack(mode, op.m, op.k, op.n);
}

StateField perturb_uniform_random(int m, int k, int n, double amplitude, std::uint64_t seed) {
  if (amplitude <= 0.0) throw InvalidParams("amplitude must be positive");
  if (m < 0 || k < 0 || m + k < 1 || n < 1) throw InvalidParams("invalid field shape");
  // Raw 53-bit mapping instead of std::uniform_real_distribution, whose output
  // the standard leaves implementation-defined; this keeps seeds bit-portable.
  std::mt19937_64 gen(seed);
  auto draw = [&gen, amplitude]() {
    const double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return amplitude * (2.0 * unit - 1.0);
  };
  StateField xi = StateField::zero(m, k, n);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i) xi.u(a, i) = draw();
  for (int b = 0; b < k; ++b)
    for (int i = 0; i < n; ++i) xi.v(b, i) = draw();
  return xi;
}

StateField perturb_indicator_bump(int m, int k, const Grid& grid, double lo, double hi,
                                  double amplitude) {
  if (amplitude <= 0.0) throw InvalidParams("amplitude must be positive");
  if (!(lo < hi)) throw InvalidParams("bump interval must satisfy lo < hi");
  StateField xi = StateField::zero(m, k, grid.n);
  for (int i = 0; i < grid.n; ++i) {
    if (grid.nodes[i] < lo || grid.nodes[i] > hi) continue;
    for (int a = 0; a < m; ++a) xi.u(a, i) = amplitude;
    for (int b = 0; b < k; ++b) xi.v(b, i) = amplitude;
  }
  return xi;
}

RateFit estimate_rate(const SimulationTrace& trace, double fraction) {
  if (fraction <= 0.0 || fraction > 1.0) throw InvalidParams("fraction must lie in (0, 1]");
  const int size = static_cast<int>(trace.times.size());
  const int begin = static_cast<int>(std::floor((size - 1) * (1.0 - fraction)));
  const int count = size - begin;
  if (count < 10) throw InsufficientData("rate fit needs at least 10 samples in the window");
  for (int i = begin; i < size; ++i)
    if (!(trace.sup_norms[i] > 0.0))
      throw NonPositiveNorms("rate fit needs positive norms in the window");

  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (int i = begin; i < size; ++i) {
    const double t = trace.times[i], y = std::log(trace.sup_norms[i]);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double denom = count * stt - st * st;
  if (denom == 0.0) throw InsufficientData("rate fit window has no time spread");

  RateFit fit;
  fit.rate = (count * sty - st * sy) / denom;
  fit.intercept = (sy - fit.rate * st) / count;
  fit.t_start = trace.times[begin];
  fit.t_end = trace.times[size - 1];
  double ss = 0.0;
  for (int i = begin; i < size; ++i) {
    const double err = std::log(trace.sup_norms[i]) - (fit.intercept + fit.rate * trace.times[i]);
    ss += err * err;
  }
  fit.residual = std::sqrt(ss / count);
  return fit;
}

double default_dt(double s_L) {
  if (s_L == 0.0) return 1e-3;
  return std::min(1e-3, 0.1 / std::abs(s_L));
}

}  // namespace rdode
