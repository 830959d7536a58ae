#include "rdode/model.hpp"

#include <cmath>
#include <string>

#include "rdode/errors.hpp"

namespace rdode {

Eigen::VectorXd StateField::pack() const {
  const int rows_u = m(), rows_v = k(), cols = n();
  Eigen::VectorXd y((rows_u + rows_v) * cols);
  for (int a = 0; a < rows_u; ++a) y.segment(a * cols, cols) = u.row(a).transpose();
  for (int b = 0; b < rows_v; ++b) y.segment((rows_u + b) * cols, cols) = v.row(b).transpose();
  return y;
}

StateField StateField::unpack(const Eigen::VectorXd& y, int m, int k, int n) {
  if (y.size() != (m + k) * n) throw DimensionMismatch("packed vector length does not match (m+k)n");
  StateField s = StateField::zero(m, k, n);
  for (int a = 0; a < m; ++a) s.u.row(a) = y.segment(a * n, n).transpose();
  for (int b = 0; b < k; ++b) s.v.row(b) = y.segment((m + b) * n, n).transpose();
  return s;
}

StateField operator+(const StateField& a, const StateField& b) {
  return StateField{a.u + b.u, a.v + b.v};
}

StateField operator-(const StateField& a, const StateField& b) {
  return StateField{a.u - b.u, a.v - b.v};
}

StateField operator*(double s, const StateField& a) { return StateField{s * a.u, s * a.v}; }

double cubic_p(const std::array<double, 3>& c, double u) {
  return u * (c[0] + u * (c[1] + u * c[2]));
}

double cubic_dp(const std::array<double, 3>& c, double u) {
  return c[0] + u * (2.0 * c[1] + u * 3.0 * c[2]);
}

double cubic_d2p(const std::array<double, 3>& c, double u) { return 2.0 * c[1] + 6.0 * c[2] * u; }

void validate(const HysteresisParams& params) {
  if (params.alpha <= 0.0) throw InvalidParams("alpha must be positive");
  if (params.beta <= 0.0) throw InvalidParams("beta must be positive");
  if (params.diffusion <= 0.0) throw InvalidParams("diffusion must be positive");
  const auto& c = params.p_coeffs;
  if (c[2] == 0.0) throw InvalidParams("p must be a genuine cubic (c3 != 0)");
  if (c[1] * c[1] - 4.0 * c[0] * c[2] >= 0.0)
    throw InvalidParams("p must have u = 0 as its only real root (c2^2 - 4 c1 c3 < 0 fails)");
  const double slope = params.alpha / params.beta;
  if (c[0] <= slope)
    throw InvalidParams("p'(0) = " + std::to_string(c[0]) +
                        " must exceed alpha/beta = " + std::to_string(slope));
  // Nonzero intersections of p(u) = (alpha/beta) u solve c3 u^2 + c2 u + (c1 - slope) = 0;
  // two distinct positive roots are required for the three-intersection geometry.
  const double disc = c[1] * c[1] - 4.0 * c[2] * (c[0] - slope);
  if (disc <= 0.0)
    throw InvalidParams("p(u) = (alpha/beta) u must have three distinct nonnegative roots "
                        "(discriminant of the reduced quadratic is not positive)");
  if (-c[1] / c[2] <= 0.0 || (c[0] - slope) / c[2] <= 0.0)
    throw InvalidParams("nonzero intersections of p(u) = (alpha/beta) u must both be positive");
}

void validate(const DdiParams& params) {
  if (params.kappa <= 0.0) throw InvalidParams("kappa must be positive");
  if (params.mu <= 0.0) throw InvalidParams("mu must be positive");
  if (params.m2 <= 0.0) throw InvalidParams("m2 must be positive");
  if (params.diffusion <= 0.0) throw InvalidParams("diffusion must be positive");
  if (params.m1 <= 2.0 * std::sqrt(params.kappa))
    throw InvalidParams("m1 = " + std::to_string(params.m1) + " must exceed 2 sqrt(kappa) = " +
                        std::to_string(2.0 * std::sqrt(params.kappa)));
}

ModelSpec build_hysteresis_model(const HysteresisParams& params) {
  validate(params);
  ModelSpec model;
  model.m = 1;
  model.k = 1;
  model.diffusion = Eigen::VectorXd::Constant(1, params.diffusion);
  model.name = "hysteresis";
  model.hysteresis = params;
  const auto c = params.p_coeffs;
  const double alpha = params.alpha, beta = params.beta;
  model.reaction = [c, alpha, beta](const Eigen::VectorXd& u, const Eigen::VectorXd& v, double,
                                    Eigen::VectorXd& f, Eigen::VectorXd& g) {
    f.resize(1);
    g.resize(1);
    f[0] = v[0] - cubic_p(c, u[0]);
    g[0] = alpha * u[0] - beta * v[0];
  };
  model.reaction_jacobian = [c, alpha, beta](const Eigen::VectorXd& u, const Eigen::VectorXd&,
                                             double) {
    Eigen::MatrixXd jac(2, 2);
    jac << -cubic_dp(c, u[0]), 1.0, alpha, -beta;
    return jac;
  };
  return model;
}

ModelSpec build_ddi_model(const DdiParams& params) {
  validate(params);
  ModelSpec model;
  model.m = 1;
  model.k = 1;
  model.diffusion = Eigen::VectorXd::Constant(1, params.diffusion);
  model.name = "ddi";
  model.ddi = params;
  const double kappa = params.kappa, mu = params.mu, m1 = params.m1, m2 = params.m2;
  model.reaction = [kappa, mu, m1, m2](const Eigen::VectorXd& u, const Eigen::VectorXd& v, double,
                                       Eigen::VectorXd& f, Eigen::VectorXd& g) {
    f.resize(1);
    g.resize(1);
    const double hill = u[0] * u[0] / (1.0 + kappa * u[0] * u[0]);
    f[0] = -u[0] - u[0] * v[0] + m1 * hill;
    g[0] = -mu * v[0] - u[0] * v[0] + m2 * hill;
  };
  model.reaction_jacobian = [kappa, mu, m1, m2](const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                                double) {
    const double denom = 1.0 + kappa * u[0] * u[0];
    const double dhill = 2.0 * u[0] / (denom * denom);
    Eigen::MatrixXd jac(2, 2);
    jac << -1.0 - v[0] + m1 * dhill, -u[0], -v[0] + m2 * dhill, -mu - u[0];
    return jac;
  };
  return model;
}

StateField evaluate_reaction(const ModelSpec& model, const StateField& state, const Grid& grid) {
  if (state.m() != model.m || state.k() != model.k)
    throw DimensionMismatch("state component counts do not match the model");
  if (state.n() != grid.n) throw DimensionMismatch("state node count does not match the grid");
  StateField out = StateField::zero(model.m, model.k, grid.n);
  Eigen::VectorXd f(model.m), g(model.k);
  for (int i = 0; i < grid.n; ++i) {
    model.reaction(state.u.col(i), state.v.col(i), grid.nodes[i], f, g);
    if (f.size() != model.m || g.size() != model.k)
      throw DimensionMismatch("reaction output size does not match (m, k)");
    out.u.col(i) = f;
    out.v.col(i) = g;
  }
  return out;
}

HysteresisParams hysteresis_default() { return HysteresisParams{}; }

HysteresisParams bistable_default() {
  HysteresisParams params;
  params.p_coeffs = {1.5, -1.5, 1.0};
  return params;
}

HysteresisParams stable_hysteresis_params() {
  HysteresisParams params;
  params.alpha = 0.5;
  return params;
}

DdiParams ddi_default() { return DdiParams{}; }

}  // namespace rdode
