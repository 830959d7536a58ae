#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "rdode/grid.hpp"

namespace rdode {

// Nodal values of the m non-diffusing components u and k diffusing components v.
struct StateField {
  Eigen::MatrixXd u;  // m x n
  Eigen::MatrixXd v;  // k x n

  int m() const { return static_cast<int>(u.rows()); }
  int k() const { return static_cast<int>(v.rows()); }
  int n() const { return static_cast<int>(u.cols()); }

  static StateField zero(int m, int k, int n) {
    return StateField{Eigen::MatrixXd::Zero(m, n), Eigen::MatrixXd::Zero(k, n)};
  }

  double sup_norm() const {
    double s = 0.0;
    if (u.size() > 0) s = u.cwiseAbs().maxCoeff();
    if (v.size() > 0) s = std::max(s, v.cwiseAbs().maxCoeff());
    return s;
  }

  // Component-major packing: u row 0 over all nodes, ..., u row m-1, then the
  // v rows. Matches the discrete operator's layout.
  Eigen::VectorXd pack() const;
  static StateField unpack(const Eigen::VectorXd& y, int m, int k, int n);
};

StateField operator+(const StateField& a, const StateField& b);
StateField operator-(const StateField& a, const StateField& b);
StateField operator*(double s, const StateField& a);

struct HysteresisParams {
  double alpha = 1.0;
  double beta = 1.0;
  std::array<double, 3> p_coeffs{2.5, -3.0, 1.0};  // p(u) = c1 u + c2 u^2 + c3 u^3
  double diffusion = 1e-2;
};

struct DdiParams {
  double kappa = 1.0;  // Hill constant
  double mu = 1.0;
  double m1 = 3.0;
  double m2 = 4.0;
  double diffusion = 1e-2;
};

using ReactionFn = std::function<void(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                      double x, Eigen::VectorXd& f, Eigen::VectorXd& g)>;
using ReactionJacobianFn =
    std::function<Eigen::MatrixXd(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double x)>;

// A reaction-diffusion-ODE system: m components without diffusion, k with
// diagonal diffusion and zero-flux boundaries, coupled through (f, g).
// Evaluators must be pure; the spec is immutable after construction.
struct ModelSpec {
  int m = 0;
  int k = 0;
  Eigen::VectorXd diffusion;  // k positive entries
  ReactionFn reaction;
  ReactionJacobianFn reaction_jacobian;  // (m+k)x(m+k), rows (f, g), cols (u, v)
  std::string name;

  // Construction parameters, kept so branch geometry is recoverable downstream.
  std::optional<HysteresisParams> hysteresis;
  std::optional<DdiParams> ddi;
};

double cubic_p(const std::array<double, 3>& c, double u);
double cubic_dp(const std::array<double, 3>& c, double u);
double cubic_d2p(const std::array<double, 3>& c, double u);

// Throw InvalidParams naming the violated invariant.
void validate(const HysteresisParams& params);
void validate(const DdiParams& params);

// f = v - p(u), g = alpha u - beta v, Jacobian [[-p'(u), 1], [alpha, -beta]].
ModelSpec build_hysteresis_model(const HysteresisParams& params);

// f = -u - uv + m1 u^2/(1 + kappa u^2), g = -mu v - uv + m2 u^2/(1 + kappa u^2).
ModelSpec build_ddi_model(const DdiParams& params);

// Nodewise (f, g) values. Throws DimensionMismatch.
StateField evaluate_reaction(const ModelSpec& model, const StateField& state, const Grid& grid);

// Named parameter sets. The stable-pattern set lowers alpha so a jump pattern
// with inf p'(u) > alpha/beta exists (the symmetric default cubic admits none
// for alpha = beta).
HysteresisParams hysteresis_default();       // alpha=beta=1, p = 2.5u - 3u^2 + u^3
HysteresisParams bistable_default();         // alpha=beta=1, p = 1.5u - 1.5u^2 + u^3 (monotone)
HysteresisParams stable_hysteresis_params(); // alpha=0.5, beta=1, hysteresis cubic
DdiParams ddi_default();                     // kappa=1, mu=1, m1=3, m2=4

}  // namespace rdode
