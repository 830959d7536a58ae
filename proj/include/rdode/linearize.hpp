#pragma once

#include <vector>

#include "rdode/steady.hpp"

namespace rdode {

// Per-node Jacobian blocks of the reaction evaluated along a state:
// A = d_u f (m x m), B = d_v f (m x k), C = d_u g (k x m), D = d_v g (k x k).
struct JacobianField {
  int m = 0, k = 0, n = 0;
  std::vector<Eigen::MatrixXd> A_star;
  std::vector<Eigen::MatrixXd> B_star;
  std::vector<Eigen::MatrixXd> C_star;
  std::vector<Eigen::MatrixXd> D_star;
};

// Dense discretization of the linearized operator, component-major layout:
// row/column block a*n+i is component a at node i, u components first. The u
// rows carry no Laplacian coupling; each v component row block adds its scaled
// Neumann Laplacian.
struct DiscreteOperator {
  int m = 0, k = 0, n = 0;
  Eigen::VectorXd diffusion;
  Eigen::MatrixXd matrix;  // (m+k)n square
};

JacobianField jacobian_field(const ModelSpec& model, const StateField& field, const Grid& grid);
JacobianField jacobian_field(const ModelSpec& model, const SteadyState& steady, const Grid& grid);

// Block matrix [[A, B], [C, D + L_h]]; multiplication blocks are nodewise
// diagonal. Refuses (m+k) n > 4096 (dense storage bound).
DiscreteOperator assemble_operator(const JacobianField& jac, const Grid& grid,
                                   const Eigen::VectorXd& diffusion);

// Taylor remainder of the reaction about the steady state:
// N(xi) = reaction(s + xi) - reaction(s) - J(s) xi, nodewise; exactly zero at
// xi = 0 and identically zero for affine reactions.
StateField nonlinear_remainder(const ModelSpec& model, const SteadyState& steady,
                               const StateField& xi, const Grid& grid);

}  // namespace rdode
