#include "rdode/linearize.hpp"

#include <string>

#include "rdode/errors.hpp"

namespace rdode {

JacobianField jacobian_field(const ModelSpec& model, const StateField& field, const Grid& grid) {
  if (field.m() != model.m || field.k() != model.k)
    throw DimensionMismatch("field component counts do not match the model");
  if (field.n() != grid.n) throw DimensionMismatch("field node count does not match the grid");
  const int m = model.m, k = model.k, n = grid.n;
  JacobianField jac;
  jac.m = m;
  jac.k = k;
  jac.n = n;
  jac.A_star.resize(n);
  jac.B_star.resize(n);
  jac.C_star.resize(n);
  jac.D_star.resize(n);
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd full = model.reaction_jacobian(field.u.col(i), field.v.col(i), grid.nodes[i]);
    if (full.rows() != m + k || full.cols() != m + k)
      throw DimensionMismatch("reaction Jacobian must be (m+k) x (m+k)");
    if (!full.allFinite()) throw InvalidParams("reaction Jacobian has non-finite entries");
    jac.A_star[i] = full.topLeftCorner(m, m);
    jac.B_star[i] = full.topRightCorner(m, k);
    jac.C_star[i] = full.bottomLeftCorner(k, m);
    jac.D_star[i] = full.bottomRightCorner(k, k);
  }
  return jac;
}

JacobianField jacobian_field(const ModelSpec& model, const SteadyState& steady, const Grid& grid) {
  return jacobian_field(model, steady.field, grid);
}

DiscreteOperator assemble_operator(const JacobianField& jac, const Grid& grid,
                                   const Eigen::VectorXd& diffusion) {
  const int m = jac.m, k = jac.k, n = jac.n;
  if (n != grid.n) throw DimensionMismatch("Jacobian field node count does not match the grid");
  if (diffusion.size() != k) throw DimensionMismatch("diffusion must have k entries");
  const int size = (m + k) * n;
  if (size > 4096)
    throw UnsupportedShape("dense operator limited to (m+k)n <= 4096, got " +
                           std::to_string(size));

  DiscreteOperator op;
  op.m = m;
  op.k = k;
  op.n = n;
  op.diffusion = diffusion;
  op.matrix = Eigen::MatrixXd::Zero(size, size);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < m; ++a) {
      for (int a2 = 0; a2 < m; ++a2) op.matrix(a * n + i, a2 * n + i) = jac.A_star[i](a, a2);
      for (int b = 0; b < k; ++b) op.matrix(a * n + i, (m + b) * n + i) = jac.B_star[i](a, b);
    }
    for (int b = 0; b < k; ++b) {
      for (int a = 0; a < m; ++a) op.matrix((m + b) * n + i, a * n + i) = jac.C_star[i](b, a);
      for (int b2 = 0; b2 < k; ++b2)
        op.matrix((m + b) * n + i, (m + b2) * n + i) = jac.D_star[i](b, b2);
    }
  }
  for (int b = 0; b < k; ++b)
    op.matrix.block((m + b) * n, (m + b) * n, n, n) += laplacian_matrix(grid, diffusion[b]);
  return op;
}

StateField nonlinear_remainder(const ModelSpec& model, const SteadyState& steady,
                               const StateField& xi, const Grid& grid) {
  if (xi.m() != model.m || xi.k() != model.k || xi.n() != grid.n)
    throw DimensionMismatch("perturbation dimensions do not match model and grid");
  StateField at_steady = evaluate_reaction(model, steady.field, grid);
  StateField shifted = evaluate_reaction(model, steady.field + xi, grid);
  JacobianField jac = jacobian_field(model, steady.field, grid);
  StateField remainder = shifted - at_steady;
  for (int i = 0; i < grid.n; ++i) {
    remainder.u.col(i) -= jac.A_star[i] * xi.u.col(i) + jac.B_star[i] * xi.v.col(i);
    remainder.v.col(i) -= jac.C_star[i] * xi.u.col(i) + jac.D_star[i] * xi.v.col(i);
  }
  return remainder;
}

}  // namespace rdode
