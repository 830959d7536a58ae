#pragma once

#include <Eigen/Dense>

namespace rdode {

// Cell-centered grid on (0,1): n cells of width h = 1/n, nodes at (i+1/2)h.
// Mirrored ghost cells make the sampled cosines cos(j*pi*x) exact eigenvectors
// of the Neumann Laplacian below, which is what keeps heat propagation exact.
struct Grid {
  int n = 0;
  double h = 0.0;
  Eigen::VectorXd nodes;

  static Grid make(int n);
};

// Symmetric tridiagonal Neumann Laplacian scaled by d: off-diagonal d/h^2,
// diagonal -2d/h^2 except -d/h^2 at both ends. Row sums are zero.
Eigen::MatrixXd laplacian_matrix(const Grid& grid, double d);

// mu_j^h = -(2/h^2)(1 - cos(j pi h)), the eigenvalue of laplacian_matrix(grid, 1)
// for the sampled cosine mode c_j.
double laplacian_mode_eigenvalue(const Grid& grid, int j);

// Unit-norm sampled cosine columns c_j[i] = cos(j pi nodes[i]); they diagonalize
// laplacian_matrix exactly. Cached per n.
const Eigen::MatrixXd& cosine_modes(const Grid& grid);

// Expands field in the cosine basis, multiplies mode j by exp(d mu_j^h t),
// reconstructs. t = 0 returns the field unchanged. Throws NegativeTime.
Eigen::VectorXd heat_propagate(const Grid& grid, double d, const Eigen::VectorXd& field, double t);

// Dense matrix performing heat_propagate(grid, d, ., t); used where one fixed
// step is applied many times.
Eigen::MatrixXd heat_propagator_matrix(const Grid& grid, double d, double t);

}  // namespace rdode
