#include "rdode/grid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "rdode/errors.hpp"

namespace rdode {

Grid Grid::make(int n) {
  if (n < 2) throw InvalidParams("grid size must be at least 2, got " + std::to_string(n));
  Grid g;
  g.n = n;
  g.h = 1.0 / n;
  g.nodes.resize(n);
  for (int i = 0; i < n; ++i) g.nodes[i] = (i + 0.5) * g.h;
  return g;
}

Eigen::MatrixXd laplacian_matrix(const Grid& grid, double d) {
  if (d <= 0.0) throw InvalidParams("diffusion coefficient must be positive");
  const int n = grid.n;
  const double w = d / (grid.h * grid.h);
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (i > 0) {
      lap(i, i - 1) = w;
      lap(i, i) -= w;
    }
    if (i < n - 1) {
      lap(i, i + 1) = w;
      lap(i, i) -= w;
    }
  }
  return lap;
}

double laplacian_mode_eigenvalue(const Grid& grid, int j) {
  if (j < 0 || j >= grid.n)
    throw InvalidParams("mode index " + std::to_string(j) + " outside [0, n)");
  const double h = grid.h;
  return -(2.0 / (h * h)) * (1.0 - std::cos(j * std::numbers::pi * h));
}

const Eigen::MatrixXd& cosine_modes(const Grid& grid) {
  static std::mutex mutex;
  static std::map<int, Eigen::MatrixXd> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(grid.n);
  if (it != cache.end()) return it->second;

  const int n = grid.n;
  Eigen::MatrixXd modes(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) modes(i, j) = std::cos(j * std::numbers::pi * grid.nodes[i]);
    modes.col(j) /= modes.col(j).norm();
  }
  return cache.emplace(n, std::move(modes)).first->second;
}

Eigen::VectorXd heat_propagate(const Grid& grid, double d, const Eigen::VectorXd& field,
                               double t) {
  if (d <= 0.0) throw InvalidParams("diffusion coefficient must be positive");
  if (t < 0.0) throw NegativeTime("propagation time must be nonnegative, got " + std::to_string(t));
  if (field.size() != grid.n) throw InvalidParams("field length does not match grid");
  if (t == 0.0) return field;

  const Eigen::MatrixXd& modes = cosine_modes(grid);
  Eigen::VectorXd coeffs = modes.transpose() * field;
  for (int j = 0; j < grid.n; ++j) coeffs[j] *= std::exp(d * laplacian_mode_eigenvalue(grid, j) * t);
  return modes * coeffs;
}

Eigen::MatrixXd heat_propagator_matrix(const Grid& grid, double d, double t) {
  if (d <= 0.0) throw InvalidParams("diffusion coefficient must be positive");
  if (t < 0.0) throw NegativeTime("propagation time must be nonnegative, got " + std::to_string(t));
  const Eigen::MatrixXd& modes = cosine_modes(grid);
  Eigen::VectorXd decay(grid.n);
  for (int j = 0; j < grid.n; ++j) decay[j] = std::exp(d * laplacian_mode_eigenvalue(grid, j) * t);
  return modes * decay.asDiagonal() * modes.transpose();
}

}  // namespace rdode
