#include "rdode/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rdode/errors.hpp"

namespace rdode {

namespace {

std::vector<Complex> matrix_eigenvalues(const Eigen::MatrixXd& mat) {
  if (mat.rows() == 1) return {Complex(mat(0, 0), 0.0)};
  Eigen::EigenSolver<Eigen::MatrixXd> solver(mat, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw EigensolveFailure("dense eigensolver did not converge");
  std::vector<Complex> eigs(mat.rows());
  for (int i = 0; i < mat.rows(); ++i) eigs[i] = solver.eigenvalues()[i];
  return eigs;
}

double cross(const Complex& o, const Complex& a, const Complex& b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) -
         (a.imag() - o.imag()) * (b.real() - o.real());
}

// Monotone-chain convex hull; collinear points are dropped.
std::vector<Complex> convex_hull(std::vector<Complex> pts) {
  std::sort(pts.begin(), pts.end(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const int n = static_cast<int>(pts.size());
  if (n < 3) return {};
  std::vector<Complex> hull(2 * n);
  int h = 0;
  for (int i = 0; i < n; ++i) {
    while (h >= 2 && cross(hull[h - 2], hull[h - 1], pts[i]) <= 0.0) --h;
    hull[h++] = pts[i];
  }
  for (int i = n - 2, base = h + 1; i >= 0; --i) {
    while (h >= base && cross(hull[h - 2], hull[h - 1], pts[i]) <= 0.0) --h;
    hull[h++] = pts[i];
  }
  hull.resize(h - 1);
  return hull.size() >= 3 ? hull : std::vector<Complex>{};
}

bool strictly_inside(const std::vector<Complex>& hull, const Complex& z) {
  for (size_t i = 0; i < hull.size(); ++i) {
    const Complex& a = hull[i];
    const Complex& b = hull[(i + 1) % hull.size()];
    if (cross(a, b, z) <= 0.0) return false;
  }
  return true;
}

}  // namespace

std::vector<Complex> essential_spectrum(const JacobianField& jac) {
  std::vector<Complex> samples;
  samples.reserve(static_cast<size_t>(jac.n) * jac.m);
  for (int i = 0; i < jac.n; ++i)
    for (const Complex& z : matrix_eigenvalues(jac.A_star[i])) samples.push_back(z);
  return samples;
}

std::pair<std::vector<Complex>, std::vector<Complex>> discrete_eigenvalues(
    const DiscreteOperator& op, const std::vector<Complex>& essential, double tol_ess) {
  if (tol_ess <= 0.0) throw InvalidParams("tol_ess must be positive");
  std::vector<Complex> kept, discarded;
  for (const Complex& z : matrix_eigenvalues(op.matrix)) {
    double dist = std::numeric_limits<double>::infinity();
    for (const Complex& e : essential) dist = std::min(dist, std::abs(z - e));
    (dist <= tol_ess ? discarded : kept).push_back(z);
  }
  return {kept, discarded};
}

Complex evans_function(const JacobianField& jac, const Grid& grid, double diffusion,
                       Complex lambda) {
  if (jac.m != 1 || jac.k != 1)
    throw UnsupportedShape("the reduced eigenproblem requires a scalar (m = k = 1) model");
  if (diffusion <= 0.0) throw InvalidParams("diffusion must be positive");
  for (int i = 0; i < jac.n; ++i)
    if (std::abs(lambda - Complex(jac.A_star[i](0, 0), 0.0)) <= 1e-8)
      throw ResolventSingular("lambda is not in the resolvent set of the sampled A block");

  Complex xi(1.0, 0.0), eta(0.0, 0.0);  // xi(0) = 1, xi'(0) = 0
  const double step = grid.h / 4.0;
  for (int i = 0; i < jac.n; ++i) {
    const double A = jac.A_star[i](0, 0), B = jac.B_star[i](0, 0);
    const double C = jac.C_star[i](0, 0), D = jac.D_star[i](0, 0);
    const Complex q = (lambda - D - C * B / (lambda - A)) / diffusion;
    for (int s = 0; s < 4; ++s) {
      const Complex k1x = eta, k1e = q * xi;
      const Complex k2x = eta + 0.5 * step * k1e, k2e = q * (xi + 0.5 * step * k1x);
      const Complex k3x = eta + 0.5 * step * k2e, k3e = q * (xi + 0.5 * step * k2x);
      const Complex k4x = eta + step * k3e, k4e = q * (xi + step * k3x);
      xi += step / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      eta += step / 6.0 * (k1e + 2.0 * k2e + 2.0 * k3e + k4e);
    }
  }
  return eta;
}

double spectral_bound(const SpectrumReport& report) { return std::max(report.s_A, report.s_inf); }

double default_tol_ess(const Grid& grid, const std::vector<Complex>& essential) {
  double spread = 0.0;
  if (!essential.empty()) {
    double re_lo = essential[0].real(), re_hi = re_lo;
    double im_lo = essential[0].imag(), im_hi = im_lo;
    for (const Complex& z : essential) {
      re_lo = std::min(re_lo, z.real());
      re_hi = std::max(re_hi, z.real());
      im_lo = std::min(im_lo, z.imag());
      im_hi = std::max(im_hi, z.imag());
    }
    spread = (re_hi - re_lo) + (im_hi - im_lo);
  }
  return std::max(10.0 * grid.h, 1e-3) * (1.0 + spread);
}

double default_margin(const SpectrumReport& report) {
  return 1e-4 * std::max(1.0, std::abs(report.s_A));
}

SpectrumReport compute_spectrum(const DiscreteOperator& op, const JacobianField& jac,
                                const Grid& grid, double tol_ess) {
  SpectrumReport report;
  report.grid_n = grid.n;
  report.essential_samples = essential_spectrum(jac);
  report.tol_ess = tol_ess > 0.0 ? tol_ess : default_tol_ess(grid, report.essential_samples);
  for (const Complex& z : report.essential_samples) report.s_A = std::max(report.s_A, z.real());
  auto [kept, discarded] = discrete_eigenvalues(op, report.essential_samples, report.tol_ess);
  report.discrete_eigs = std::move(kept);
  report.essential_cluster_eigs = std::move(discarded);
  for (const Complex& z : report.discrete_eigs) report.s_inf = std::max(report.s_inf, z.real());
  report.s_L = spectral_bound(report);
  if (jac.m >= 2)
    report.sigma0_flagged = enclosed_candidates(report.essential_samples, report.discrete_eigs);
  return report;
}

SufficientReport check_sufficient_stability(const JacobianField& jac) {
  if (jac.m != 1 || jac.k != 1)
    throw UnsupportedShape("the pointwise sufficient condition requires m = k = 1");
  SufficientReport rep;
  rep.max_A_star = -std::numeric_limits<double>::infinity();
  rep.max_D_star = -std::numeric_limits<double>::infinity();
  rep.min_det = std::numeric_limits<double>::infinity();
  for (int i = 0; i < jac.n; ++i) {
    const double A = jac.A_star[i](0, 0), B = jac.B_star[i](0, 0);
    const double C = jac.C_star[i](0, 0), D = jac.D_star[i](0, 0);
    rep.max_A_star = std::max(rep.max_A_star, A);
    rep.max_D_star = std::max(rep.max_D_star, D);
    rep.min_det = std::min(rep.min_det, A * D - B * C);
  }
  rep.cond_A = rep.max_A_star <= -1e-10;
  rep.cond_D = rep.max_D_star <= 1e-12;
  rep.cond_det = rep.min_det > 1e-10;
  rep.passed = rep.cond_A && rep.cond_D && rep.cond_det;
  return rep;
}

Verdict classify(const SpectrumReport& report, double margin) {
  if (margin <= 0.0) throw InvalidParams("classification margin must be positive");
  Verdict verdict;
  std::ostringstream detail;
  if (report.s_L < -margin) {
    verdict.label = "Stable";
    detail << "s_L = " << report.s_L << " < -margin = " << -margin;
    verdict.reasons.push_back(detail.str());
  } else if (report.s_L > margin) {
    verdict.label = "Unstable";
    if (report.s_A > margin) verdict.reasons.push_back("s(A*) > 0");
    if (report.s_inf > margin) verdict.reasons.push_back("positive discrete eigenvalue");
    detail << "s_L = " << report.s_L << " > margin = " << margin;
    verdict.reasons.push_back(detail.str());
  } else {
    verdict.label = "Inconclusive";
    detail << "s_L = " << report.s_L << " within the +-" << margin
           << " dead zone around zero; the boundary case carries no theorem";
    verdict.reasons.push_back(detail.str());
  }
  return verdict;
}

std::vector<Complex> enclosed_candidates(const std::vector<Complex>& essential,
                                         const std::vector<Complex>& eigs) {
  std::vector<Complex> hull = convex_hull(essential);
  if (hull.empty()) return {};
  std::vector<Complex> inside;
  for (const Complex& z : eigs)
    if (strictly_inside(hull, z)) inside.push_back(z);
  return inside;
}

}  // namespace rdode
