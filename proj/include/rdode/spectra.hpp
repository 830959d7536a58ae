#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <utility>

#include "rdode/linearize.hpp"

namespace rdode {

using Complex = std::complex<double>;

// Spectral decomposition of the discrete operator: the union over nodes of the
// eigenvalues of the non-diffusing block A approximates the essential part;
// eigenvalues of the assembled matrix far enough from those samples stand in
// for the discrete part.
struct SpectrumReport {
  std::vector<Complex> essential_samples;
  std::vector<Complex> discrete_eigs;
  std::vector<Complex> essential_cluster_eigs;  // discarded: within tol_ess of the samples
  std::vector<Complex> sigma0_flagged;  // kept eigenvalues enclosed by the sample hull (m >= 2)
  double s_A = -std::numeric_limits<double>::infinity();
  double s_inf = -std::numeric_limits<double>::infinity();  // -inf when no discrete eigenvalues
  double s_L = -std::numeric_limits<double>::infinity();
  int grid_n = 0;
  double tol_ess = 0.0;
};

struct Verdict {
  std::string label;  // Stable | Unstable | Inconclusive
  std::vector<std::string> reasons;
  std::optional<bool> sufficient_condition_passed;
};

// All eigenvalues of the m x m block A at every node.
std::vector<Complex> essential_spectrum(const JacobianField& jac);

// Full dense eigensolve of the operator; eigenvalues within tol_ess (Euclidean
// distance) of any essential sample are discarded, the rest kept.
// Returns (kept, discarded). Throws EigensolveFailure.
std::pair<std::vector<Complex>, std::vector<Complex>> discrete_eigenvalues(
    const DiscreteOperator& op, const std::vector<Complex>& essential, double tol_ess);

// Shooting mismatch E(lambda) = xi'(1) of the reduced scalar eigenproblem
// d xi'' = (lambda - D - C B / (lambda - A)) xi, xi(0) = 1, xi'(0) = 0, with
// coefficients frozen per cell. Zeros of E locate discrete eigenvalues.
// Requires m = k = 1 (UnsupportedShape) and min_i |lambda - A_i| > 1e-8
// (ResolventSingular).
Complex evans_function(const JacobianField& jac, const Grid& grid, double diffusion,
                       Complex lambda);

double spectral_bound(const SpectrumReport& report);  // max(s_A, s_inf)

// max(10 h, 1e-3) * (1 + spread), spread = Re width + Im width of the samples:
// discretization smears the essential part into clusters of width O(h).
double default_tol_ess(const Grid& grid, const std::vector<Complex>& essential);

// 1e-4 * max(1, |s_A|): dead zone for the sign classification.
double default_margin(const SpectrumReport& report);

// Full pipeline: essential samples, eigensolve + filtering, bounds, and (for
// m >= 2) the enclosed-candidate flag. tol_ess = 0 selects the default.
SpectrumReport compute_spectrum(const DiscreteOperator& op, const JacobianField& jac,
                                const Grid& grid, double tol_ess = 0.0);

// Pointwise sufficient condition for a negative spectral bound (m = k = 1):
// A <= -1e-10, D <= 1e-12, A D - B C > 1e-10 at every node.
struct SufficientReport {
  bool passed = false;
  bool cond_A = false, cond_D = false, cond_det = false;
  double max_A_star = 0.0, max_D_star = 0.0, min_det = 0.0;
};
SufficientReport check_sufficient_stability(const JacobianField& jac);  // UnsupportedShape

// Stable if s_L < -margin, Unstable if s_L > margin, otherwise Inconclusive
// (the boundary case 0 in the spectrum carries no theorem).
Verdict classify(const SpectrumReport& report, double margin);

// Kept eigenvalues strictly inside the convex hull of the essential samples;
// candidates for spectrum filling bounded resolvent components. Flag only.
std::vector<Complex> enclosed_candidates(const std::vector<Complex>& essential,
                                         const std::vector<Complex>& eigs);

}  // namespace rdode
