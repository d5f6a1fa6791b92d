// Epsilon sweeps and the evidence assembly for the eigenvalue expansion:
// rate fit, coefficient comparison, sandwich bounds, blow-up norm ratios.
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "patchlab/profile.hpp"
#include "patchlab/spectrum.hpp"

namespace patchlab {

struct SweepNumerics {
  double h_far = 0.16;
  double patch_resolution = 6.0; // local size near the patch: eps * r_patch / this
  double transition_growth = 0.3;
  double rim_refine = 2.0;       // extra refinement factor at the patch rim
  // dedicated mesh for the vanishing-order / psi extraction solve
  double fit_h = 0.009;
  double fit_plateau = 0.12;
  double fit_radius = 0.08;
  std::vector<double> frequency_radii = {0.05, 0.075, 0.1, 0.15};
  EigenSolveOptions eig;
  ProfileNumerics profile; // drives C(patch, unit psi)
};

struct SweepConfig {
  double domain_radius = 1.0;
  PatchSpec patch = PatchSpec::disk(1.0);
  std::vector<double> epsilon_list = {0.4, 0.3, 0.2, 0.15, 0.1};
  int n0 = 1;
  SweepNumerics numerics;

  void validate() const; // strictly decreasing eps, max eps*diam(V) < radius/2
};

struct EpsilonRecord {
  double epsilon = 0.0;
  double lambda_eps = 0.0; // perturbed eigenvalue n0 on this mesh
  double lambda_dir = 0.0; // Dirichlet eigenvalue n0 on the same mesh
  double d = 0.0;          // lambda_dir - lambda_eps (> 0 by nesting)
  double C_emp = 0.0;      // d / eps^(N + 2 gamma - 2)
  bool resolved = true;
  std::string mesh_fingerprint;
  std::shared_ptr<TaggedMesh> tagged;      // mixed tagging (epsilon > 0)
  std::shared_ptr<Eigen::VectorXd> phi;    // aligned eigenfield n0
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

struct SweepResult {
  SweepConfig config;
  std::vector<EpsilonRecord> records; // in the order of epsilon_list (decreasing)
  double gamma_hat_raw = 0.0;
  int gamma = 1;
  PsiSpec psi;          // fitted blow-up polynomial of the limit eigenfunction
  double c = 0.0;       // leading coefficient (gamma = 1); 0 otherwise
  double lambda_limit = 0.0; // Dirichlet eigenvalue n0 on the fit mesh
  RateFit fit;
  double C_unit_patch = 0.0; // C(patch, psi = x_N)
  double C_pred = 0.0;       // c^2 * C_unit_patch (or C(patch, psi) for gamma = 2)
  double rate_exponent = 0.0; // N + 2 gamma - 2
};

// Ordinary least squares of log d against log eps.
RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& d);

// Runs the full sweep; `on_record` (optional) is invoked after each epsilon
// solve so partial results can be persisted before a later failure aborts.
SweepResult run_epsilon_sweep(const SweepConfig& config,
                              const std::function<void(const EpsilonRecord&)>& on_record = {});

struct SandwichReport {
  double r_V = 0.0, R_V = 0.0;
  double lower = 0.0, upper = 0.0; // C r_V^p (1-tol), C R_V^p (1+tol)
  double C_emp_min = 0.0;
  double tol = 0.25;
  bool pass = false;
};

// Inscribed/circumscribed disk bounds; C_ball_unit = C(B_1', psi = x_N).
SandwichReport sandwich_check(const SweepResult& sweep, double C_ball_unit,
                              double tol = 0.25);

struct BlowupReport {
  double R = 0.0;
  std::vector<double> epsilons;  // the two smallest
  std::vector<double> ratio_L2;  // scaled eigenfield mass over profile mass
  std::vector<double> ratio_H1;
  double tol = 0.2;
  bool pass = false;      // both ratios within tol of 1 at the smallest eps
  bool improving = false; // deviation decreases from the previous eps
};

// Theorem-style blow-up ratios against U = c (psi_unit + w0) from a profile
// solve at truncation radius >= 2R.
BlowupReport blowup_norm_check(const SweepResult& sweep, double R,
                               const ProfileSolution& unit_profile);

struct ConvergenceReport {
  bool d_positive = true;
  bool d_monotone = true; // WARN only when meshes are not nested
  bool d_small = true;    // d(eps_min) < 0.1 * lambda
  std::vector<std::string> warnings;
  bool pass = false;
};

ConvergenceReport eigen_convergence_check(const SweepResult& sweep);

} // namespace patchlab
