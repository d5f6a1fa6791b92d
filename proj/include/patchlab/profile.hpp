// Truncated half-space limit problems on B_R^+: the minimizer w_{0,Pi}, the
// coefficient m(Pi) and C(Pi) = -2 m, the profiles U_R and Z_R, and the
// scalar diagnostics g_R, chi(r) and the sphere flux identity.
#pragma once

#include <optional>
#include <vector>

#include "patchlab/fem.hpp"
#include "patchlab/mesh.hpp"
#include "patchlab/polynomial.hpp"

namespace patchlab {

struct ProfileNumerics {
  std::vector<double> R_list = {4.0, 8.0, 16.0};
  double h_patch = 0.10;    // mesh size over the patch zone
  double h_rim = 0.025;     // mesh size at the Dirichlet-Neumann rim
  double rim_growth = 0.4;  // size growth per unit distance from the rim
  double out_growth = 0.11; // size growth per unit radius beyond the patch zone
  bool scaling_self_test = false;
  LinearSolveOptions lin;
};

// Rim-graded mesh of B_R^+ driven by the patch geometry; Neumann tag on the
// patch at scale 1, Dirichlet on the flat remainder, ArtificialOuter on the cap.
TaggedMesh build_profile_mesh(double R, const PatchSpec& patch, const ProfileNumerics& num);

struct ProfileSolution {
  TaggedMesh tm;
  Eigen::VectorXd w;       // discrete w_{0,Pi}, zero on the truncation boundary
  double m_boundary = 0.0; // (1/2) int_Pi w d_nu psi   (facet quadrature)
  double m_energy = 0.0;   // -(1/2) int |grad w|^2     (stiffness energy)
  double R = 0.0;
  PsiSpec psi;
};

// Minimizer of J_Pi on the truncated domain: grad-grad form against Neumann
// data -d_nu psi = +d_{x_N} psi on the patch, zero Dirichlet elsewhere.
ProfileSolution solve_w0(const PatchSpec& patch, const PsiSpec& psi, double R,
                         const ProfileNumerics& num);

// Both evaluations of m; the reported value is the energy form.
std::pair<double, double> compute_m(const ProfileSolution& sol);

struct CoefficientReport {
  double m_extrapolated = 0.0;
  double C = 0.0; // -2 m
  std::vector<double> R_list;
  std::vector<double> m_values;
  std::vector<double> pair_extrapolants; // Richardson over consecutive R pairs
  double observed_order = 0.0;
  bool m_monotone = true;
  double scaling_self_test_ratio = 0.0; // ~1 when enabled, 0 otherwise
};

// Richardson extrapolation of m(R) in R^-(N + 2 gamma - 2) over num.R_list.
CoefficientReport compute_C(const PatchSpec& patch, const PsiSpec& psi,
                            const ProfileNumerics& num);

struct URSolution {
  TaggedMesh tm;
  Eigen::VectorXd u;    // harmonic, = psi on the cap and flat annulus, natural on Sigma
  double energy = 0.0;  // int_{B_R^+} |grad U_R|^2
  double psi_energy_interp = 0.0;  // same mesh, nodal interpolant of psi
  double psi_energy_exact = 0.0;   // closed form over the exact half-ball
  double R = 0.0;
  PsiSpec psi;
};

URSolution solve_U_R(double R, const std::optional<PatchSpec>& sigma, const PsiSpec& psi,
                     const ProfileNumerics& num);

// g_R = ||grad U_R||^2 - ||grad psi||^2 on B_R^+. Both terms are evaluated on
// the same mesh (the interpolant energy), so the boundary-faceting error
// cancels between them; the closed-form psi energy is reported alongside.
double compute_g_R(const URSolution& ur);

struct ZRSolution {
  TaggedMesh tm;
  Eigen::VectorXd z; // harmonic, zero on the whole flat disk, = U on the cap
  double energy = 0.0;
  double R = 0.0;
};

// Dirichlet data U on the cap interpolated from a larger solve.
ZRSolution solve_Z_R(double R, const PatchSpec& patch_for_grading, const Mesh& u_mesh,
                     const Eigen::VectorXd& u_values, const ProfileNumerics& num);

// Nodal values of U = psi + w0 on the profile mesh of `sol`.
Eigen::VectorXd profile_U_values(const ProfileSolution& sol);

// chi(r) = int_{S_1^+} U(r theta) Psi(theta) dS by hemisphere quadrature.
double compute_chi(const Mesh& mesh, const Eigen::VectorXd& U, const PsiSpec& psi, double r);

struct FluxReport {
  double flux = 0.0; // int_{S_R^+} psi d_nu U by interpolated normal derivative
  double band = 0.0; // offset below R where the gradient was sampled
};

FluxReport compute_flux_identity(const Mesh& mesh, const Eigen::VectorXd& U,
                                 const PsiSpec& psi, double R);

// Energy gap int_{B_R^+} |grad Z_R|^2 - |grad U|^2 (the latter clipped to B_R^+).
double compute_z_gap(const ZRSolution& zr, const Mesh& u_mesh, const Eigen::VectorXd& u_values);

} // namespace patchlab
