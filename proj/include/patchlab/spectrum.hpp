// Perturbed (mixed) and limit (Dirichlet) eigenproblems on the domain, and
// extraction of the vanishing order gamma and blow-up polynomial psi of the
// limit eigenfunction at 0.
#pragma once

#include <string>
#include <vector>

#include "patchlab/eigensolve.hpp"
#include "patchlab/frequency.hpp"
#include "patchlab/polynomial.hpp"

namespace patchlab {

struct SpectrumResult {
  double epsilon = 0.0;
  std::vector<EigenPair> pairs; // nondecreasing eigenvalues, M-orthonormal
  std::string mesh_fingerprint;
  std::vector<std::string> warnings;
};

// Limit problem: full Dirichlet boundary (epsilon = 0 tagging required).
SpectrumResult compute_dirichlet_eigs(const TaggedMesh& tagged, int count,
                                      const EigenSolveOptions& opts = {});

// Perturbed problem: requires a resolved Neumann patch; eigenfields are
// sign-aligned against `reference` (same mesh) when provided.
SpectrumResult compute_mixed_eigs(const TaggedMesh& tagged, int count,
                                  const SpectrumResult* reference = nullptr,
                                  const EigenSolveOptions& opts = {});

struct VanishingOrderEstimate {
  double gamma_hat = 0.0;    // frequency at the smallest radius
  FrequencySeries series;    // whole series, for monotonic sanity checks
};

// gamma_hat = N(v, r_min, lambda) of the even reflection of phi.
VanishingOrderEstimate estimate_vanishing_order(const Mesh& mesh,
                                                const Eigen::VectorXd& phi, double lambda,
                                                const std::vector<double>& r_grid);

// Least-squares fit of phi / |x|^gamma against the odd harmonic basis of
// degree gamma over mesh vertices with |x| in [fit_radius/2, fit_radius];
// pi0 follows by exact quadrature of the fitted polynomial.
PsiSpec extract_psi(const Mesh& mesh, const Eigen::VectorXd& phi, int gamma,
                    double fit_radius);

} // namespace patchlab
