#include "patchlab/spectrum.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace patchlab {

namespace {

// deterministic orientation: value at the vertex of largest magnitude is positive
void canonical_sign(Eigen::VectorXd& u) {
  int best = 0;
  for (int i = 1; i < u.size(); ++i)
    if (std::abs(u[i]) > std::abs(u[best])) best = i;
  if (u[best] < 0.0) u = -u;
}

} // namespace

SpectrumResult compute_dirichlet_eigs(const TaggedMesh& tagged, int count,
                                      const EigenSolveOptions& opts) {
  if (tagged.count_tag(FacetTag::Neumann) != 0)
    throw std::invalid_argument("compute_dirichlet_eigs: tagging must have epsilon = 0 "
                                "(no Neumann facets)");
  ConstrainedSystem cs = constrain(tagged);
  EigenSolveResult es = solve_generalized_eig(cs, count, 0.0, opts);
  SpectrumResult r;
  r.epsilon = 0.0;
  r.mesh_fingerprint = tagged.mesh.fingerprint();
  r.warnings = es.warnings;
  for (auto& p : es.pairs) canonical_sign(p.field);
  r.pairs = std::move(es.pairs);
  return r;
}

SpectrumResult compute_mixed_eigs(const TaggedMesh& tagged, int count,
                                  const SpectrumResult* reference,
                                  const EigenSolveOptions& opts) {
  if (tagged.epsilon <= 0.0 || tagged.count_tag(FacetTag::Neumann) == 0)
    throw std::invalid_argument("compute_mixed_eigs: tagging must carry a resolved Neumann patch");
  ConstrainedSystem cs = constrain(tagged);
  EigenSolveResult es = solve_generalized_eig(cs, count, 0.0, opts);
  SpectrumResult r;
  r.epsilon = tagged.epsilon;
  r.mesh_fingerprint = tagged.mesh.fingerprint();
  r.warnings = es.warnings;
  for (std::size_t i = 0; i < es.pairs.size(); ++i) {
    if (reference && i < reference->pairs.size()) {
      if (reference->mesh_fingerprint != r.mesh_fingerprint)
        throw std::invalid_argument("compute_mixed_eigs: sign reference must share the mesh");
      align_sign(es.pairs[i].field, reference->pairs[i].field, cs.M_full);
    } else {
      canonical_sign(es.pairs[i].field);
    }
  }
  r.pairs = std::move(es.pairs);
  return r;
}

VanishingOrderEstimate estimate_vanishing_order(const Mesh& mesh,
                                                const Eigen::VectorXd& phi, double lambda,
                                                const std::vector<double>& r_grid) {
  if (r_grid.empty())
    throw std::invalid_argument("estimate_vanishing_order: empty radius grid");
  FrequencyEvaluator ev(mesh, phi);
  VanishingOrderEstimate out;
  out.series = frequency_series(ev, lambda, r_grid);
  out.gamma_hat = out.series.N_values.front();
  return out;
}

PsiSpec extract_psi(const Mesh& mesh, const Eigen::VectorXd& phi, int gamma,
                    double fit_radius) {
  if (gamma < 1) throw std::invalid_argument("extract_psi: gamma must be a positive integer");
  auto basis = PsiSpec::odd_harmonic_basis(gamma);
  const int nb = static_cast<int>(basis.size());

  // local resolution check: the fit annulus must span several cells
  double h_loc = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c)
    if (mesh.cell_barycenter(c).norm() <= fit_radius)
      h_loc = std::max(h_loc, mesh.cell_diameter(c));
  if (fit_radius < 6.0 * h_loc) {
    std::ostringstream os;
    os << "extract_psi: fit_radius " << fit_radius << " below 6 local h (" << h_loc << ")";
    throw std::runtime_error(os.str());
  }

  Eigen::MatrixXd AtA = Eigen::MatrixXd::Zero(nb, nb);
  Eigen::VectorXd Atb = Eigen::VectorXd::Zero(nb);
  int n_rows = 0;
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const Vec3& x = mesh.vertices[v];
    double r = x.norm();
    if (r < 0.5 * fit_radius || r > fit_radius) continue;
    double scale = std::pow(r, gamma);
    Eigen::VectorXd row(nb);
    for (int j = 0; j < nb; ++j) row[j] = basis[j].eval(x) / scale;
    AtA += row * row.transpose();
    Atb += row * (phi[v] / scale);
    ++n_rows;
  }
  if (n_rows < 4 * nb)
    throw std::runtime_error("extract_psi: too few vertices in the fit annulus");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(AtA);
  double cond = es.eigenvalues().maxCoeff() / std::max(es.eigenvalues().minCoeff(), 0.0);
  if (!(es.eigenvalues().minCoeff() > 0.0) || cond > 1e8) {
    std::ostringstream os;
    os << "extract_psi: ill-conditioned normal equations (condition estimate " << cond << ")";
    throw std::runtime_error(os.str());
  }
  Eigen::VectorXd coeffs = AtA.ldlt().solve(Atb);
  return PsiSpec::from_coefficients(gamma, coeffs);
}

} // namespace patchlab
