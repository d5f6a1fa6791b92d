#include "patchlab/profile.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "patchlab/interpolate.hpp"
#include "patchlab/quadrature.hpp"

namespace patchlab {

namespace {

double local_mesh_size_at_radius(const Mesh& mesh, double r) {
  double h = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& k = mesh.cells[c];
    double rmin = 1e300, rmax = 0.0;
    for (int i = 0; i <= mesh.dim; ++i) {
      double nr = mesh.vertices[k[i]].norm();
      rmin = std::min(rmin, nr);
      rmax = std::max(rmax, nr);
    }
    if (rmin <= r && r <= rmax) h = std::max(h, mesh.cell_diameter(c));
  }
  return h;
}

Eigen::VectorXd psi_nodal(const Mesh& mesh, const PsiSpec& psi) {
  Eigen::VectorXd v(mesh.n_vertices());
  for (int i = 0; i < mesh.n_vertices(); ++i) v[i] = psi.poly.eval(mesh.vertices[i]);
  return v;
}

// Neumann load vector: int_Pi f phi_v with f = -d_nu psi = +d_{x_N} psi,
// assembled with the 3-point facet rule (exact for the degrees used).
Eigen::VectorXd neumann_load(const TaggedMesh& tm, const PsiSpec& psi) {
  const Mesh& m = tm.mesh;
  Polynomial f = psi.poly.derivative(2);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m.n_vertices());
  for (int fa = 0; fa < m.n_facets(); ++fa) {
    if (tm.facet_tags[fa] != FacetTag::Neumann) continue;
    const auto& k = m.boundary_facets[fa];
    const Vec3 &p0 = m.vertices[k[0]], &p1 = m.vertices[k[1]], &p2 = m.vertices[k[2]];
    double area = m.facet_area(fa);
    // midpoint rule nodes carry the P1 hat values (1/2, 1/2, 0) pattern
    Vec3 m01 = 0.5 * (p0 + p1), m12 = 0.5 * (p1 + p2), m20 = 0.5 * (p2 + p0);
    double f01 = f.eval(m01), f12 = f.eval(m12), f20 = f.eval(m20);
    b[k[0]] += area / 3.0 * 0.5 * (f01 + f20);
    b[k[1]] += area / 3.0 * 0.5 * (f01 + f12);
    b[k[2]] += area / 3.0 * 0.5 * (f12 + f20);
  }
  return b;
}

double m_boundary_quadrature(const TaggedMesh& tm, const PsiSpec& psi,
                             const Eigen::VectorXd& w) {
  // (1/2) int_Pi w d_nu psi = -(1/2) int_Pi w f with f = +d_{x_N} psi
  const Mesh& m = tm.mesh;
  Polynomial f = psi.poly.derivative(2);
  double total = 0.0;
  for (int fa = 0; fa < m.n_facets(); ++fa) {
    if (tm.facet_tags[fa] != FacetTag::Neumann) continue;
    const auto& k = m.boundary_facets[fa];
    const Vec3 &p0 = m.vertices[k[0]], &p1 = m.vertices[k[1]], &p2 = m.vertices[k[2]];
    double area = m.facet_area(fa);
    Vec3 m01 = 0.5 * (p0 + p1), m12 = 0.5 * (p1 + p2), m20 = 0.5 * (p2 + p0);
    double w01 = 0.5 * (w[k[0]] + w[k[1]]);
    double w12 = 0.5 * (w[k[1]] + w[k[2]]);
    double w20 = 0.5 * (w[k[2]] + w[k[0]]);
    total += area / 3.0 * (w01 * f.eval(m01) + w12 * f.eval(m12) + w20 * f.eval(m20));
  }
  return -0.5 * total;
}

} // namespace

TaggedMesh build_profile_mesh(double R, const PatchSpec& patch, const ProfileNumerics& num) {
  const double rc = patch.circumradius();
  if (R < 4.0 * rc)
    throw std::invalid_argument("build_profile_mesh: truncation radius below 4x patch size");
  double h_far = num.h_patch + num.out_growth * (R - 1.5 * rc);
  Mesh base = build_half_ball_mesh(R, std::min(h_far, R / 4.0), 1.0);
  auto size_field = [&](const Vec3& x) {
    double d_rim = patch.boundary_distance({x.x(), x.y()});
    d_rim = std::sqrt(d_rim * d_rim + x.z() * x.z());
    double rim_term = num.h_rim + num.rim_growth * d_rim;
    double cap = num.h_patch + num.out_growth * std::max(0.0, x.norm() - 1.5 * rc);
    return std::min(cap, rim_term);
  };
  Mesh refined = refine_to_size_field(base, size_field);
  return tag_boundary(refined, patch, 1.0, /*outer_is_artificial=*/true);
}

ProfileSolution solve_w0(const PatchSpec& patch, const PsiSpec& psi, double R,
                         const ProfileNumerics& num) {
  ProfileSolution sol;
  sol.tm = build_profile_mesh(R, patch, num);
  sol.R = R;
  sol.psi = psi;
  ConstrainedSystem cs = constrain(sol.tm);
  if (psi.poly.is_zero()) {
    sol.w = Eigen::VectorXd::Zero(sol.tm.mesh.n_vertices());
    sol.m_boundary = sol.m_energy = 0.0;
    return sol;
  }
  Eigen::VectorXd b = neumann_load(sol.tm, psi);
  sol.w = solve_linear(cs, b, num.lin);
  sol.m_energy = -0.5 * sol.w.dot(cs.K_full * sol.w);
  sol.m_boundary = m_boundary_quadrature(sol.tm, psi, sol.w);
  return sol;
}

std::pair<double, double> compute_m(const ProfileSolution& sol) {
  return {sol.m_boundary, sol.m_energy};
}

CoefficientReport compute_C(const PatchSpec& patch, const PsiSpec& psi,
                            const ProfileNumerics& num) {
  if (num.R_list.size() < 2)
    throw std::invalid_argument("compute_C: need at least two truncation radii");
  CoefficientReport rep;
  rep.R_list = num.R_list;
  for (double R : num.R_list) {
    ProfileSolution sol = solve_w0(patch, psi, R, num);
    rep.m_values.push_back(sol.m_energy);
  }
  if (psi.poly.is_zero()) {
    rep.m_extrapolated = 0.0;
    rep.C = 0.0;
    return rep;
  }
  const double p = 3.0 + 2.0 * psi.gamma - 2.0; // N + 2 gamma - 2, N = 3
  for (std::size_t i = 0; i + 1 < rep.m_values.size(); ++i) {
    double R1 = rep.R_list[i], R2 = rep.R_list[i + 1];
    double m1 = rep.m_values[i], m2 = rep.m_values[i + 1];
    if (m2 > m1 + 0.01 * std::abs(m1)) {
      std::ostringstream os;
      os << "compute_C: non-monotone m(R) sequence (m(" << R1 << ") = " << m1 << ", m(" << R2
         << ") = " << m2 << "); truncation failure";
      throw std::runtime_error(os.str());
    }
    if (m2 > m1) rep.m_monotone = false;
    rep.pair_extrapolants.push_back((m2 * std::pow(R2, p) - m1 * std::pow(R1, p)) /
                                    (std::pow(R2, p) - std::pow(R1, p)));
  }
  rep.m_extrapolated = rep.pair_extrapolants.back();
  rep.C = -2.0 * rep.m_extrapolated;
  if (rep.m_values.size() >= 3) {
    std::size_t n = rep.m_values.size();
    double d1 = rep.m_values[n - 3] - rep.m_values[n - 2];
    double d2 = rep.m_values[n - 2] - rep.m_values[n - 1];
    if (d1 * d2 > 0.0)
      rep.observed_order = std::log(d1 / d2) / std::log(rep.R_list[n - 2] / rep.R_list[n - 3]);
  }
  if (num.scaling_self_test) {
    // the half-scale problem at half truncation must scale by 2^-(N+2g-2)
    ProfileNumerics half = num;
    half.R_list.clear();
    half.scaling_self_test = false;
    ProfileSolution small = solve_w0(patch.scaled(0.5), psi, num.R_list.front() / 2.0, half);
    ProfileSolution ref = solve_w0(patch, psi, num.R_list.front(), half);
    rep.scaling_self_test_ratio = small.m_energy / (ref.m_energy * std::pow(0.5, p));
  }
  return rep;
}

URSolution solve_U_R(double R, const std::optional<PatchSpec>& sigma, const PsiSpec& psi,
                     const ProfileNumerics& num) {
  URSolution sol;
  sol.R = R;
  sol.psi = psi;
  if (sigma) {
    sol.tm = build_profile_mesh(R, *sigma, num);
  } else {
    // no patch: plain graded half-ball, all Dirichlet on the flat face
    double h_far = num.h_patch + num.out_growth * R;
    Mesh base = build_half_ball_mesh(R, std::min(h_far, R / 4.0), 1.0);
    sol.tm.mesh = base;
    sol.tm.epsilon = 0.0;
    sol.tm.facet_tags.assign(base.n_facets(), FacetTag::Dirichlet);
    const int zc = base.dim - 1;
    for (int f = 0; f < base.n_facets(); ++f) {
      bool flat = true;
      for (int i = 0; i < base.dim; ++i)
        flat = flat && std::abs(base.vertices[base.boundary_facets[f][i]][zc]) <= 1e-12;
      if (!flat) sol.tm.facet_tags[f] = FacetTag::ArtificialOuter;
    }
  }
  ConstrainedSystem cs = constrain(sol.tm);
  Eigen::VectorXd lift = Eigen::VectorXd::Zero(sol.tm.mesh.n_vertices());
  for (int v = 0; v < sol.tm.mesh.n_vertices(); ++v)
    if (cs.vertex_to_free[v] < 0) lift[v] = psi.poly.eval(sol.tm.mesh.vertices[v]);
  sol.u = solve_linear(cs, Eigen::VectorXd::Zero(lift.size()), lift, num.lin);
  sol.energy = sol.u.dot(cs.K_full * sol.u);
  Eigen::VectorXd psi_i = psi_nodal(sol.tm.mesh, psi);
  sol.psi_energy_interp = psi_i.dot(cs.K_full * psi_i);
  sol.psi_energy_exact = psi.poly.dirichlet_energy_half_ball(R);
  return sol;
}

double compute_g_R(const URSolution& ur) { return ur.energy - ur.psi_energy_interp; }

ZRSolution solve_Z_R(double R, const PatchSpec& patch_for_grading, const Mesh& u_mesh,
                     const Eigen::VectorXd& u_values, const ProfileNumerics& num) {
  ZRSolution sol;
  sol.R = R;
  TaggedMesh tm = build_profile_mesh(R, patch_for_grading, num);
  // Z_R: zero on the whole flat disk; re-tag the patch facets to Dirichlet
  for (auto& t : tm.facet_tags)
    if (t == FacetTag::Neumann) t = FacetTag::Dirichlet;
  tm.epsilon = 0.0;
  sol.tm = std::move(tm);
  ConstrainedSystem cs = constrain(sol.tm);
  CellLocator loc(u_mesh);
  Eigen::VectorXd lift = Eigen::VectorXd::Zero(sol.tm.mesh.n_vertices());
  for (int v = 0; v < sol.tm.mesh.n_vertices(); ++v) {
    if (cs.vertex_to_free[v] >= 0) continue;
    const Vec3& x = sol.tm.mesh.vertices[v];
    if (std::abs(x.z()) <= 1e-12) continue; // flat disk: zero
    lift[v] = eval_field(loc, u_values, x);
  }
  if (lift.norm() == 0.0) {
    sol.z = Eigen::VectorXd::Zero(sol.tm.mesh.n_vertices());
    sol.energy = 0.0;
    return sol;
  }
  sol.z = solve_linear(cs, Eigen::VectorXd::Zero(lift.size()), lift, num.lin);
  sol.energy = sol.z.dot(cs.K_full * sol.z);
  return sol;
}

Eigen::VectorXd profile_U_values(const ProfileSolution& sol) {
  return sol.w + psi_nodal(sol.tm.mesh, sol.psi);
}

double compute_chi(const Mesh& mesh, const Eigen::VectorXd& U, const PsiSpec& psi, double r) {
  if (r <= 0.0) throw std::invalid_argument("compute_chi: radius must be positive");
  double h = local_mesh_size_at_radius(mesh, r);
  if (h > 0.0 && r < 2.0 * h)
    throw std::runtime_error("compute_chi: radius too small for the mesh resolution");
  CellLocator loc(mesh);
  const SphereRule& rule = hemisphere_rule();
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const Vec3& theta = rule.nodes[q];
    int c = loc.locate_near(r * theta, 1e-6);
    if (c < 0) throw std::runtime_error("compute_chi: sample radius not covered by the mesh");
    sum += rule.weights[q] * eval_field_in_cell(mesh, U, c, r * theta) * psi.poly.eval(theta);
  }
  return sum;
}

FluxReport compute_flux_identity(const Mesh& mesh, const Eigen::VectorXd& U,
                                 const PsiSpec& psi, double R) {
  FluxReport rep;
  double h = local_mesh_size_at_radius(mesh, R);
  if (h <= 0.0) throw std::runtime_error("compute_flux_identity: radius outside the mesh");
  rep.band = 0.75 * h;
  if (R - rep.band <= 0.0)
    throw std::runtime_error("compute_flux_identity: band exceeds the radius");
  CellLocator loc(mesh);
  const SphereRule& rule = hemisphere_rule();
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const Vec3& theta = rule.nodes[q];
    Vec3 x = (R - rep.band) * theta;
    int c = loc.locate_near(x, 1e-6);
    if (c < 0) {
      std::ostringstream os;
      os << "compute_flux_identity: normal-derivative recovery failed at band " << rep.band;
      throw std::runtime_error(os.str());
    }
    Vec3 g = gradient_in_cell(mesh, U, c);
    sum += rule.weights[q] * psi.poly.eval(R * theta) * g.dot(theta);
  }
  rep.flux = sum * R * R;
  return rep;
}

double compute_z_gap(const ZRSolution& zr, const Mesh& u_mesh,
                     const Eigen::VectorXd& u_values) {
  double u_energy = field_h1semisq_in_ball(u_mesh, u_values, zr.R);
  return zr.energy - u_energy;
}

} // namespace patchlab
