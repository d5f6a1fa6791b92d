#include "patchlab/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace patchlab {

namespace {

// Gauss-Legendre nodes/weights on [0,1] (12 points; degree 23)
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration from Chebyshev initial guess on [-1,1]
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = 0.5 * (t + 1.0);
    w[i] = 1.0 / ((1.0 - t * t) * dp * dp); // already scaled to [0,1]
  }
}

SphereRule build_hemisphere_rule() {
  // cos(theta) in (0,1) by Gauss (12 nodes), azimuth uniform (24 nodes):
  // exact for spherical polynomials up to degree ~23 in each factor
  const int n_ct = 12, n_phi = 24;
  std::vector<double> ct, wct;
  gauss_legendre_01(n_ct, ct, wct);
  SphereRule rule;
  rule.nodes.reserve(n_ct * n_phi);
  rule.weights.reserve(n_ct * n_phi);
  for (int i = 0; i < n_ct; ++i) {
    double c = ct[i];
    double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int j = 0; j < n_phi; ++j) {
      double phi = 2.0 * M_PI * j / n_phi;
      rule.nodes.emplace_back(s * std::cos(phi), s * std::sin(phi), c);
      rule.weights.push_back(wct[i] * 2.0 * M_PI / n_phi);
    }
  }
  return rule;
}

// 4-point degree-2 rule on the reference tetrahedron (barycentric)
constexpr double kTetA = 0.5854101966249685; // (5 + 3*sqrt(5)) / 20
constexpr double kTetB = 0.1381966011250105; // (5 - sqrt(5)) / 20

} // namespace

const SphereRule& hemisphere_rule() {
  static const SphereRule rule = build_hemisphere_rule();
  return rule;
}

double integrate_hemisphere(double r, const std::function<double(const Vec3&)>& f) {
  const SphereRule& rule = hemisphere_rule();
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q)
    sum += rule.weights[q] * f(r * rule.nodes[q]);
  return sum * r * r; // surface element of the radius-r sphere
}

namespace {

double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return std::abs((b - a).cross(c - a).dot(d - a)) / 6.0;
}

// integrate f over tet against indicator(|x| < r) with 4-pt rule on
// 8^levels sub-tetrahedra (octasection)
double clipped_tet(const std::array<Vec3, 4>& v, double r, int levels,
                   const std::function<double(const Vec3&)>& f) {
  if (levels == 0) {
    double vol = tet_volume(v[0], v[1], v[2], v[3]);
    double sum = 0.0;
    for (int q = 0; q < 4; ++q) {
      Vec3 x = Vec3::Zero();
      for (int i = 0; i < 4; ++i) x += (i == q ? kTetA : kTetB) * v[i];
      if (x.norm() < r) sum += 0.25 * f(x);
    }
    return vol * sum;
  }
  // standard octasection: 4 corner tets + central octahedron in 4 tets
  Vec3 m01 = 0.5 * (v[0] + v[1]), m02 = 0.5 * (v[0] + v[2]), m03 = 0.5 * (v[0] + v[3]);
  Vec3 m12 = 0.5 * (v[1] + v[2]), m13 = 0.5 * (v[1] + v[3]), m23 = 0.5 * (v[2] + v[3]);
  const std::array<std::array<Vec3, 4>, 8> subs = {{
      {v[0], m01, m02, m03},
      {m01, v[1], m12, m13},
      {m02, m12, v[2], m23},
      {m03, m13, m23, v[3]},
      {m01, m02, m03, m13},
      {m01, m02, m12, m13},
      {m02, m03, m13, m23},
      {m02, m12, m13, m23},
  }};
  double sum = 0.0;
  for (const auto& s : subs) sum += clipped_tet(s, r, levels - 1, f);
  return sum;
}

} // namespace

double integrate_ball_clipped(const Mesh& mesh, double r,
                              const std::function<double(const Vec3&, int)>& f, int levels) {
  if (mesh.dim != 3)
    throw std::invalid_argument("integrate_ball_clipped: only 3D meshes are supported");
  double total = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& k = mesh.cells[c];
    double rmin = 1e300, rmax = 0.0;
    for (int i = 0; i < 4; ++i) {
      double nr = mesh.vertices[k[i]].norm();
      rmin = std::min(rmin, nr);
      rmax = std::max(rmax, nr);
    }
    double diam = mesh.cell_diameter(c);
    if (rmin - diam > r) continue; // safely outside
    std::array<Vec3, 4> v = {mesh.vertices[k[0]], mesh.vertices[k[1]], mesh.vertices[k[2]],
                             mesh.vertices[k[3]]};
    auto g = [&](const Vec3& x) { return f(x, c); };
    if (rmax < r) {
      total += clipped_tet(v, 1e300, 0, g); // fully inside: plain 4-pt rule
    } else {
      total += clipped_tet(v, r, levels, g);
    }
  }
  return total;
}

double field_l2sq_in_ball(const Mesh& mesh, const Eigen::VectorXd& values, double r) {
  return integrate_ball_clipped(mesh, r, [&](const Vec3& x, int c) {
    double v = eval_field_in_cell(mesh, values, c, x);
    return v * v;
  });
}

double field_h1semisq_in_ball(const Mesh& mesh, const Eigen::VectorXd& values, double r) {
  std::vector<double> g2(mesh.n_cells(), -1.0);
  return integrate_ball_clipped(mesh, r, [&](const Vec3&, int c) {
    if (g2[c] < 0.0) g2[c] = gradient_in_cell(mesh, values, c).squaredNorm();
    return g2[c];
  });
}

double integrate_facet(const Mesh& mesh, int facet,
                       const std::function<double(const Vec3&)>& f) {
  const auto& k = mesh.boundary_facets[facet];
  double area = mesh.facet_area(facet);
  if (mesh.dim == 3) {
    const Vec3& a = mesh.vertices[k[0]];
    const Vec3& b = mesh.vertices[k[1]];
    const Vec3& c = mesh.vertices[k[2]];
    return area / 3.0 * (f(0.5 * (a + b)) + f(0.5 * (b + c)) + f(0.5 * (c + a)));
  }
  // 2D: 2-point Gauss on the segment
  const Vec3& a = mesh.vertices[k[0]];
  const Vec3& b = mesh.vertices[k[1]];
  double t = 0.5 / std::sqrt(3.0);
  return area * 0.5 * (f(0.5 * (a + b) + t * (b - a)) + f(0.5 * (a + b) - t * (b - a)));
}

} // namespace patchlab
