#include "patchlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace patchlab {

namespace {

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).cross(c - a).dot(d - a) / 6.0;
}

double signed_area2d(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

// FNV-1a over raw bytes; stable across runs for identical geometry.
std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

} // namespace

double Mesh::cell_volume(int c) const {
  const auto& k = cells[c];
  if (dim == 2) return signed_area2d(vertices[k[0]], vertices[k[1]], vertices[k[2]]);
  return signed_volume(vertices[k[0]], vertices[k[1]], vertices[k[2]], vertices[k[3]]);
}

double Mesh::cell_diameter(int c) const {
  const auto& k = cells[c];
  const int nv = dim + 1;
  double d = 0.0;
  for (int i = 0; i < nv; ++i)
    for (int j = i + 1; j < nv; ++j)
      d = std::max(d, (vertices[k[i]] - vertices[k[j]]).norm());
  return d;
}

Vec3 Mesh::cell_barycenter(int c) const {
  const auto& k = cells[c];
  Vec3 b = Vec3::Zero();
  const int nv = dim + 1;
  for (int i = 0; i < nv; ++i) b += vertices[k[i]];
  return b / nv;
}

double Mesh::facet_area(int f) const {
  const auto& k = boundary_facets[f];
  if (dim == 2) return (vertices[k[1]] - vertices[k[0]]).norm();
  return 0.5 * (vertices[k[1]] - vertices[k[0]]).cross(vertices[k[2]] - vertices[k[0]]).norm();
}

Vec3 Mesh::facet_barycenter(int f) const {
  const auto& k = boundary_facets[f];
  Vec3 b = Vec3::Zero();
  for (int i = 0; i < dim; ++i) b += vertices[k[i]];
  return b / dim;
}

double Mesh::total_volume() const {
  double v = 0.0;
  for (int c = 0; c < n_cells(); ++c) v += cell_volume(c);
  return v;
}

double Mesh::min_dihedral_angle_deg() const {
  if (dim != 3) return 0.0;
  double worst = 180.0;
  // face normals of the four faces; dihedral between faces sharing an edge
  static const int faces[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
  for (const auto& k : cells) {
    Vec3 n[4];
    for (int f = 0; f < 4; ++f) {
      const Vec3& a = vertices[k[faces[f][0]]];
      const Vec3& b = vertices[k[faces[f][1]]];
      const Vec3& c = vertices[k[faces[f][2]]];
      n[f] = (b - a).cross(c - a).normalized();
    }
    for (int f = 0; f < 4; ++f)
      for (int g = f + 1; g < 4; ++g) {
        double cosang = std::clamp(-n[f].dot(n[g]), -1.0, 1.0);
        worst = std::min(worst, std::acos(cosang) * 180.0 / M_PI);
      }
  }
  return worst;
}

void Mesh::fix_orientation() {
  for (int c = 0; c < n_cells(); ++c) {
    if (cell_volume(c) < 0.0) std::swap(cells[c][0], cells[c][1]);
  }
}

void Mesh::rebuild_boundary() {
  boundary_facets.clear();
  facet_cell.clear();
  if (dim == 3) {
    static const int faces[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
    std::map<std::array<int, 3>, std::pair<int, std::array<int, 3>>> count;
    for (int c = 0; c < n_cells(); ++c) {
      for (const auto& f : faces) {
        std::array<int, 3> tri = {cells[c][f[0]], cells[c][f[1]], cells[c][f[2]]};
        std::array<int, 3> key = tri;
        std::sort(key.begin(), key.end());
        auto it = count.find(key);
        if (it == count.end())
          count[key] = {c, tri};
        else
          it->second.first = -1; // interior
      }
    }
    for (const auto& [key, v] : count) {
      if (v.first >= 0) {
        boundary_facets.push_back(v.second);
        facet_cell.push_back(v.first);
      }
    }
  } else {
    static const int edges[3][2] = {{1, 2}, {2, 0}, {0, 1}};
    std::map<std::array<int, 2>, std::pair<int, std::array<int, 2>>> count;
    for (int c = 0; c < n_cells(); ++c) {
      for (const auto& e : edges) {
        std::array<int, 2> seg = {cells[c][e[0]], cells[c][e[1]]};
        std::array<int, 2> key = seg;
        std::sort(key.begin(), key.end());
        auto it = count.find(key);
        if (it == count.end())
          count[key] = {c, seg};
        else
          it->second.first = -1;
      }
    }
    for (const auto& [key, v] : count) {
      if (v.first >= 0) {
        boundary_facets.push_back({v.second[0], v.second[1], -1});
        facet_cell.push_back(v.first);
      }
    }
  }
}

void Mesh::validate() const {
  const int nv = n_vertices();
  for (const auto& k : cells)
    for (int i = 0; i <= dim; ++i)
      if (k[i] < 0 || k[i] >= nv) throw std::runtime_error("mesh: cell vertex index out of range");
  for (const auto& k : boundary_facets)
    for (int i = 0; i < dim; ++i)
      if (k[i] < 0 || k[i] >= nv) throw std::runtime_error("mesh: facet vertex index out of range");
  for (int c = 0; c < n_cells(); ++c) {
    if (cell_volume(c) <= 0.0) {
      std::ostringstream os;
      os << "mesh: nonpositive cell volume at cell " << c << " (vol=" << cell_volume(c) << ")";
      throw std::runtime_error(os.str());
    }
  }
  // watertightness: facets must be exactly the once-counted faces
  Mesh copy = *this;
  copy.rebuild_boundary();
  if (copy.boundary_facets.size() != boundary_facets.size())
    throw std::runtime_error("mesh: boundary facet set inconsistent (not watertight)");
}

std::string Mesh::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  h = fnv1a(&dim, sizeof(dim), h);
  for (const auto& v : vertices) {
    double c[3] = {v.x(), v.y(), v.z()};
    h = fnv1a(c, sizeof(c), h);
  }
  for (const auto& k : cells) h = fnv1a(k.data(), sizeof(int) * 4, h);
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

int TaggedMesh::count_tag(FacetTag t) const {
  int n = 0;
  for (auto tag : facet_tags)
    if (tag == t) ++n;
  return n;
}

double TaggedMesh::tagged_area(FacetTag t) const {
  double a = 0.0;
  for (int f = 0; f < mesh.n_facets(); ++f)
    if (facet_tags[f] == t) a += mesh.facet_area(f);
  return a;
}

std::vector<int> TaggedMesh::vertices_on(std::initializer_list<FacetTag> tags) const {
  std::vector<char> mark(mesh.n_vertices(), 0);
  for (int f = 0; f < mesh.n_facets(); ++f) {
    bool hit = false;
    for (auto t : tags) hit = hit || (facet_tags[f] == t);
    if (!hit) continue;
    for (int i = 0; i < mesh.dim; ++i) mark[mesh.boundary_facets[f][i]] = 1;
  }
  std::vector<int> out;
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (mark[v]) out.push_back(v);
  return out;
}

namespace {

// Radial grading map rho: [0,1] -> [0,1] with rho'(0) = 1/grading and a
// C^1 quadratic-then-linear profile; grading == 1 is the identity.
struct GradingMap {
  double beta, s, t0;
  explicit GradingMap(double grading) {
    beta = 1.0 / grading;
    t0 = 0.4;
    // normalization: beta*t0 + (s-beta)*t0/2 + s*(1-t0) = 1
    s = (1.0 - beta * t0 / 2.0) / (1.0 - t0 / 2.0);
  }
  double operator()(double t) const {
    if (t <= t0) return beta * t + (s - beta) * t * t / (2.0 * t0);
    double rt0 = beta * t0 + (s - beta) * t0 / 2.0;
    return rt0 + s * (t - t0);
  }
};

} // namespace

Mesh build_half_ball_mesh(double radius, double h_far, double grading_ratio, int dim) {
  if (radius <= 0.0) throw std::invalid_argument("build_half_ball_mesh: radius must be positive");
  if (h_far <= 0.0) throw std::invalid_argument("build_half_ball_mesh: h_far must be positive");
  if (h_far >= radius) throw std::invalid_argument("build_half_ball_mesh: h_far must be smaller than radius");
  if (grading_ratio < 1.0) throw std::invalid_argument("build_half_ball_mesh: grading_ratio must be >= 1");
  if (dim != 2 && dim != 3) throw std::invalid_argument("build_half_ball_mesh: dim must be 2 or 3");

  GradingMap rho(grading_ratio);
  // n cells across the diameter, calibrated so cell DIAMETERS (diagonal
  // factor ~1.4 on Kuhn boxes) reach h_far at the rim and h_far/grading at 0
  const double diag = 1.4;
  int n = std::max(4, 2 * (int)std::ceil(radius * rho.s * diag / h_far));
  if (n % 2 != 0) ++n;
  const double delta = 2.0 / n;

  Mesh m;
  m.dim = dim;
  m.outer_radius = radius;

  auto map_point = [&](const Vec3& p) -> Vec3 {
    double tinf = std::max({std::abs(p.x()), std::abs(p.y()), std::abs(p.z())});
    if (tinf < 1e-15) return Vec3::Zero();
    double t2 = p.norm();
    return (radius * rho(tinf) / t2) * p;
  };

  if (dim == 3) {
    const int nz = n / 2;
    auto vid = [&](int i, int j, int k) { return (k * (n + 1) + j) * (n + 1) + i; };
    m.vertices.resize((n + 1) * (n + 1) * (nz + 1));
    for (int k = 0; k <= nz; ++k)
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
          m.vertices[vid(i, j, k)] = map_point(Vec3(-1.0 + i * delta, -1.0 + j * delta, k * delta));
    // Kuhn triangulation: 6 tets per box, all sharing the main diagonal.
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          int base[3] = {i, j, k};
          for (const auto& pm : perms) {
            std::array<int, 4> tet;
            int cur[3] = {base[0], base[1], base[2]};
            tet[0] = vid(cur[0], cur[1], cur[2]);
            for (int step = 0; step < 3; ++step) {
              cur[pm[step]] += 1;
              tet[step + 1] = vid(cur[0], cur[1], cur[2]);
            }
            m.cells.push_back(tet);
          }
        }
  } else {
    const int nz = n / 2;
    auto vid = [&](int i, int k) { return k * (n + 1) + i; };
    m.vertices.resize((n + 1) * (nz + 1));
    for (int k = 0; k <= nz; ++k)
      for (int i = 0; i <= n; ++i)
        m.vertices[vid(i, k)] = map_point(Vec3(-1.0 + i * delta, k * delta, 0.0));
    for (int k = 0; k < nz; ++k)
      for (int i = 0; i < n; ++i) {
        m.cells.push_back({vid(i, k), vid(i + 1, k), vid(i + 1, k + 1), -1});
        m.cells.push_back({vid(i, k), vid(i + 1, k + 1), vid(i, k + 1), -1});
      }
  }

  // remove unused vertices (none expected, but keep indices tight), orient, boundary
  m.fix_orientation();
  m.rebuild_boundary();

  // quality gate after grading
  double minvol = 1e300, mindiam = 1e300;
  for (int c = 0; c < m.n_cells(); ++c) {
    minvol = std::min(minvol, m.cell_volume(c));
    mindiam = std::min(mindiam, m.cell_diameter(c));
  }
  if (minvol < 1e-14 * std::pow(radius, dim)) {
    std::ostringstream os;
    os << "build_half_ball_mesh: degenerate cells after grading (min vol " << minvol
       << ", min dihedral " << m.min_dihedral_angle_deg() << " deg)";
    throw std::runtime_error(os.str());
  }
  m.validate();
  return m;
}

Mesh build_box_mesh(const Vec3& lengths, double h, int dim) {
  if (h <= 0.0) throw std::invalid_argument("build_box_mesh: h must be positive");
  Mesh m;
  m.dim = dim;
  int nx = std::max(1, (int)std::lround(lengths.x() / h));
  int ny = std::max(1, (int)std::lround(lengths.y() / h));
  if (dim == 3) {
    int nz = std::max(1, (int)std::lround(lengths.z() / h));
    auto vid = [&](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };
    m.vertices.resize((nx + 1) * (ny + 1) * (nz + 1));
    for (int k = 0; k <= nz; ++k)
      for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
          m.vertices[vid(i, j, k)] =
              Vec3(lengths.x() * i / nx, lengths.y() * j / ny, lengths.z() * k / nz);
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
          for (const auto& pm : perms) {
            std::array<int, 4> tet;
            int cur[3] = {i, j, k};
            tet[0] = vid(cur[0], cur[1], cur[2]);
            for (int step = 0; step < 3; ++step) {
              cur[pm[step]] += 1;
              tet[step + 1] = vid(cur[0], cur[1], cur[2]);
            }
            m.cells.push_back(tet);
          }
  } else {
    auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
    m.vertices.resize((nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        m.vertices[vid(i, j)] = Vec3(lengths.x() * i / nx, lengths.y() * j / ny, 0.0);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        m.cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), -1});
        m.cells.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1), -1});
      }
  }
  m.fix_orientation();
  m.rebuild_boundary();
  m.validate();
  return m;
}

TaggedMesh tag_boundary(const Mesh& mesh, const PatchSpec& patch, double eps,
                        bool outer_is_artificial) {
  if (eps < 0.0) throw std::invalid_argument("tag_boundary: epsilon must be >= 0");
  patch.validate();
  constexpr double flat_tol = 1e-12;

  TaggedMesh tm;
  tm.mesh = mesh;
  tm.epsilon = eps;
  tm.facet_tags.assign(mesh.n_facets(), FacetTag::Dirichlet);

  bool has_flat = false;
  int n_neumann = 0;
  const int zc = mesh.dim - 1; // index of the normal coordinate
  for (int f = 0; f < mesh.n_facets(); ++f) {
    bool flat = true;
    for (int i = 0; i < mesh.dim; ++i)
      flat = flat && (std::abs(mesh.vertices[mesh.boundary_facets[f][i]][zc]) <= flat_tol);
    if (flat) has_flat = true;
    if (flat && eps > 0.0) {
      Vec3 b = mesh.facet_barycenter(f);
      Eigen::Vector2d xp(b.x(), mesh.dim == 3 ? b.y() : 0.0);
      if (patch.contains(xp, eps)) {
        tm.facet_tags[f] = FacetTag::Neumann;
        ++n_neumann;
      }
    } else if (!flat && outer_is_artificial) {
      tm.facet_tags[f] = FacetTag::ArtificialOuter;
    }
  }
  if (!has_flat) throw std::runtime_error("tag_boundary: mesh has no flat face in {x_N = 0}");
  if (eps > 0.0) {
    // overflow: even the inscribed disk of eps*V sticks out of the flat face
    if (mesh.outer_radius > 0.0 &&
        eps * patch.inradius() > mesh.outer_radius * (1.0 + 1e-9))
      throw std::runtime_error("tag_boundary: scaled patch overflows the flat face");
    if (n_neumann < 8)
      throw std::runtime_error("tag_boundary: under-resolved patch (fewer than 8 facets inside eps*V)");
  }
  return tm;
}

TaggedMesh tag_all_dirichlet(const Mesh& mesh) {
  TaggedMesh tm;
  tm.mesh = mesh;
  tm.epsilon = 0.0;
  tm.facet_tags.assign(mesh.n_facets(), FacetTag::Dirichlet);
  return tm;
}

double check_strict_star_shaped(const PatchSpec& patch) { return patch.sigma_min(); }

void write_mesh(const TaggedMesh& tm, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_mesh: cannot open " + path);
  os.precision(17);
  const Mesh& m = tm.mesh;
  os << m.dim << " " << m.n_vertices() << " " << m.n_cells() << " " << m.n_facets() << "\n";
  for (const auto& v : m.vertices) {
    os << v.x() << " " << v.y();
    if (m.dim == 3) os << " " << v.z();
    os << "\n";
  }
  for (const auto& c : m.cells) {
    for (int i = 0; i <= m.dim; ++i) os << c[i] << (i == m.dim ? "" : " ");
    os << "\n";
  }
  for (int f = 0; f < m.n_facets(); ++f) {
    for (int i = 0; i < m.dim; ++i) os << m.boundary_facets[f][i] << " ";
    os << static_cast<int>(tm.facet_tags[f]) << "\n";
  }
}

TaggedMesh read_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_mesh: cannot open " + path);
  int dim, nv, nc, nf;
  if (!(is >> dim >> nv >> nc >> nf)) throw std::runtime_error("read_mesh: bad header");
  TaggedMesh tm;
  Mesh& m = tm.mesh;
  m.dim = dim;
  m.vertices.resize(nv);
  for (auto& v : m.vertices) {
    double x, y, z = 0.0;
    is >> x >> y;
    if (dim == 3) is >> z;
    v = Vec3(x, y, z);
  }
  m.cells.resize(nc);
  for (auto& c : m.cells) {
    c = {-1, -1, -1, -1};
    for (int i = 0; i <= dim; ++i) is >> c[i];
  }
  m.boundary_facets.resize(nf);
  tm.facet_tags.resize(nf);
  for (int f = 0; f < nf; ++f) {
    auto& k = m.boundary_facets[f];
    k = {-1, -1, -1};
    for (int i = 0; i < dim; ++i) is >> k[i];
    int t;
    is >> t;
    tm.facet_tags[f] = static_cast<FacetTag>(t);
  }
  if (!is) throw std::runtime_error("read_mesh: truncated file");
  // rebuild adjacency; facet order may change, so recover tags via sorted keys
  std::map<std::array<int, 3>, FacetTag> lookup;
  for (int f = 0; f < nf; ++f) {
    std::array<int, 3> key = m.boundary_facets[f];
    std::sort(key.begin(), key.begin() + dim);
    lookup[key] = tm.facet_tags[f];
  }
  m.rebuild_boundary();
  tm.facet_tags.assign(m.n_facets(), FacetTag::Dirichlet);
  for (int f = 0; f < m.n_facets(); ++f) {
    std::array<int, 3> key = m.boundary_facets[f];
    std::sort(key.begin(), key.begin() + dim);
    auto it = lookup.find(key);
    if (it == lookup.end()) throw std::runtime_error("read_mesh: facet/tag mismatch");
    tm.facet_tags[f] = it->second;
  }
  m.validate();
  return tm;
}

} // namespace patchlab
