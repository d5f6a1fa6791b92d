// Conforming longest-edge bisection (LEPP propagation). Splitting an edge at
// its midpoint bisects every incident cell, which keeps the mesh conforming;
// propagation first splits neighbours whose own longest edge is longer, which
// bounds the quality degradation.
#include "patchlab/mesh.hpp"

#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <unordered_map>

namespace patchlab {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

class Bisector {
 public:
  explicit Bisector(const Mesh& mesh) : dim_(mesh.dim), outer_radius_(mesh.outer_radius) {
    vertices_ = mesh.vertices;
    cells_ = mesh.cells;
    alive_.assign(cells_.size(), 1);
    children_.assign(cells_.size(), {-1, -1});
    for (int c = 0; c < (int)cells_.size(); ++c) register_edges(c);
  }

  // Refines until every alive cell satisfies longest_edge <= target(cell).
  // Children created along the way are re-queued with their own target.
  void run(const std::function<double(int)>& target) {
    std::deque<int> queue;
    for (int c = 0; c < (int)cells_.size(); ++c) queue.push_back(c);
    long long guard = 0;
    while (!queue.empty()) {
      int c = queue.front();
      queue.pop_front();
      if (!alive_[c]) {
        if (children_[c].first >= 0) {
          queue.push_back(children_[c].first);
          queue.push_back(children_[c].second);
        }
        continue;
      }
      double tgt = target(c);
      if (!(longest_edge_len(c) > tgt)) continue;
      lepp_split_once(c, queue);
      queue.push_back(c);
      if (++guard > 50'000'000LL)
        throw std::runtime_error("refine: split budget exceeded (size field too aggressive)");
    }
  }

  Mesh finish() const {
    Mesh out;
    out.dim = dim_;
    out.outer_radius = outer_radius_;
    out.vertices = vertices_;
    for (int c = 0; c < (int)cells_.size(); ++c)
      if (alive_[c]) out.cells.push_back(cells_[c]);
    out.fix_orientation();
    out.rebuild_boundary();
    for (int c = 0; c < out.n_cells(); ++c)
      if (out.cell_volume(c) < 1e-14)
        throw std::runtime_error("refine: over-refinement produced a cell below volume 1e-14");
    out.validate();
    return out;
  }

  double longest_edge_len(int c) const {
    auto [a, b] = longest_edge(c);
    return (vertices_[a] - vertices_[b]).norm();
  }

  Vec3 barycenter(int c) const {
    Vec3 s = Vec3::Zero();
    for (int i = 0; i <= dim_; ++i) s += vertices_[cells_[c][i]];
    return s / (dim_ + 1);
  }

 private:
  int n_edges() const { return dim_ == 3 ? 6 : 3; }

  std::pair<int, int> edge_of(int c, int e) const {
    static const int tet_edges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    static const int tri_edges[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    const auto& k = cells_[c];
    if (dim_ == 3) return {k[tet_edges[e][0]], k[tet_edges[e][1]]};
    return {k[tri_edges[e][0]], k[tri_edges[e][1]]};
  }

  // deterministic: longest by length, ties broken by (min id, max id)
  std::pair<int, int> longest_edge(int c) const {
    double best = -1.0;
    std::pair<int, int> be{-1, -1};
    for (int e = 0; e < n_edges(); ++e) {
      auto [a, b] = edge_of(c, e);
      int lo = std::min(a, b), hi = std::max(a, b);
      double len = (vertices_[a] - vertices_[b]).norm();
      if (len > best * (1.0 + 1e-12) ||
          (len > best * (1.0 - 1e-12) &&
           std::make_pair(lo, hi) < std::make_pair(std::min(be.first, be.second),
                                                   std::max(be.first, be.second)))) {
        best = len;
        be = {lo, hi};
      }
    }
    return be;
  }

  void register_edges(int c) {
    for (int e = 0; e < n_edges(); ++e) {
      auto [a, b] = edge_of(c, e);
      edge_cells_[edge_key(a, b)].push_back(c);
    }
  }

  std::vector<int> alive_cells_on(int a, int b) const {
    std::vector<int> out;
    auto it = edge_cells_.find(edge_key(a, b));
    if (it == edge_cells_.end()) return out;
    for (int c : it->second)
      if (alive_[c]) out.push_back(c);
    return out;
  }

  int midpoint(int a, int b) {
    auto key = edge_key(a, b);
    auto it = midpoint_.find(key);
    if (it != midpoint_.end()) return it->second;
    Vec3 m = 0.5 * (vertices_[a] + vertices_[b]);
    if (outer_radius_ > 0.0) {
      double tol = 1e-9 * outer_radius_;
      if (std::abs(vertices_[a].norm() - outer_radius_) < tol &&
          std::abs(vertices_[b].norm() - outer_radius_) < tol && m.norm() > 0.0)
        m *= outer_radius_ / m.norm();
    }
    int id = (int)vertices_.size();
    vertices_.push_back(m);
    midpoint_[key] = id;
    return id;
  }

  void split_edge(int a, int b, std::deque<int>& queue) {
    int m = midpoint(a, b);
    for (int c : alive_cells_on(a, b)) {
      alive_[c] = 0;
      auto k0 = cells_[c], k1 = cells_[c];
      for (int i = 0; i <= dim_; ++i) {
        if (k0[i] == b) k0[i] = m;
        if (k1[i] == a) k1[i] = m;
      }
      int c0 = (int)cells_.size();
      cells_.push_back(k0);
      alive_.push_back(1);
      children_.emplace_back(-1, -1);
      register_edges(c0);
      int c1 = (int)cells_.size();
      cells_.push_back(k1);
      alive_.push_back(1);
      children_.emplace_back(-1, -1);
      register_edges(c1);
      children_[c] = {c0, c1};
      queue.push_back(c0);
      queue.push_back(c1);
    }
  }

  void lepp_split_once(int c, std::deque<int>& queue) {
    int cur = c;
    for (int iter = 0; iter < 4096; ++iter) {
      auto [a, b] = longest_edge(cur);
      double len = (vertices_[a] - vertices_[b]).norm();
      int next = -1;
      double next_len = len * (1.0 + 1e-10);
      for (int n : alive_cells_on(a, b)) {
        if (n == cur) continue;
        double l = longest_edge_len(n);
        if (l > next_len) {
          next_len = l;
          next = n;
        }
      }
      if (next < 0) {
        split_edge(a, b, queue);
        return;
      }
      cur = next;
    }
    throw std::runtime_error("refine: propagation path did not terminate");
  }

  int dim_;
  double outer_radius_;
  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 4>> cells_;
  std::vector<char> alive_;
  std::vector<std::pair<int, int>> children_;
  std::unordered_map<std::uint64_t, std::vector<int>> edge_cells_;
  std::unordered_map<std::uint64_t, int> midpoint_;
};

} // namespace

Mesh refine_toward_origin(const Mesh& mesh, double factor) {
  if (factor < 1.0) throw std::invalid_argument("refine_toward_origin: factor must be >= 1");
  if (factor == 1.0) return mesh;
  double extent = mesh.outer_radius;
  if (extent <= 0.0)
    for (const auto& v : mesh.vertices) extent = std::max(extent, v.norm());
  const double band = extent / (2.0 * factor);

  // Uniform in-band target: the coarsest in-band cell reduced by `factor`.
  double coarsest = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c)
    if (mesh.cell_barycenter(c).norm() <= band)
      coarsest = std::max(coarsest, mesh.cell_diameter(c));
  if (coarsest == 0.0) return mesh;
  const double tgt = coarsest / factor;

  Bisector bis(mesh);
  bis.run([&](int c) { return bis.barycenter(c).norm() <= band ? tgt : 1e300; });
  return bis.finish();
}

Mesh refine_to_size_field(const Mesh& mesh,
                          const std::function<double(const Vec3&)>& size_field, int max_passes) {
  (void)max_passes;
  Bisector bis(mesh);
  bis.run([&](int c) { return size_field(bis.barycenter(c)); });
  return bis.finish();
}

} // namespace patchlab
