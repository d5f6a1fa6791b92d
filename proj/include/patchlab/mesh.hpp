// Simplicial meshes for half-balls and boxes with a flat face in {x_N = 0},
// plus boundary tagging of the Neumann patch.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace patchlab {

using Vec3 = Eigen::Vector3d;

enum class FacetTag : int { Dirichlet = 0, Neumann = 1, ArtificialOuter = 2 };

struct Mesh {
  int dim = 3;
  std::vector<Vec3> vertices;                    // third component 0 when dim == 2
  std::vector<std::array<int, 4>> cells;         // first dim+1 entries used, rest -1
  std::vector<std::array<int, 3>> boundary_facets; // first dim entries used
  std::vector<int> facet_cell;                   // cell adjacent to each boundary facet

  // Set by the builders when the outer boundary is a sphere centered at 0;
  // refinement uses it to keep new boundary vertices on the sphere. 0 = none.
  double outer_radius = 0.0;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_facets() const { return static_cast<int>(boundary_facets.size()); }

  double cell_volume(int c) const;
  double cell_diameter(int c) const;
  Vec3 cell_barycenter(int c) const;
  double facet_area(int f) const;
  Vec3 facet_barycenter(int f) const;
  double total_volume() const;
  double min_dihedral_angle_deg() const; // 3D only

  // Reorders cell vertices so every cell has positive signed volume.
  void fix_orientation();
  // Extracts boundary facets (faces adjacent to exactly one cell) and adjacency.
  void rebuild_boundary();
  // Checks index ranges, positive volumes and watertightness; throws on failure.
  void validate() const;

  std::string fingerprint() const;
};

// Nominal (unscaled) shape V of the Neumann patch, living in the flat face.
// Geometry is 2D in the (x1, x2) coordinates of {x_N = 0}.
class PatchSpec {
 public:
  enum class Kind { Disk, Polygon, Radial };

  static PatchSpec disk(double radius);
  // Closed polygon, vertices in order (no repetition of the first vertex).
  static PatchSpec polygon(std::vector<Eigen::Vector2d> vertices);
  // Boundary radius samples rho(theta_k) at uniform angles theta_k = 2*pi*k/n.
  static PatchSpec radial(std::vector<double> rho_samples);
  static PatchSpec square(double half_side); // polygon convenience

  Kind kind() const { return kind_; }
  double disk_radius() const { return disk_radius_; }
  const std::vector<Eigen::Vector2d>& polygon_vertices() const { return poly_; }

  // Membership of a flat-face point in eps*V (x given in mesh coordinates).
  bool contains(const Eigen::Vector2d& x, double eps) const;
  // min over boundary of x . nu(x); > 0 iff strictly star-shaped about 0.
  double sigma_min() const;
  double circumradius() const; // max |x| over the boundary
  double inradius() const;     // largest disk about 0 inside the patch
  double diameter() const;
  // In-plane distance from a point to the patch boundary curve.
  double boundary_distance(const Eigen::Vector2d& x) const;
  // The dilated patch s*V.
  PatchSpec scaled(double s) const;

  void validate() const; // 0 in interior, closed, non-self-intersecting

 private:
  Kind kind_ = Kind::Disk;
  double disk_radius_ = 1.0;
  std::vector<Eigen::Vector2d> poly_;
  std::vector<double> rho_;
  std::vector<Eigen::Vector2d> radial_as_polygon() const;
};

struct TaggedMesh {
  Mesh mesh;
  std::vector<FacetTag> facet_tags; // one per boundary facet
  double epsilon = 0.0;

  int count_tag(FacetTag t) const;
  double tagged_area(FacetTag t) const;
  // Vertices lying on at least one facet with a tag in `tags`.
  std::vector<int> vertices_on(std::initializer_list<FacetTag> tags) const;
};

// Half-ball {|x| < radius, x_N > 0} (half-disk when dim == 2), structured
// Kuhn triangulation of the half-cube mapped onto the ball, with radial
// grading toward the origin: local size ~ h_far/grading_ratio near 0.
Mesh build_half_ball_mesh(double radius, double h_far, double grading_ratio,
                          int dim = 3);

// Axis-aligned box [0,L1]x[0,L2]x[0,L3], uniform Kuhn triangulation.
Mesh build_box_mesh(const Vec3& lengths, double h, int dim = 3);

// Tags flat-face facets whose barycenter lies in eps*V as Neumann, the rest
// Dirichlet; the non-flat boundary becomes ArtificialOuter when requested
// (truncated half-space problems).
TaggedMesh tag_boundary(const Mesh& mesh, const PatchSpec& patch, double eps,
                        bool outer_is_artificial = false);
TaggedMesh tag_all_dirichlet(const Mesh& mesh);

double check_strict_star_shaped(const PatchSpec& patch);

// Conforming longest-edge bisection of cells within distance
// outer_radius/(2*factor) of the origin until their diameter drops below
// (initial diameter)/factor. factor == 1 returns the mesh unchanged.
Mesh refine_toward_origin(const Mesh& mesh, double factor);

// Conforming bisection until every cell satisfies diam <= size_field(barycenter).
// Cells where the field returns +inf are left alone.
Mesh refine_to_size_field(const Mesh& mesh,
                          const std::function<double(const Vec3&)>& size_field,
                          int max_passes = 40);

// Plain-text mesh format: "dim n_vertices n_cells n_facets" header, then
// vertex rows, cell rows, facet rows with a trailing integer tag column.
void write_mesh(const TaggedMesh& tm, const std::string& path);
TaggedMesh read_mesh(const std::string& path);

} // namespace patchlab
