// Point location and P1 evaluation of fields and their gradients.
#pragma once

#include <optional>
#include <vector>

#include "patchlab/fem.hpp"
#include "patchlab/mesh.hpp"

namespace patchlab {

// Uniform-grid cell locator; meshes are immutable so the index is built once.
class CellLocator {
 public:
  explicit CellLocator(const Mesh& mesh);

  // Cell containing x (barycentric tolerance `tol`); -1 if not found.
  int locate(const Vec3& x, double tol = 1e-10) const;
  // Like locate, but falls back to the best candidate within `slack` of
  // containment (for points marginally outside the faceted boundary).
  int locate_near(const Vec3& x, double slack = 1e-6) const;

  const Mesh& mesh() const { return *mesh_; }

 private:
  const Mesh* mesh_;
  Vec3 lo_, hi_;
  double cell_size_ = 1.0;
  int nx_ = 1, ny_ = 1, nz_ = 1;
  std::vector<std::vector<int>> bins_;
  int bin_index(int i, int j, int k) const { return (k * ny_ + j) * nx_ + i; }
};

// P1 value of the field at x; throws if x lies outside the mesh.
double eval_field(const CellLocator& loc, const Eigen::VectorXd& values, const Vec3& x);
// Piecewise-constant gradient of the P1 field in the cell containing x.
Vec3 eval_gradient(const CellLocator& loc, const Eigen::VectorXd& values, const Vec3& x);

double eval_field_in_cell(const Mesh& mesh, const Eigen::VectorXd& values, int cell,
                          const Vec3& x);
Vec3 gradient_in_cell(const Mesh& mesh, const Eigen::VectorXd& values, int cell);

// Transfers nodal values of a source field onto the vertices of `target`
// (used to impose data interpolated from a larger profile solve).
Eigen::VectorXd interpolate_onto(const CellLocator& source_loc,
                                 const Eigen::VectorXd& source_values, const Mesh& target,
                                 const std::vector<int>& target_vertices);

} // namespace patchlab
