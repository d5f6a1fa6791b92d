// P1 assembly on simplicial meshes, Dirichlet constraint handling and
// constrained linear solves.
#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "patchlab/mesh.hpp"

namespace patchlab {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct Field {
  const Mesh* mesh = nullptr;
  Eigen::VectorXd values; // one value per vertex

  double operator[](int v) const { return values[v]; }
};

// Stiffness (grad-grad) matrix; symmetric positive semidefinite, constants in
// the kernel before constraints.
SparseMatrix assemble_stiffness(const TaggedMesh& tagged);
// Mass matrix; entrywise nonnegative for P1, entries sum to the mesh volume.
SparseMatrix assemble_mass(const TaggedMesh& tagged);

// Reduced symmetric system on the free vertices. A vertex is constrained iff
// it lies on at least one Dirichlet or ArtificialOuter facet; in particular
// junction vertices shared with Neumann facets are constrained, so the
// discrete spaces are nested exactly.
struct ConstrainedSystem {
  SparseMatrix K, M;             // reduced
  SparseMatrix K_full, M_full;   // original (for lifts and energies)
  std::vector<int> free_to_vertex;
  std::vector<int> vertex_to_free; // -1 for constrained vertices

  int n_free() const { return static_cast<int>(free_to_vertex.size()); }
  Eigen::VectorXd expand(const Eigen::VectorXd& reduced) const;
  Eigen::VectorXd restrict_vec(const Eigen::VectorXd& full) const;
};

ConstrainedSystem apply_constraints(const SparseMatrix& K, const SparseMatrix& M,
                                    const std::vector<int>& dirichlet_vertices);
// Convenience: constraints derived from the facet tags of the mesh.
ConstrainedSystem constrain(const TaggedMesh& tagged);

struct LinearSolveOptions {
  double tol = 1e-10;   // relative residual
  int max_iterations = 20000;
  int direct_max_dofs = 400000; // above this fall back to preconditioned CG
};

// Solves K u = rhs on the free vertices with the prescribed values (the lift)
// on the constrained ones; rhs and lift are full-size vertex vectors.
Eigen::VectorXd solve_linear(const ConstrainedSystem& cs, const Eigen::VectorXd& rhs_full,
                             const Eigen::VectorXd& lift_full,
                             const LinearSolveOptions& opts = {});
Eigen::VectorXd solve_linear(const ConstrainedSystem& cs, const Eigen::VectorXd& rhs_full,
                             const LinearSolveOptions& opts = {});

double rayleigh_quotient(const Eigen::VectorXd& u, const SparseMatrix& K,
                         const SparseMatrix& M);

double max_symmetry_defect(const SparseMatrix& A);

} // namespace patchlab
