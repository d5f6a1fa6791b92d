// Smallest eigenpairs of the generalized symmetric problem K u = lambda M u
// by shift-invert Lanczos with full reorthogonalization.
#pragma once

#include <vector>

#include "patchlab/fem.hpp"

namespace patchlab {

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd field;  // full vertex vector, zero on constrained vertices
  double residual = 0.0;  // ||K u - lambda M u|| / (lambda ||M u||)
};

struct EigenSolveOptions {
  double tol = 1e-8;
  int max_subspace = 400;
  double clustered_gap = 1e-8; // warn threshold for near-degenerate pairs
};

struct EigenSolveResult {
  std::vector<EigenPair> pairs; // count smallest, nondecreasing, M-orthonormal
  std::vector<std::string> warnings;
};

EigenSolveResult solve_generalized_eig(const ConstrainedSystem& cs, int count,
                                       double shift = 0.0,
                                       const EigenSolveOptions& opts = {});

// Flips the sign of `field` so that its M-inner product with `reference`
// is nonnegative (eigenfunction orientation convention).
void align_sign(Eigen::VectorXd& field, const Eigen::VectorXd& reference,
                const SparseMatrix& M);

} // namespace patchlab
