#include "patchlab/fem.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

namespace patchlab {

namespace {

using Triplet = Eigen::Triplet<double>;

// P1 gradients: grad(lambda_i) rows; volume returned
double p1_gradients_3d(const Mesh& m, int c, Eigen::Matrix<double, 4, 3>& g) {
  const auto& k = m.cells[c];
  Eigen::Matrix3d J;
  for (int i = 0; i < 3; ++i) J.col(i) = m.vertices[k[i + 1]] - m.vertices[k[0]];
  double detJ = J.determinant();
  Eigen::Matrix3d Jinv = J.inverse();
  for (int i = 0; i < 3; ++i) g.row(i + 1) = Jinv.row(i);
  g.row(0) = -(g.row(1) + g.row(2) + g.row(3));
  return detJ / 6.0;
}

double p1_gradients_2d(const Mesh& m, int c, Eigen::Matrix<double, 3, 2>& g) {
  const auto& k = m.cells[c];
  Eigen::Matrix2d J;
  for (int i = 0; i < 2; ++i)
    J.col(i) = (m.vertices[k[i + 1]] - m.vertices[k[0]]).head<2>();
  double detJ = J.determinant();
  Eigen::Matrix2d Jinv = J.inverse();
  for (int i = 0; i < 2; ++i) g.row(i + 1) = Jinv.row(i);
  g.row(0) = -(g.row(1) + g.row(2));
  return detJ / 2.0;
}

// Cells are assembled in fixed-size chunks merged in chunk order so the
// result does not depend on the worker count.
constexpr int kChunk = 8192;

template <typename LocalFn>
SparseMatrix assemble(const Mesh& m, LocalFn local) {
  const int n = m.n_vertices();
  const int nc = m.n_cells();
  const int nchunks = (nc + kChunk - 1) / kChunk;
  std::vector<std::vector<Triplet>> buffers(nchunks);

  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned nthreads = std::min<unsigned>(hw, nchunks);
  std::vector<std::thread> workers;
  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      int chunk = next.fetch_add(1);
      if (chunk >= nchunks) return;
      auto& buf = buffers[chunk];
      buf.reserve(kChunk * 16);
      int lo = chunk * kChunk, hi = std::min(nc, lo + kChunk);
      for (int c = lo; c < hi; ++c) local(c, buf);
    }
  };
  if (nthreads > 1) {
    for (unsigned t = 0; t < nthreads; ++t) workers.emplace_back(work);
    for (auto& w : workers) w.join();
  } else {
    work();
  }

  std::vector<Triplet> all;
  std::size_t total = 0;
  for (const auto& b : buffers) total += b.size();
  all.reserve(total);
  for (const auto& b : buffers) all.insert(all.end(), b.begin(), b.end());
  SparseMatrix A(n, n);
  A.setFromTriplets(all.begin(), all.end());
  A.makeCompressed();
  return A;
}

} // namespace

SparseMatrix assemble_stiffness(const TaggedMesh& tagged) {
  const Mesh& m = tagged.mesh;
  if (m.dim == 3) {
    return assemble(m, [&](int c, std::vector<Triplet>& buf) {
      Eigen::Matrix<double, 4, 3> g;
      double vol = p1_gradients_3d(m, c, g);
      if (vol <= 0.0) {
        std::ostringstream os;
        os << "assemble_stiffness: degenerate cell " << c << " (volume " << vol << ")";
        throw std::runtime_error(os.str());
      }
      const auto& k = m.cells[c];
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          buf.emplace_back(k[i], k[j], vol * g.row(i).dot(g.row(j)));
    });
  }
  return assemble(m, [&](int c, std::vector<Triplet>& buf) {
    Eigen::Matrix<double, 3, 2> g;
    double area = p1_gradients_2d(m, c, g);
    if (area <= 0.0) throw std::runtime_error("assemble_stiffness: degenerate cell");
    const auto& k = m.cells[c];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        buf.emplace_back(k[i], k[j], area * g.row(i).dot(g.row(j)));
  });
}

SparseMatrix assemble_mass(const TaggedMesh& tagged) {
  const Mesh& m = tagged.mesh;
  if (m.dim == 3) {
    return assemble(m, [&](int c, std::vector<Triplet>& buf) {
      double vol = m.cell_volume(c);
      if (vol <= 0.0) throw std::runtime_error("assemble_mass: degenerate cell");
      const auto& k = m.cells[c];
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          buf.emplace_back(k[i], k[j], vol * (i == j ? 0.1 : 0.05));
    });
  }
  return assemble(m, [&](int c, std::vector<Triplet>& buf) {
    double area = m.cell_volume(c);
    if (area <= 0.0) throw std::runtime_error("assemble_mass: degenerate cell");
    const auto& k = m.cells[c];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        buf.emplace_back(k[i], k[j], area * (i == j ? 1.0 / 6.0 : 1.0 / 12.0));
  });
}

Eigen::VectorXd ConstrainedSystem::expand(const Eigen::VectorXd& reduced) const {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(vertex_to_free.size());
  for (int f = 0; f < n_free(); ++f) full[free_to_vertex[f]] = reduced[f];
  return full;
}

Eigen::VectorXd ConstrainedSystem::restrict_vec(const Eigen::VectorXd& full) const {
  Eigen::VectorXd r(n_free());
  for (int f = 0; f < n_free(); ++f) r[f] = full[free_to_vertex[f]];
  return r;
}

ConstrainedSystem apply_constraints(const SparseMatrix& K, const SparseMatrix& M,
                                    const std::vector<int>& dirichlet_vertices) {
  const int n = static_cast<int>(K.rows());
  std::vector<char> constrained(n, 0);
  for (int v : dirichlet_vertices) {
    if (v < 0 || v >= n) throw std::invalid_argument("apply_constraints: vertex out of range");
    constrained[v] = 1;
  }
  ConstrainedSystem cs;
  cs.K_full = K;
  cs.M_full = M;
  cs.vertex_to_free.assign(n, -1);
  for (int v = 0; v < n; ++v)
    if (!constrained[v]) {
      cs.vertex_to_free[v] = static_cast<int>(cs.free_to_vertex.size());
      cs.free_to_vertex.push_back(v);
    }
  if (cs.free_to_vertex.empty()) throw std::runtime_error("apply_constraints: empty free set");

  auto reduce = [&](const SparseMatrix& A) {
    std::vector<Triplet> t;
    t.reserve(A.nonZeros());
    for (int col = 0; col < A.outerSize(); ++col) {
      int jc = cs.vertex_to_free[col];
      if (jc < 0) continue;
      for (SparseMatrix::InnerIterator it(A, col); it; ++it) {
        int ir = cs.vertex_to_free[it.row()];
        if (ir < 0) continue;
        t.emplace_back(ir, jc, it.value());
      }
    }
    SparseMatrix R(cs.n_free(), cs.n_free());
    R.setFromTriplets(t.begin(), t.end());
    R.makeCompressed();
    return R;
  };
  cs.K = reduce(K);
  cs.M = reduce(M);
  return cs;
}

ConstrainedSystem constrain(const TaggedMesh& tagged) {
  SparseMatrix K = assemble_stiffness(tagged);
  SparseMatrix M = assemble_mass(tagged);
  auto dirichlet = tagged.vertices_on({FacetTag::Dirichlet, FacetTag::ArtificialOuter});
  return apply_constraints(K, M, dirichlet);
}

Eigen::VectorXd solve_linear(const ConstrainedSystem& cs, const Eigen::VectorXd& rhs_full,
                             const Eigen::VectorXd& lift_full, const LinearSolveOptions& opts) {
  Eigen::VectorXd b = cs.restrict_vec(rhs_full);
  bool has_lift = lift_full.size() > 0 && lift_full.norm() > 0.0;
  if (has_lift) b -= cs.restrict_vec(cs.K_full * lift_full);

  Eigen::VectorXd x;
  if (cs.n_free() <= opts.direct_max_dofs) {
    Eigen::SimplicialLDLT<SparseMatrix> solver(cs.K);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("solve_linear: Cholesky factorization failed");
    x = solver.solve(b);
  } else {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                             Eigen::IncompleteCholesky<double>> cg(cs.K);
    cg.setTolerance(opts.tol * 0.1);
    cg.setMaxIterations(opts.max_iterations);
    x = cg.solve(b);
    if (cg.info() != Eigen::Success) {
      std::ostringstream os;
      os << "solve_linear: CG did not converge (achieved residual " << cg.error() << ")";
      throw std::runtime_error(os.str());
    }
  }
  double bn = b.norm();
  double res = bn > 0 ? (cs.K * x - b).norm() / bn : (cs.K * x - b).norm();
  if (bn > 0 && res > std::max(opts.tol, 1e-8)) {
    std::ostringstream os;
    os << "solve_linear: residual " << res << " above tolerance";
    throw std::runtime_error(os.str());
  }
  Eigen::VectorXd full = cs.expand(x);
  if (has_lift)
    for (int v = 0; v < full.size(); ++v)
      if (cs.vertex_to_free[v] < 0) full[v] = lift_full[v];
  return full;
}

Eigen::VectorXd solve_linear(const ConstrainedSystem& cs, const Eigen::VectorXd& rhs_full,
                             const LinearSolveOptions& opts) {
  return solve_linear(cs, rhs_full, Eigen::VectorXd(), opts);
}

double rayleigh_quotient(const Eigen::VectorXd& u, const SparseMatrix& K,
                         const SparseMatrix& M) {
  double den = u.dot(M * u);
  if (den <= 0.0) throw std::runtime_error("rayleigh_quotient: zero M-norm");
  return u.dot(K * u) / den;
}

double max_symmetry_defect(const SparseMatrix& A) {
  SparseMatrix D = SparseMatrix(A.transpose()) - A;
  double maxabs = 0.0;
  for (int k = 0; k < D.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(D, k); it; ++it)
      maxabs = std::max(maxabs, std::abs(it.value()));
  return maxabs;
}

} // namespace patchlab
