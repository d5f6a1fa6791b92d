#include "patchlab/eigensolve.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

namespace patchlab {

namespace {

// deterministic start vector (splitmix64 stream)
Eigen::VectorXd start_vector(int n) {
  Eigen::VectorXd v(n);
  std::uint64_t s = 0x9E3779B97F4A7C15ULL;
  for (int i = 0; i < n; ++i) {
    s += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z = z ^ (z >> 31);
    v[i] = (double)(z >> 11) / (double)(1ULL << 53) - 0.5;
  }
  return v;
}

} // namespace

EigenSolveResult solve_generalized_eig(const ConstrainedSystem& cs, int count, double shift,
                                       const EigenSolveOptions& opts) {
  if (count < 1) throw std::invalid_argument("solve_generalized_eig: count must be >= 1");
  const int n = cs.n_free();
  if (count >= n) throw std::invalid_argument("solve_generalized_eig: count exceeds system size");

  SparseMatrix A = cs.K;
  if (shift != 0.0) A = SparseMatrix(cs.K - shift * cs.M);
  Eigen::SimplicialLDLT<SparseMatrix> chol(A);
  if (chol.info() != Eigen::Success)
    throw std::runtime_error("solve_generalized_eig: factorization of K - shift*M failed "
                             "(is the shift below the first eigenvalue?)");

  const auto& M = cs.M;
  auto op = [&](const Eigen::VectorXd& x) { return chol.solve(M * x).eval(); };

  // M-orthonormal Lanczos basis; T built incrementally.
  int m_max = std::min(n, std::max(opts.max_subspace, 4 * count + 30));
  std::vector<Eigen::VectorXd> V;
  std::vector<Eigen::VectorXd> MV; // cache of M * v_j
  std::vector<double> alpha, beta; // beta[j] links v_j and v_{j+1}

  Eigen::VectorXd v = start_vector(n);
  {
    double nrm = std::sqrt(v.dot(M * v));
    v /= nrm;
  }
  V.push_back(v);
  MV.push_back(M * v);

  EigenSolveResult result;
  int m_target = std::min(m_max, std::max(2 * count + 20, 30));
  Eigen::VectorXd ritz_values;
  Eigen::MatrixXd ritz_vectors;

  auto extract = [&](int m) {
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    ritz_values = es.eigenvalues();   // ascending in theta
    ritz_vectors = es.eigenvectors();
  };

  int m = 0;
  bool converged = false;
  while (!converged) {
    // extend the factorization to m_target
    while (m < m_target) {
      Eigen::VectorXd w = op(V[m]);
      double a = w.dot(MV[m]);
      alpha.push_back(a);
      w -= a * V[m];
      if (m > 0) w -= beta[m - 1] * V[m - 1];
      // full reorthogonalization, twice
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= m; ++i) w -= MV[i].dot(w) * V[i];
      double b = std::sqrt(std::max(0.0, w.dot(M * w)));
      beta.push_back(b);
      ++m;
      if (b < 1e-14) {
        // invariant subspace reached
        if (m >= count) break;
        throw std::runtime_error("solve_generalized_eig: Krylov breakdown before reaching count");
      }
      V.push_back(w / b);
      MV.push_back(M * V.back());
    }
    extract(m);

    // largest thetas of T correspond to the smallest eigenvalues
    converged = true;
    for (int i = 0; i < count; ++i) {
      int idx = m - 1 - i;
      double theta = ritz_values[idx];
      if (theta <= 0.0) {
        converged = false;
        break;
      }
      // residual estimate for the tridiagonal factorization
      double est = std::abs(beta[m - 1] * ritz_vectors(m - 1, idx)) * (1.0 / theta) / theta;
      double lambda = shift + 1.0 / theta;
      if (est > opts.tol * std::max(1.0, lambda) * 0.1) {
        converged = false;
        break;
      }
    }
    if (!converged) {
      if (m >= m_max) break; // fall through; verify true residuals below
      m_target = std::min(m_max, m + std::max(20, m / 2));
    }
  }

  // assemble Ritz pairs
  std::vector<EigenPair> pairs;
  for (int i = 0; i < count; ++i) {
    int idx = m - 1 - i;
    double theta = ritz_values[idx];
    if (theta <= 0.0)
      throw std::runtime_error("solve_generalized_eig: nonpositive Ritz value (bad shift?)");
    EigenPair p;
    p.value = shift + 1.0 / theta;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < m; ++j) u += ritz_vectors(j, idx) * V[j];
    double nrm = std::sqrt(u.dot(M * u));
    u /= nrm;
    Eigen::VectorXd r = cs.K * u - p.value * (M * u);
    p.residual = r.norm() / ((M * u).norm() * std::max(1.0, std::abs(p.value)));
    p.field = cs.expand(u);
    pairs.push_back(std::move(p));
  }
  std::reverse(pairs.begin(), pairs.end()); // nondecreasing eigenvalues
  for (int i = 0; i < count; ++i) {
    if (pairs[i].residual > opts.tol) {
      std::ostringstream os;
      os << "solve_generalized_eig: pair " << i << " residual " << pairs[i].residual
         << " above tolerance " << opts.tol << " after subspace " << m;
      throw std::runtime_error(os.str());
    }
  }
  for (int i = 0; i + 1 < count; ++i) {
    if (pairs[i + 1].value - pairs[i].value < opts.clustered_gap) {
      std::ostringstream os;
      os << "clustered eigenvalues: gap between " << i + 1 << " and " << i + 2 << " is "
         << pairs[i + 1].value - pairs[i].value;
      result.warnings.push_back(os.str());
    }
  }
  result.pairs = std::move(pairs);
  return result;
}

void align_sign(Eigen::VectorXd& field, const Eigen::VectorXd& reference,
                const SparseMatrix& M) {
  if (field.dot(M * reference) < 0.0) field = -field;
}

} // namespace patchlab
