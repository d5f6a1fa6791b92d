#include "patchlab/interpolate.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace patchlab {

namespace {

// barycentric coordinates of x in tet/triangle c; returns min coordinate
double barycentric_min(const Mesh& m, int c, const Vec3& x, Eigen::Vector4d& lam) {
  const auto& k = m.cells[c];
  if (m.dim == 3) {
    Eigen::Matrix3d J;
    for (int i = 0; i < 3; ++i) J.col(i) = m.vertices[k[i + 1]] - m.vertices[k[0]];
    Eigen::Vector3d rhs = x - m.vertices[k[0]];
    Eigen::Vector3d l = J.colPivHouseholderQr().solve(rhs);
    lam << 1.0 - l.sum(), l[0], l[1], l[2];
    return lam.minCoeff();
  }
  Eigen::Matrix2d J;
  for (int i = 0; i < 2; ++i) J.col(i) = (m.vertices[k[i + 1]] - m.vertices[k[0]]).head<2>();
  Eigen::Vector2d rhs = (x - m.vertices[k[0]]).head<2>();
  Eigen::Vector2d l = J.inverse() * rhs;
  lam << 1.0 - l.sum(), l[0], l[1], 0.0;
  return std::min({lam[0], lam[1], lam[2]});
}

} // namespace

CellLocator::CellLocator(const Mesh& mesh) : mesh_(&mesh) {
  lo_ = Vec3::Constant(1e300);
  hi_ = Vec3::Constant(-1e300);
  for (const auto& v : mesh.vertices) {
    lo_ = lo_.cwiseMin(v);
    hi_ = hi_.cwiseMax(v);
  }
  Vec3 extent = (hi_ - lo_).cwiseMax(1e-12);
  // aim at ~(2 cells per bin) occupancy
  double target_bins = std::max(1.0, mesh.n_cells() / 2.0);
  double vol = extent.x() * extent.y() * (mesh.dim == 3 ? extent.z() : 1.0);
  cell_size_ = std::pow(vol / target_bins, 1.0 / mesh.dim);
  nx_ = std::max(1, (int)(extent.x() / cell_size_) + 1);
  ny_ = std::max(1, (int)(extent.y() / cell_size_) + 1);
  nz_ = mesh.dim == 3 ? std::max(1, (int)(extent.z() / cell_size_) + 1) : 1;
  bins_.assign((std::size_t)nx_ * ny_ * nz_, {});
  for (int c = 0; c < mesh.n_cells(); ++c) {
    Vec3 clo = Vec3::Constant(1e300), chi = Vec3::Constant(-1e300);
    for (int i = 0; i <= mesh.dim; ++i) {
      const Vec3& v = mesh.vertices[mesh.cells[c][i]];
      clo = clo.cwiseMin(v);
      chi = chi.cwiseMax(v);
    }
    int i0 = std::clamp((int)((clo.x() - lo_.x()) / cell_size_), 0, nx_ - 1);
    int i1 = std::clamp((int)((chi.x() - lo_.x()) / cell_size_), 0, nx_ - 1);
    int j0 = std::clamp((int)((clo.y() - lo_.y()) / cell_size_), 0, ny_ - 1);
    int j1 = std::clamp((int)((chi.y() - lo_.y()) / cell_size_), 0, ny_ - 1);
    int k0 = 0, k1 = 0;
    if (mesh.dim == 3) {
      k0 = std::clamp((int)((clo.z() - lo_.z()) / cell_size_), 0, nz_ - 1);
      k1 = std::clamp((int)((chi.z() - lo_.z()) / cell_size_), 0, nz_ - 1);
    }
    for (int k = k0; k <= k1; ++k)
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) bins_[bin_index(i, j, k)].push_back(c);
  }
}

int CellLocator::locate(const Vec3& x, double tol) const {
  int i = std::clamp((int)((x.x() - lo_.x()) / cell_size_), 0, nx_ - 1);
  int j = std::clamp((int)((x.y() - lo_.y()) / cell_size_), 0, ny_ - 1);
  int k = mesh_->dim == 3 ? std::clamp((int)((x.z() - lo_.z()) / cell_size_), 0, nz_ - 1) : 0;
  Eigen::Vector4d lam;
  for (int c : bins_[bin_index(i, j, k)])
    if (barycentric_min(*mesh_, c, x, lam) >= -tol) return c;
  return -1;
}

int CellLocator::locate_near(const Vec3& x, double slack) const {
  int c = locate(x);
  if (c >= 0) return c;
  // scan the 3x3x3 bin neighbourhood for the least-violating candidate
  int ic = std::clamp((int)((x.x() - lo_.x()) / cell_size_), 0, nx_ - 1);
  int jc = std::clamp((int)((x.y() - lo_.y()) / cell_size_), 0, ny_ - 1);
  int kc = mesh_->dim == 3 ? std::clamp((int)((x.z() - lo_.z()) / cell_size_), 0, nz_ - 1) : 0;
  double best = -1e300;
  int best_cell = -1;
  Eigen::Vector4d lam;
  for (int dk = -1; dk <= 1; ++dk)
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        int i = ic + di, j = jc + dj, k = kc + dk;
        if (i < 0 || i >= nx_ || j < 0 || j >= ny_ || k < 0 || k >= nz_) continue;
        for (int cand : bins_[bin_index(i, j, k)]) {
          double m = barycentric_min(*mesh_, cand, x, lam);
          if (m > best) {
            best = m;
            best_cell = cand;
          }
        }
      }
  if (best_cell >= 0 && best >= -slack) return best_cell;
  return -1;
}

double eval_field_in_cell(const Mesh& mesh, const Eigen::VectorXd& values, int cell,
                          const Vec3& x) {
  Eigen::Vector4d lam;
  barycentric_min(mesh, cell, x, lam);
  double v = 0.0;
  for (int i = 0; i <= mesh.dim; ++i) v += lam[i] * values[mesh.cells[cell][i]];
  return v;
}

Vec3 gradient_in_cell(const Mesh& mesh, const Eigen::VectorXd& values, int cell) {
  const auto& k = mesh.cells[cell];
  if (mesh.dim == 3) {
    Eigen::Matrix3d J;
    for (int i = 0; i < 3; ++i) J.col(i) = mesh.vertices[k[i + 1]] - mesh.vertices[k[0]];
    Eigen::Vector3d d;
    for (int i = 0; i < 3; ++i) d[i] = values[k[i + 1]] - values[k[0]];
    return J.transpose().colPivHouseholderQr().solve(d);
  }
  Eigen::Matrix2d J;
  for (int i = 0; i < 2; ++i) J.col(i) = (mesh.vertices[k[i + 1]] - mesh.vertices[k[0]]).head<2>();
  Eigen::Vector2d d(values[k[1]] - values[k[0]], values[k[2]] - values[k[0]]);
  Eigen::Vector2d g = J.transpose().inverse() * d;
  return Vec3(g.x(), g.y(), 0.0);
}

double eval_field(const CellLocator& loc, const Eigen::VectorXd& values, const Vec3& x) {
  int c = loc.locate_near(x, 1e-6);
  if (c < 0) {
    std::ostringstream os;
    os << "eval_field: point (" << x.transpose() << ") outside the mesh";
    throw std::runtime_error(os.str());
  }
  return eval_field_in_cell(loc.mesh(), values, c, x);
}

Vec3 eval_gradient(const CellLocator& loc, const Eigen::VectorXd& values, const Vec3& x) {
  int c = loc.locate_near(x, 1e-6);
  if (c < 0) throw std::runtime_error("eval_gradient: point outside the mesh");
  return gradient_in_cell(loc.mesh(), values, c);
}

Eigen::VectorXd interpolate_onto(const CellLocator& source_loc,
                                 const Eigen::VectorXd& source_values, const Mesh& target,
                                 const std::vector<int>& target_vertices) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(target.n_vertices());
  for (int v : target_vertices)
    out[v] = eval_field(source_loc, source_values, target.vertices[v]);
  return out;
}

} // namespace patchlab
