#include "patchlab/frequency.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "patchlab/quadrature.hpp"

namespace patchlab {

FrequencyEvaluator::FrequencyEvaluator(const Mesh& mesh, Eigen::VectorXd values)
    : mesh_(&mesh), values_(std::move(values)), locator_(mesh) {
  if (mesh.dim != 3)
    throw std::invalid_argument("FrequencyEvaluator: only 3D half-ball meshes are supported");
  if (values_.size() != mesh.n_vertices())
    throw std::invalid_argument("FrequencyEvaluator: field size mismatch");
}

double FrequencyEvaluator::H(double r) const {
  double surf = integrate_hemisphere(r, [&](const Vec3& x) {
    int c = locator_.locate_near(x, 1e-6);
    if (c < 0) {
      std::ostringstream os;
      os << "compute_H: radius " << r << " not covered by the mesh";
      throw std::runtime_error(os.str());
    }
    double v = eval_field_in_cell(*mesh_, values_, c, x);
    return v * v;
  });
  return std::pow(r, 1 - 3) * 2.0 * surf;
}

double FrequencyEvaluator::E(double r, double lambda) const {
  double grad2 = field_h1semisq_in_ball(*mesh_, values_, r);
  double mass = lambda != 0.0 ? field_l2sq_in_ball(*mesh_, values_, r) : 0.0;
  return std::pow(r, 2 - 3) * 2.0 * (grad2 - lambda * mass);
}

double FrequencyEvaluator::N(double r, double lambda) const {
  double h = H(r);
  if (h < 1e-14)
    throw std::runtime_error("compute_N: H(v,r) below 1e-14 (degenerate field; H should be "
                             "positive for nonzero eigenfields)");
  return E(r, lambda) / h;
}

double FrequencyEvaluator::local_h(double r) const {
  double h = 0.0;
  for (int c = 0; c < mesh_->n_cells(); ++c) {
    const auto& k = mesh_->cells[c];
    double rmin = 1e300, rmax = 0.0;
    for (int i = 0; i <= mesh_->dim; ++i) {
      double nr = mesh_->vertices[k[i]].norm();
      rmin = std::min(rmin, nr);
      rmax = std::max(rmax, nr);
    }
    if (rmin <= r && r <= rmax) h = std::max(h, mesh_->cell_diameter(c));
  }
  return h;
}

FrequencySeries frequency_series(const FrequencyEvaluator& ev, double lambda,
                                 const std::vector<double>& radii) {
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    if (!(radii[i] < radii[i + 1]))
      throw std::invalid_argument("frequency_series: radii must be strictly increasing");
  std::vector<double> offending;
  for (double r : radii)
    if (r < 4.0 * ev.local_h(r)) offending.push_back(r);
  if (!offending.empty()) {
    std::ostringstream os;
    os << "frequency_series: radii below 4h for the local mesh size:";
    for (double r : offending) os << " " << r;
    throw std::runtime_error(os.str());
  }
  FrequencySeries s;
  s.lambda = lambda;
  s.radii = radii;
  std::uint64_t h = 1469598103934665603ULL;
  for (int i = 0; i < ev.values().size(); ++i) {
    double x = ev.values()[i];
    const auto* p = reinterpret_cast<const unsigned char*>(&x);
    for (std::size_t b = 0; b < sizeof(double); ++b) h = (h ^ p[b]) * 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  s.field_fingerprint = os.str();
  for (double r : radii) {
    s.H_values.push_back(ev.H(r));
    s.E_values.push_back(ev.E(r, lambda));
    s.N_values.push_back(s.E_values.back() / s.H_values.back());
  }
  return s;
}

DoublingReport check_doubling_bound(const FrequencySeries& series, double cap) {
  if (series.radii.size() < 3)
    throw std::invalid_argument("check_doubling_bound: need at least 3 radii");
  for (double h : series.H_values)
    if (!(h > 0.0)) throw std::runtime_error("check_doubling_bound: nonpositive H in series");
  DoublingReport rep;
  rep.cap = cap;
  double C = 0.0;
  bool finite = true;
  for (std::size_t i = 0; i < series.radii.size(); ++i)
    for (std::size_t j = i + 1; j < series.radii.size(); ++j) {
      double ni = series.N_values[i] + 1.0;
      double nj = series.N_values[j] + 1.0;
      if (ni <= 0.0) continue;        // bound trivially satisfied at this pair
      if (nj <= 0.0) {
        finite = false;               // no finite C can hold
        continue;
      }
      double c = std::log(ni / nj) / (series.radii[j] - series.radii[i]);
      C = std::max(C, c);
    }
  rep.fitted_C = finite ? C : std::numeric_limits<double>::infinity();
  rep.pass = finite && C <= cap;
  return rep;
}

} // namespace patchlab
