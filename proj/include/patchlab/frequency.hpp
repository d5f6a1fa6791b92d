// Almgren-type frequency quantities H, E, N for fields on half-ball meshes.
// Fields are understood as even reflections through {x_N = 0}: volume and
// surface integrals over the half-ball are doubled, which is exact for the
// even integrands v^2 and |grad v|^2.
#pragma once

#include <string>
#include <vector>

#include "patchlab/interpolate.hpp"
#include "patchlab/mesh.hpp"

namespace patchlab {

struct FrequencySeries {
  std::vector<double> radii;
  std::vector<double> H_values;
  std::vector<double> E_values;
  std::vector<double> N_values;
  double lambda = 0.0;
  std::string field_fingerprint;
};

class FrequencyEvaluator {
 public:
  FrequencyEvaluator(const Mesh& mesh, Eigen::VectorXd values);

  // H(v,r) = r^(1-N) * 2 * int_{S_r^+} v^2
  double H(double r) const;
  // E(v,r,lambda) = r^(2-N) * 2 * (int_{B_r^+} |grad v|^2 - lambda v^2)
  double E(double r, double lambda) const;
  // N = E / H; throws when H degenerates (broken or zero field)
  double N(double r, double lambda) const;

  // largest cell diameter among cells cut by the sphere of radius r
  double local_h(double r) const;

  const Mesh& mesh() const { return *mesh_; }
  const Eigen::VectorXd& values() const { return values_; }

 private:
  const Mesh* mesh_;
  Eigen::VectorXd values_;
  CellLocator locator_;
};

FrequencySeries frequency_series(const FrequencyEvaluator& ev, double lambda,
                                 const std::vector<double>& radii);

struct DoublingReport {
  double fitted_C = 0.0;
  bool pass = false;
  double cap = 50.0;
};

// Smallest C with N(r)+1 <= exp(C (R - r)) (N(R)+1) for all radius pairs.
DoublingReport check_doubling_bound(const FrequencySeries& series, double cap = 50.0);

} // namespace patchlab
