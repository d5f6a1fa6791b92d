// JSON run configuration with strict schema validation (unknown keys are
// rejected before any compute starts).
#pragma once

#include <string>

#include "patchlab/harness.hpp"

namespace patchlab {

struct RunConfig {
  // domain
  double domain_radius = 1.0;
  // patch
  PatchSpec patch = PatchSpec::disk(1.0);
  // single-solve epsilon for the mesh/eig commands (0 = Dirichlet problem)
  double eig_epsilon = 0.0;
  int eig_count = 3;
  double mesh_h_far = 0.2;
  double mesh_grading = 1.0;
  // sweep + numerics
  SweepConfig sweep;
  // profile run
  ProfileNumerics profile;
  double profile_psi_c = 1.0; // psi = c * x_N for the profile command
  // outputs
  std::string out_dir = "out";

  std::string config_hash; // FNV-1a of the canonical serialized document

  static RunConfig from_file(const std::string& path);
  static RunConfig from_json_text(const std::string& text);
};

inline const char* kVersion = "patchlab 0.1.0";

} // namespace patchlab
