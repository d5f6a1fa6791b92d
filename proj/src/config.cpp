#include "patchlab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace patchlab {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& msg) {
  throw std::invalid_argument("config: " + msg);
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) schema_error(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) schema_error("unknown key '" + it.key() + "' in " + where);
}

double require_number(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) schema_error("missing key '" + key + "' in " + where);
  if (!obj[key].is_number()) schema_error("key '" + key + "' in " + where + " must be a number");
  return obj[key].get<double>();
}

double number_or(const json& obj, const std::string& key, double dflt) {
  if (!obj.contains(key)) return dflt;
  return obj[key].get<double>();
}

std::vector<double> number_list(const json& obj, const std::string& where,
                                const std::string& key) {
  if (!obj[key].is_array()) schema_error("key '" + key + "' in " + where + " must be an array");
  std::vector<double> v;
  for (const auto& e : obj[key]) {
    if (!e.is_number()) schema_error("entries of '" + key + "' in " + where + " must be numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

PatchSpec parse_patch(const json& p) {
  check_keys(p, "patch", {"kind", "radius", "half_side", "vertices", "rho"});
  std::string kind = p.value("kind", std::string("disk"));
  if (kind == "disk") return PatchSpec::disk(number_or(p, "radius", 1.0));
  if (kind == "square") return PatchSpec::square(number_or(p, "half_side", 1.0));
  if (kind == "polygon") {
    if (!p.contains("vertices")) schema_error("polygon patch requires 'vertices'");
    std::vector<Eigen::Vector2d> verts;
    for (const auto& v : p["vertices"]) {
      if (!v.is_array() || v.size() != 2) schema_error("polygon vertices must be [x, y] pairs");
      verts.emplace_back(v[0].get<double>(), v[1].get<double>());
    }
    return PatchSpec::polygon(verts);
  }
  if (kind == "radial") {
    if (!p.contains("rho")) schema_error("radial patch requires 'rho'");
    return PatchSpec::radial(number_list(p, "patch", "rho"));
  }
  schema_error("patch kind must be one of disk|square|polygon|radial");
}

std::uint64_t fnv1a_str(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

} // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    schema_error(std::string("invalid JSON: ") + e.what());
  }
  check_keys(doc, "document",
             {"domain", "patch", "eig", "mesh", "sweep", "numerics", "profile", "outputs"});

  RunConfig cfg;
  {
    std::ostringstream os;
    os << std::hex << fnv1a_str(doc.dump());
    cfg.config_hash = os.str();
  }

  if (!doc.contains("domain")) schema_error("missing section 'domain'");
  const auto& dom = doc["domain"];
  check_keys(dom, "domain", {"kind", "radius"});
  std::string dkind = dom.value("kind", std::string("half_ball"));
  if (dkind != "half_ball") schema_error("domain kind must be 'half_ball'");
  cfg.domain_radius = require_number(dom, "domain", "radius");
  if (!(cfg.domain_radius > 0.0)) schema_error("domain radius must be positive");

  if (doc.contains("patch")) cfg.patch = parse_patch(doc["patch"]);

  if (doc.contains("mesh")) {
    const auto& m = doc["mesh"];
    check_keys(m, "mesh", {"h_far", "grading"});
    cfg.mesh_h_far = number_or(m, "h_far", cfg.mesh_h_far);
    cfg.mesh_grading = number_or(m, "grading", cfg.mesh_grading);
  }

  if (doc.contains("eig")) {
    const auto& e = doc["eig"];
    check_keys(e, "eig", {"epsilon", "count"});
    cfg.eig_epsilon = number_or(e, "epsilon", 0.0);
    cfg.eig_count = (int)number_or(e, "count", 3);
    if (cfg.eig_epsilon < 0.0) schema_error("eig epsilon must be >= 0");
    if (cfg.eig_count < 1) schema_error("eig count must be >= 1");
  }

  cfg.sweep.domain_radius = cfg.domain_radius;
  cfg.sweep.patch = cfg.patch;
  if (doc.contains("sweep")) {
    const auto& s = doc["sweep"];
    check_keys(s, "sweep", {"epsilon_list", "n0"});
    if (s.contains("epsilon_list")) cfg.sweep.epsilon_list = number_list(s, "sweep", "epsilon_list");
    cfg.sweep.n0 = (int)number_or(s, "n0", 1);
  }

  if (doc.contains("numerics")) {
    const auto& n = doc["numerics"];
    check_keys(n, "numerics",
               {"h_far", "patch_resolution", "transition_growth", "rim_refine", "fit_h",
                "fit_plateau", "fit_radius", "frequency_radii", "eig_tol", "lin_tol"});
    auto& sn = cfg.sweep.numerics;
    sn.h_far = number_or(n, "h_far", sn.h_far);
    sn.patch_resolution = number_or(n, "patch_resolution", sn.patch_resolution);
    sn.transition_growth = number_or(n, "transition_growth", sn.transition_growth);
    sn.rim_refine = number_or(n, "rim_refine", sn.rim_refine);
    sn.fit_h = number_or(n, "fit_h", sn.fit_h);
    sn.fit_plateau = number_or(n, "fit_plateau", sn.fit_plateau);
    sn.fit_radius = number_or(n, "fit_radius", sn.fit_radius);
    if (n.contains("frequency_radii"))
      sn.frequency_radii = number_list(n, "numerics", "frequency_radii");
    sn.eig.tol = number_or(n, "eig_tol", sn.eig.tol);
    sn.profile.lin.tol = number_or(n, "lin_tol", sn.profile.lin.tol);
  }

  if (doc.contains("profile")) {
    const auto& p = doc["profile"];
    check_keys(p, "profile",
               {"R_list", "h_patch", "h_rim", "rim_growth", "out_growth", "psi_c",
                "scaling_self_test"});
    auto& pr = cfg.profile;
    if (p.contains("R_list")) pr.R_list = number_list(p, "profile", "R_list");
    pr.h_patch = number_or(p, "h_patch", pr.h_patch);
    pr.h_rim = number_or(p, "h_rim", pr.h_rim);
    pr.rim_growth = number_or(p, "rim_growth", pr.rim_growth);
    pr.out_growth = number_or(p, "out_growth", pr.out_growth);
    if (p.contains("scaling_self_test")) pr.scaling_self_test = p["scaling_self_test"].get<bool>();
    cfg.profile_psi_c = number_or(p, "psi_c", 1.0);
    cfg.sweep.numerics.profile = pr;
  }

  if (doc.contains("outputs")) {
    const auto& o = doc["outputs"];
    check_keys(o, "outputs", {"dir", "formats"});
    if (o.contains("dir")) cfg.out_dir = o["dir"].get<std::string>();
  }

  // consistency: the scaled patch must stay well inside the flat face
  if (doc.contains("sweep") && !cfg.sweep.epsilon_list.empty()) {
    double worst = cfg.sweep.epsilon_list.front() * cfg.patch.diameter();
    if (worst >= cfg.domain_radius / 2.0)
      schema_error("max epsilon * diam(V) = " + std::to_string(worst) +
                   " violates the diameter constraint (must stay below radius/2)");
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return from_json_text(ss.str());
}

} // namespace patchlab
