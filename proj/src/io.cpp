#include "patchlab/io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace patchlab {

using nlohmann::json;

void write_field(const std::string& path, const Eigen::VectorXd& values) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_field: cannot open " + path);
  os.precision(17);
  os << values.size() << "\n";
  for (int i = 0; i < values.size(); ++i) os << values[i] << "\n";
}

Eigen::VectorXd read_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_field: cannot open " + path);
  int n;
  if (!(is >> n) || n < 0) throw std::runtime_error("read_field: bad header");
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i)
    if (!(is >> v[i])) throw std::runtime_error("read_field: truncated file");
  return v;
}

json spectrum_to_json(const SpectrumResult& r) {
  json j;
  j["epsilon"] = r.epsilon;
  j["mesh_fingerprint"] = r.mesh_fingerprint;
  json vals = json::array(), res = json::array();
  for (const auto& p : r.pairs) {
    vals.push_back(p.value);
    res.push_back(p.residual);
  }
  j["eigenvalues"] = vals;
  j["residuals"] = res;
  j["warnings"] = r.warnings;
  return j;
}

json coefficient_report_to_json(const CoefficientReport& r) {
  json j;
  j["m_extrapolated"] = r.m_extrapolated;
  j["C"] = r.C;
  j["R_list"] = r.R_list;
  j["m_values"] = r.m_values;
  j["pair_extrapolants"] = r.pair_extrapolants;
  j["observed_order"] = r.observed_order;
  j["m_monotone"] = r.m_monotone;
  if (r.scaling_self_test_ratio != 0.0) j["scaling_self_test_ratio"] = r.scaling_self_test_ratio;
  return j;
}

json sweep_to_json(const SweepResult& r) {
  json j;
  j["gamma_hat_raw"] = r.gamma_hat_raw;
  j["gamma"] = r.gamma;
  j["c"] = r.c;
  j["pi0"] = r.psi.pi0;
  j["lambda_limit"] = r.lambda_limit;
  j["rate_exponent"] = r.rate_exponent;
  j["C_unit_patch"] = r.C_unit_patch;
  j["C_pred"] = r.C_pred;
  j["fit"] = {{"slope", r.fit.slope},
              {"intercept", r.fit.intercept},
              {"slope_stderr", r.fit.slope_stderr}};
  json recs = json::array();
  for (const auto& rec : r.records) {
    recs.push_back({{"epsilon", rec.epsilon},
                    {"lambda_eps", rec.lambda_eps},
                    {"lambda_dir", rec.lambda_dir},
                    {"d", rec.d},
                    {"C_emp", rec.C_emp},
                    {"resolved", rec.resolved},
                    {"mesh_fingerprint", rec.mesh_fingerprint}});
  }
  j["records"] = recs;
  return j;
}

void write_json(const std::string& path, const json& doc, const RunConfig& cfg) {
  json wrapped = doc;
  wrapped["meta"] = {{"version", kVersion}, {"config_hash", cfg.config_hash}};
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_json: cannot open " + path);
  os << wrapped.dump(2) << "\n";
}

void write_sweep_csv(const std::string& path, const SweepResult& r) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_sweep_csv: cannot open " + path);
  os.precision(17);
  os << "epsilon,lambda_eps,lambda_dir,d,C_emp\n";
  for (const auto& rec : r.records)
    os << rec.epsilon << "," << rec.lambda_eps << "," << rec.lambda_dir << "," << rec.d << ","
       << rec.C_emp << "\n";
}

void write_rate_plot_data(const std::string& path, const SweepResult& r) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_rate_plot_data: cannot open " + path);
  os.precision(17);
  for (const auto& rec : r.records)
    if (rec.d > 0.0) os << std::log(rec.epsilon) << " " << std::log(rec.d) << "\n";
}

void write_frequency_csv(const std::string& path, const FrequencySeries& s) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_frequency_csv: cannot open " + path);
  os.precision(17);
  os << "r,H,E,N\n";
  for (std::size_t i = 0; i < s.radii.size(); ++i)
    os << s.radii[i] << "," << s.H_values[i] << "," << s.E_values[i] << "," << s.N_values[i]
       << "\n";
}

} // namespace patchlab
