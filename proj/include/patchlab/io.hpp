// Field files, JSON reports and CSV tables.
#pragma once

#include <string>

#include <json.hpp>

#include "patchlab/config.hpp"
#include "patchlab/frequency.hpp"
#include "patchlab/harness.hpp"
#include "patchlab/profile.hpp"
#include "patchlab/spectrum.hpp"

namespace patchlab {

void write_field(const std::string& path, const Eigen::VectorXd& values);
Eigen::VectorXd read_field(const std::string& path);

nlohmann::json spectrum_to_json(const SpectrumResult& r);
nlohmann::json coefficient_report_to_json(const CoefficientReport& r);
nlohmann::json sweep_to_json(const SweepResult& r);

void write_json(const std::string& path, const nlohmann::json& doc, const RunConfig& cfg);
void write_sweep_csv(const std::string& path, const SweepResult& r);
// two-column data, plot-ready: log(eps) log(d)
void write_rate_plot_data(const std::string& path, const SweepResult& r);
void write_frequency_csv(const std::string& path, const FrequencySeries& s);

} // namespace patchlab
