// Command-line driver: meshing, eigen solves, half-space profile runs,
// frequency diagnostics and epsilon sweeps with reproducible outputs.
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "patchlab/config.hpp"
#include "patchlab/io.hpp"

namespace fs = std::filesystem;
using namespace patchlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 2;
constexpr int kExitConfig = 3;

TaggedMesh make_domain_mesh(const RunConfig& cfg, double epsilon) {
  Mesh mesh = build_half_ball_mesh(cfg.domain_radius, cfg.mesh_h_far, cfg.mesh_grading);
  if (epsilon > 0.0) return tag_boundary(mesh, cfg.patch, epsilon);
  return tag_all_dirichlet(mesh);
}

int cmd_mesh(const RunConfig& cfg, const std::string& mesh_out) {
  TaggedMesh tm = make_domain_mesh(cfg, cfg.eig_epsilon);
  fs::create_directories(fs::path(mesh_out).parent_path().empty()
                             ? "."
                             : fs::path(mesh_out).parent_path().string());
  write_mesh(tm, mesh_out);
  std::cout << "mesh: " << tm.mesh.n_vertices() << " vertices, " << tm.mesh.n_cells()
            << " cells, " << tm.mesh.n_facets() << " boundary facets\n"
            << "volume " << tm.mesh.total_volume() << ", min dihedral "
            << tm.mesh.min_dihedral_angle_deg() << " deg\n"
            << "tags: dirichlet " << tm.count_tag(FacetTag::Dirichlet) << ", neumann "
            << tm.count_tag(FacetTag::Neumann) << ", artificial "
            << tm.count_tag(FacetTag::ArtificialOuter) << "\n";
  return kExitOk;
}

int cmd_eig(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  TaggedMesh tm = make_domain_mesh(cfg, cfg.eig_epsilon);
  EigenSolveOptions opts = cfg.sweep.numerics.eig;
  SpectrumResult res;
  if (cfg.eig_epsilon > 0.0 && tm.count_tag(FacetTag::Neumann) > 0)
    res = compute_mixed_eigs(tm, cfg.eig_count, nullptr, opts);
  else
    res = compute_dirichlet_eigs(tm, cfg.eig_count, opts);

  nlohmann::json j = spectrum_to_json(res);
  // vanishing-order diagnostics of the lowest mode when the mesh allows it
  try {
    auto est = estimate_vanishing_order(tm.mesh, res.pairs[0].field, res.pairs[0].value,
                                        cfg.sweep.numerics.frequency_radii);
    j["gamma_hat"] = est.gamma_hat;
    int gamma = std::max(1, (int)std::lround(est.gamma_hat));
    PsiSpec psi = extract_psi(tm.mesh, res.pairs[0].field, gamma, cfg.sweep.numerics.fit_radius);
    j["gamma"] = gamma;
    j["psi_coefficients"] = std::vector<double>(
        psi.coefficients.data(), psi.coefficients.data() + psi.coefficients.size());
    j["pi0"] = psi.pi0;
  } catch (const std::exception& e) {
    j["blowup_diagnostics_skipped"] = e.what();
  }
  write_json(cfg.out_dir + "/spectrum.json", j, cfg);
  for (std::size_t i = 0; i < res.pairs.size(); ++i)
    write_field(cfg.out_dir + "/eigfield_" + std::to_string(i + 1) + ".txt",
                res.pairs[i].field);
  write_mesh(tm, cfg.out_dir + "/mesh.txt");
  std::cout << "eig: wrote " << cfg.out_dir << "/spectrum.json (lambda_1 = "
            << res.pairs[0].value << ")\n";
  return kExitOk;
}

int cmd_profile(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  PsiSpec psi = PsiSpec::linear(cfg.profile_psi_c);
  CoefficientReport rep = compute_C(cfg.patch, psi, cfg.profile);
  nlohmann::json j = coefficient_report_to_json(rep);
  if (psi.poly.is_zero()) j["warning"] = "psi = 0: empty problem, C = 0";
  // chi / flux / g_R checks on the largest-R solve
  double Rbig = cfg.profile.R_list.back();
  ProfileSolution sol = solve_w0(cfg.patch, psi, Rbig, cfg.profile);
  if (!psi.poly.is_zero()) {
    Eigen::VectorXd U = profile_U_values(sol);
    double m = rep.m_extrapolated;
    double chi1 = compute_chi(sol.tm.mesh, U, psi, 1.0);
    double chi2 = compute_chi(sol.tm.mesh, U, psi, 2.0);
    double p = 3.0 + 2.0 * psi.gamma - 2.0;
    j["checks"] = {
        {"dual_m_rel_gap",
         std::abs(sol.m_boundary - sol.m_energy) / std::max(1e-300, std::abs(sol.m_energy))},
        {"chi_1", chi1},
        {"chi_1_predicted", psi.pi0 - 2.0 * m / p},
        {"chi_2", chi2},
        {"chi_2_predicted", psi.pi0 * std::pow(2.0, psi.gamma) -
                                2.0 * m / p * std::pow(2.0, -3.0 - psi.gamma + 2.0)},
    };
    if (rep.scaling_self_test_ratio != 0.0)
      j["checks"]["scaling_self_test_ratio"] = rep.scaling_self_test_ratio;
  }
  write_json(cfg.out_dir + "/profile.json", j, cfg);
  std::cout << "profile: C = " << rep.C << " (m = " << rep.m_extrapolated << "), wrote "
            << cfg.out_dir << "/profile.json\n";
  return kExitOk;
}

int cmd_frequency(const RunConfig& cfg, const std::string& mesh_path,
                  const std::string& field_path, double lambda,
                  std::vector<double> radii) {
  fs::create_directories(cfg.out_dir);
  TaggedMesh tm = read_mesh(mesh_path);
  Eigen::VectorXd v = read_field(field_path);
  if (radii.empty()) radii = cfg.sweep.numerics.frequency_radii;
  FrequencyEvaluator ev(tm.mesh, v);
  FrequencySeries s = frequency_series(ev, lambda, radii);
  write_frequency_csv(cfg.out_dir + "/frequency.csv", s);
  std::cout << "frequency: wrote " << cfg.out_dir << "/frequency.csv (N at r_min = "
            << s.N_values.front() << ")\n";
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, const std::vector<std::string>& checks) {
  fs::create_directories(cfg.out_dir);
  SweepResult sweep = run_epsilon_sweep(cfg.sweep, [&](const EpsilonRecord& rec) {
    // persist partial records as the sweep advances
    std::ofstream os(cfg.out_dir + "/sweep_partial.csv", std::ios::app);
    os.precision(17);
    os << rec.epsilon << "," << rec.lambda_eps << "," << rec.lambda_dir << "," << rec.d << "\n";
  });
  nlohmann::json j = sweep_to_json(sweep);

  for (const std::string& check : checks) {
    if (check == "sandwich") {
      double C_ball = sweep.config.patch.kind() == PatchSpec::Kind::Disk &&
                              std::abs(sweep.config.patch.disk_radius() - 1.0) < 1e-12
                          ? sweep.C_unit_patch
                          : compute_C(PatchSpec::disk(1.0), PsiSpec::linear(1.0),
                                      cfg.sweep.numerics.profile).C;
      SandwichReport rep = sandwich_check(sweep, C_ball);
      j["sandwich"] = {{"r_V", rep.r_V},   {"R_V", rep.R_V},       {"lower", rep.lower},
                       {"upper", rep.upper}, {"C_emp_min", rep.C_emp_min}, {"pass", rep.pass}};
      std::cout << "sandwich: " << (rep.pass ? "PASS" : "FAIL") << " [" << rep.lower << ", "
                << rep.upper << "] contains " << rep.C_emp_min << "\n";
    } else if (check == "blowup") {
      double R = 4.0;
      ProfileNumerics pn = cfg.sweep.numerics.profile;
      ProfileSolution prof = solve_w0(sweep.config.patch, PsiSpec::linear(1.0),
                                      std::max(16.0, 4.0 * R), pn);
      BlowupReport rep = blowup_norm_check(sweep, R, prof);
      j["blowup"] = {{"R", rep.R},
                     {"epsilons", rep.epsilons},
                     {"ratio_L2", rep.ratio_L2},
                     {"ratio_H1", rep.ratio_H1},
                     {"pass", rep.pass},
                     {"improving", rep.improving}};
      std::cout << "blowup: " << (rep.pass ? "PASS" : "FAIL") << " ratio_L2 = "
                << rep.ratio_L2.back() << ", ratio_H1 = " << rep.ratio_H1.back() << "\n";
    } else if (check == "chi") {
      ProfileNumerics pn = cfg.sweep.numerics.profile;
      PsiSpec unit = PsiSpec::linear(1.0);
      ProfileSolution prof = solve_w0(sweep.config.patch, unit, pn.R_list.back(), pn);
      Eigen::VectorXd U = profile_U_values(prof);
      double m = compute_C(sweep.config.patch, unit, pn).m_extrapolated;
      double p = 3.0 + 2.0 * unit.gamma - 2.0;
      double chi1 = compute_chi(prof.tm.mesh, U, unit, 1.0);
      j["chi"] = {{"chi_1", chi1}, {"chi_1_predicted", unit.pi0 - 2.0 * m / p}};
      std::cout << "chi(1) = " << chi1 << " vs predicted " << unit.pi0 - 2.0 * m / p << "\n";
    } else if (check == "scaling") {
      ProfileNumerics pn = cfg.sweep.numerics.profile;
      pn.scaling_self_test = true;
      CoefficientReport rep = compute_C(sweep.config.patch, PsiSpec::linear(1.0), pn);
      j["scaling"] = {{"self_test_ratio", rep.scaling_self_test_ratio}};
      std::cout << "scaling self-test ratio = " << rep.scaling_self_test_ratio << "\n";
    } else {
      std::cerr << "unknown --check '" << check << "'\n";
      return kExitConfig;
    }
  }

  write_json(cfg.out_dir + "/sweep.json", j, cfg);
  write_sweep_csv(cfg.out_dir + "/sweep.csv", sweep);
  write_rate_plot_data(cfg.out_dir + "/rate_loglog.dat", sweep);
  std::cout << "sweep: slope = " << sweep.fit.slope << " (exponent " << sweep.rate_exponent
            << "), C_pred = " << sweep.C_pred << ", wrote " << cfg.out_dir << "/sweep.json\n";
  return kExitOk;
}

int cmd_report(const std::string& sweep_json, const std::string& out_dir) {
  std::ifstream is(sweep_json);
  if (!is) {
    std::cerr << "report: cannot open " << sweep_json << "\n";
    return kExitConfig;
  }
  nlohmann::json j = nlohmann::json::parse(is);
  fs::create_directories(out_dir);
  std::ofstream csv(out_dir + "/report.csv");
  csv.precision(17);
  csv << "epsilon,lambda_eps,lambda_dir,d,C_emp\n";
  for (const auto& rec : j["records"])
    csv << rec["epsilon"].get<double>() << "," << rec["lambda_eps"].get<double>() << ","
        << rec["lambda_dir"].get<double>() << "," << rec["d"].get<double>() << ","
        << rec["C_emp"].get<double>() << "\n";
  std::cout << "report: slope " << j["fit"]["slope"].get<double>() << ", C_pred "
            << j["C_pred"].get<double>() << "; table written to " << out_dir
            << "/report.csv\n";
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"patchlab: Laplacian eigenvalue asymptotics for a shrinking Neumann patch"};
  app.require_subcommand(1);

  std::string config_path, mesh_out = "mesh.txt", out_dir;
  std::string mesh_path, field_path, sweep_json;
  double lambda = std::nan("");
  std::vector<double> radii;
  std::vector<std::string> checks;
  int jobs = 0;

  auto add_common = [&](CLI::App* sub, bool need_config) {
    auto* opt = sub->add_option("--config", config_path, "JSON run configuration");
    if (need_config) opt->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--jobs", jobs, "worker cap (assembly threads)");
  };

  auto* s_mesh = app.add_subcommand("mesh", "generate and tag a mesh");
  add_common(s_mesh, true);
  s_mesh->add_option("--mesh-out", mesh_out, "mesh output path");

  auto* s_eig = app.add_subcommand("eig", "solve the eigenproblem");
  add_common(s_eig, true);

  auto* s_profile = app.add_subcommand("profile", "half-space coefficient run");
  add_common(s_profile, true);

  auto* s_freq = app.add_subcommand("frequency", "frequency diagnostics of a field");
  add_common(s_freq, true);
  s_freq->add_option("--mesh", mesh_path, "mesh file")->required();
  s_freq->add_option("--field", field_path, "field file")->required();
  s_freq->add_option("--lambda", lambda, "eigenvalue of the field")->required();
  s_freq->add_option("--radii", radii, "radii for the series");

  auto* s_sweep = app.add_subcommand("sweep", "epsilon sweep");
  add_common(s_sweep, true);
  s_sweep->add_option("--check", checks, "extra checks: sandwich|blowup|chi|scaling");

  auto* s_report = app.add_subcommand("report", "summarize a sweep JSON");
  s_report->add_option("--sweep", sweep_json, "sweep.json path")->required();
  s_report->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (s_report->parsed()) return cmd_report(sweep_json, out_dir.empty() ? "." : out_dir);

    RunConfig cfg = RunConfig::from_file(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;

    if (s_mesh->parsed()) return cmd_mesh(cfg, mesh_out);
    if (s_eig->parsed()) return cmd_eig(cfg);
    if (s_profile->parsed()) return cmd_profile(cfg);
    if (s_freq->parsed()) return cmd_frequency(cfg, mesh_path, field_path, lambda, radii);
    if (s_sweep->parsed()) return cmd_sweep(cfg, checks);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
