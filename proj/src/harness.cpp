#include "patchlab/harness.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "patchlab/quadrature.hpp"

namespace patchlab {

void SweepConfig::validate() const {
  if (epsilon_list.size() < 1) throw std::invalid_argument("sweep: empty epsilon list");
  for (std::size_t i = 0; i + 1 < epsilon_list.size(); ++i)
    if (!(epsilon_list[i] > epsilon_list[i + 1]))
      throw std::invalid_argument("sweep: epsilon_list must be strictly decreasing");
  for (double e : epsilon_list)
    if (!(e > 0.0)) throw std::invalid_argument("sweep: epsilon values must be positive");
  if (epsilon_list.front() * patch.diameter() >= domain_radius / 2.0)
    throw std::invalid_argument(
        "sweep: max epsilon * diam(V) must stay below half the domain radius");
  if (n0 < 1) throw std::invalid_argument("sweep: n0 must be >= 1");
  patch.validate();
}

RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& d) {
  if (eps.size() != d.size()) throw std::invalid_argument("fit_rate: length mismatch");
  if (eps.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 points");
  const int n = static_cast<int>(eps.size());
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    if (!(d[i] > 0.0)) throw std::invalid_argument("fit_rate: nonpositive gap d");
    x[i] = std::log(eps[i]);
    y[i] = std::log(d[i]);
  }
  double xm = 0.0, ym = 0.0;
  for (int i = 0; i < n; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= n;
  ym /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = ym - f.slope * xm;
  double ssr = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = y[i] - (f.intercept + f.slope * x[i]);
    ssr += r * r;
  }
  f.slope_stderr = n > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
  return f;
}

namespace {

// Size field for an epsilon-resolved half-ball mesh: plateau over the scaled
// patch, extra refinement at the scaled rim, linear growth outward.
Mesh build_sweep_mesh(const SweepConfig& cfg, double eps) {
  const auto& num = cfg.numerics;
  const double r_c = std::max(1e-12, eps * cfg.patch.circumradius());
  const double h_near = r_c / num.patch_resolution;
  const double h_rim = h_near / num.rim_refine;
  Mesh base = build_half_ball_mesh(cfg.domain_radius, num.h_far, 1.0, 3);
  auto size_field = [&](const Vec3& x) {
    double cap = std::min(num.h_far,
                          h_near + num.transition_growth * std::max(0.0, x.norm() - 1.3 * r_c));
    if (eps <= 0.0) return cap;
    double d_rim = cfg.patch.boundary_distance({x.x() / eps, x.y() / eps}) * eps;
    d_rim = std::sqrt(d_rim * d_rim + x.z() * x.z());
    double rim_term = h_rim + 2.0 * num.transition_growth * d_rim;
    return std::min(cap, rim_term);
  };
  return refine_to_size_field(base, size_field);
}

Mesh build_fit_mesh(const SweepConfig& cfg) {
  const auto& num = cfg.numerics;
  Mesh base = build_half_ball_mesh(cfg.domain_radius, num.h_far, 1.0, 3);
  auto size_field = [&](const Vec3& x) {
    return std::min(num.h_far,
                    num.fit_h + 0.12 * std::max(0.0, x.norm() - num.fit_plateau));
  };
  return refine_to_size_field(base, size_field);
}

} // namespace

SweepResult run_epsilon_sweep(const SweepConfig& config,
                              const std::function<void(const EpsilonRecord&)>& on_record) {
  config.validate();
  SweepResult result;
  result.config = config;
  const int n0 = config.n0;

  // Vanishing order and blow-up polynomial of the limit eigenfunction on a
  // dedicated origin-resolved mesh.
  {
    Mesh fit_mesh = build_fit_mesh(config);
    TaggedMesh tm = tag_all_dirichlet(fit_mesh);
    SpectrumResult dir = compute_dirichlet_eigs(tm, n0 + 1, config.numerics.eig);
    // simplicity gate for n0
    double lam = dir.pairs[n0 - 1].value;
    double gap = dir.pairs[n0].value - lam;
    if (n0 >= 2) gap = std::min(gap, lam - dir.pairs[n0 - 2].value);
    if (gap < 1e-3 * lam) {
      std::ostringstream os;
      os << "run_epsilon_sweep: discrete gap " << gap << " below 1e-3 * lambda_n0 (" << lam
         << "); simple-eigenvalue assumption violated";
      throw std::runtime_error(os.str());
    }
    result.lambda_limit = lam;
    auto est = estimate_vanishing_order(fit_mesh, dir.pairs[n0 - 1].field, lam,
                                        config.numerics.frequency_radii);
    result.gamma_hat_raw = est.gamma_hat;
    result.gamma = std::max(1, (int)std::lround(est.gamma_hat));
    result.psi = extract_psi(fit_mesh, dir.pairs[n0 - 1].field, result.gamma,
                             config.numerics.fit_radius);
    result.c = result.gamma == 1 ? result.psi.coefficients[0] : 0.0;
  }
  result.rate_exponent = 3.0 + 2.0 * result.gamma - 2.0;

  // Half-space coefficient for the unit blow-up datum.
  result.C_unit_patch = compute_C(config.patch, PsiSpec::linear(1.0),
                                  config.numerics.profile).C;
  if (result.gamma == 1) {
    result.C_pred = result.c * result.c * result.C_unit_patch;
  } else {
    result.C_pred = compute_C(config.patch, result.psi, config.numerics.profile).C;
  }

  // Per-epsilon records: the gap of the two eigenvalues on one shared mesh.
  for (double eps : config.epsilon_list) {
    EpsilonRecord rec;
    rec.epsilon = eps;
    Mesh mesh = build_sweep_mesh(config, eps);
    TaggedMesh mixed = tag_boundary(mesh, config.patch, eps);
    rec.resolved = mixed.count_tag(FacetTag::Neumann) >= 8;
    TaggedMesh dirich = tag_all_dirichlet(mesh);
    SpectrumResult dir = compute_dirichlet_eigs(dirich, n0, config.numerics.eig);
    SpectrumResult mix = compute_mixed_eigs(mixed, n0, &dir, config.numerics.eig);
    rec.lambda_dir = dir.pairs[n0 - 1].value;
    rec.lambda_eps = mix.pairs[n0 - 1].value;
    rec.d = rec.lambda_dir - rec.lambda_eps;
    rec.C_emp = rec.d / std::pow(eps, result.rate_exponent);
    rec.mesh_fingerprint = mesh.fingerprint();
    rec.tagged = std::make_shared<TaggedMesh>(std::move(mixed));
    rec.phi = std::make_shared<Eigen::VectorXd>(mix.pairs[n0 - 1].field);
    result.records.push_back(rec);
    if (on_record) on_record(rec);
  }

  // Rate fit over resolved records only.
  std::vector<double> eps_fit, d_fit;
  for (const auto& r : result.records)
    if (r.resolved && r.d > 0.0) {
      eps_fit.push_back(r.epsilon);
      d_fit.push_back(r.d);
    }
  if (eps_fit.size() >= 3) result.fit = fit_rate(eps_fit, d_fit);
  return result;
}

SandwichReport sandwich_check(const SweepResult& sweep, double C_ball_unit, double tol) {
  SandwichReport rep;
  rep.tol = tol;
  rep.r_V = sweep.config.patch.inradius();
  rep.R_V = sweep.config.patch.circumradius();
  if (!(rep.r_V > 0.0) || !(rep.R_V >= rep.r_V))
    throw std::runtime_error("sandwich_check: inscribed/circumscribed radii not computable");
  const double p = sweep.rate_exponent;
  const double C = sweep.c * sweep.c * C_ball_unit;
  rep.lower = C * std::pow(rep.r_V, p) * (1.0 - tol);
  rep.upper = C * std::pow(rep.R_V, p) * (1.0 + tol);
  rep.C_emp_min = sweep.records.back().C_emp;
  rep.pass = rep.lower <= rep.C_emp_min && rep.C_emp_min <= rep.upper;
  return rep;
}

BlowupReport blowup_norm_check(const SweepResult& sweep, double R,
                               const ProfileSolution& unit_profile) {
  if (sweep.records.size() < 2)
    throw std::invalid_argument("blowup_norm_check: need at least two epsilon records");
  if (unit_profile.R < 2.0 * R)
    throw std::invalid_argument("blowup_norm_check: profile truncation radius below 2R");
  BlowupReport rep;
  rep.R = R;
  const double c = sweep.c;
  Eigen::VectorXd U_unit = profile_U_values(unit_profile);
  const Mesh& pm = unit_profile.tm.mesh;
  double den_l2 = c * c * field_l2sq_in_ball(pm, U_unit, R);
  double den_h1 = c * c * field_h1semisq_in_ball(pm, U_unit, R);
  const int gamma = sweep.gamma;

  // two smallest epsilons, largest first so "improving" reads left to right
  std::vector<const EpsilonRecord*> recs = {&sweep.records[sweep.records.size() - 2],
                                            &sweep.records.back()};
  for (const auto* rec : recs) {
    double eps = rec->epsilon;
    const Mesh& m = rec->tagged->mesh;
    double r_ball = R * eps;
    double num_l2 = std::pow(eps, -(3.0 + 2.0 * gamma)) *
                    field_l2sq_in_ball(m, *rec->phi, r_ball);
    double num_h1 = std::pow(eps, -(3.0 + 2.0 * gamma - 2.0)) *
                    field_h1semisq_in_ball(m, *rec->phi, r_ball);
    rep.epsilons.push_back(eps);
    rep.ratio_L2.push_back(num_l2 / den_l2);
    rep.ratio_H1.push_back(num_h1 / den_h1);
  }
  auto dev = [](double x) { return std::abs(x - 1.0); };
  rep.pass = dev(rep.ratio_L2.back()) <= rep.tol && dev(rep.ratio_H1.back()) <= rep.tol;
  rep.improving = dev(rep.ratio_L2.back()) <= dev(rep.ratio_L2.front()) + 1e-12 &&
                  dev(rep.ratio_H1.back()) <= dev(rep.ratio_H1.front()) + 1e-12;
  return rep;
}

ConvergenceReport eigen_convergence_check(const SweepResult& sweep) {
  if (sweep.records.size() < 3)
    throw std::invalid_argument("eigen_convergence_check: need a sweep with >= 3 epsilons");
  ConvergenceReport rep;
  for (const auto& r : sweep.records)
    if (!(r.d > 0.0)) rep.d_positive = false;
  for (std::size_t i = 0; i + 1 < sweep.records.size(); ++i) {
    // epsilon decreases along records, so d must not increase
    if (sweep.records[i + 1].d > sweep.records[i].d * (1.0 + 1e-12)) {
      rep.d_monotone = false;
      std::ostringstream os;
      os << "d increased from eps=" << sweep.records[i].epsilon
         << " to eps=" << sweep.records[i + 1].epsilon
         << " (non-nested mesh family; WARN only)";
      rep.warnings.push_back(os.str());
    }
  }
  rep.d_small = sweep.records.back().d < 0.1 * sweep.records.back().lambda_dir;
  rep.pass = rep.d_positive && rep.d_small; // monotonicity failures stay warnings
  return rep;
}

} // namespace patchlab
