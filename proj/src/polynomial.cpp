#include "patchlab/polynomial.hpp"

#include <cmath>
#include <stdexcept>

namespace patchlab {

namespace {

// integral of x^a y^b z^c over the unit upper hemisphere of S^2;
// zero when a or b is odd, otherwise a Gamma-function product
double hemisphere_moment(int a, int b, int c) {
  if (a % 2 != 0 || b % 2 != 0) return 0.0;
  return std::tgamma((a + 1) / 2.0) * std::tgamma((b + 1) / 2.0) * std::tgamma((c + 1) / 2.0) /
         std::tgamma((a + b + c + 3) / 2.0);
}

} // namespace

Polynomial Polynomial::monomial(int a, int b, int c, double coef) {
  Polynomial p;
  if (coef != 0.0) p.terms_[{a, b, c}] = coef;
  return p;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  for (const auto& [e, c] : o.terms_) {
    r.terms_[e] += c;
    if (r.terms_[e] == 0.0) r.terms_.erase(e);
  }
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * (-1.0); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r;
  for (const auto& [e1, c1] : terms_)
    for (const auto& [e2, c2] : o.terms_) {
      std::array<int, 3> e = {e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]};
      r.terms_[e] += c1 * c2;
    }
  return r;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial r;
  if (s == 0.0) return r;
  for (const auto& [e, c] : terms_) r.terms_[e] = c * s;
  return r;
}

double Polynomial::eval(const Eigen::Vector3d& x) const {
  double v = 0.0;
  for (const auto& [e, c] : terms_)
    v += c * std::pow(x.x(), e[0]) * std::pow(x.y(), e[1]) * std::pow(x.z(), e[2]);
  return v;
}

Polynomial Polynomial::derivative(int axis) const {
  Polynomial r;
  for (const auto& [e, c] : terms_) {
    if (e[axis] == 0) continue;
    std::array<int, 3> d = e;
    d[axis] -= 1;
    r.terms_[d] += c * e[axis];
  }
  return r;
}

Polynomial Polynomial::laplacian() const {
  Polynomial r;
  for (int ax = 0; ax < 3; ++ax) r = r + derivative(ax).derivative(ax);
  return r;
}

bool Polynomial::is_zero(double tol) const {
  for (const auto& [e, c] : terms_)
    if (std::abs(c) > tol) return false;
  return true;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_)
    if (c != 0.0) d = std::max(d, e[0] + e[1] + e[2]);
  return d;
}

double Polynomial::integrate_hemisphere() const {
  double v = 0.0;
  for (const auto& [e, c] : terms_) v += c * hemisphere_moment(e[0], e[1], e[2]);
  return v;
}

double Polynomial::integrate_half_ball(double R) const {
  double v = 0.0;
  for (const auto& [e, c] : terms_) {
    int d = e[0] + e[1] + e[2];
    v += c * hemisphere_moment(e[0], e[1], e[2]) * std::pow(R, 3 + d) / (3 + d);
  }
  return v;
}

double Polynomial::dirichlet_energy_half_ball(double R) const {
  double v = 0.0;
  for (int ax = 0; ax < 3; ++ax) {
    Polynomial g = derivative(ax);
    v += (g * g).integrate_half_ball(R);
  }
  return v;
}

PsiSpec PsiSpec::linear(double c) {
  Eigen::VectorXd coef(1);
  coef << c;
  return from_coefficients(1, coef);
}

PsiSpec PsiSpec::zero() {
  PsiSpec s;
  s.gamma = 1;
  s.coefficients = Eigen::VectorXd::Zero(1);
  s.poly = Polynomial();
  s.pi0 = 0.0;
  return s;
}

std::vector<Polynomial> PsiSpec::odd_harmonic_basis(int gamma) {
  if (gamma == 1) return {Polynomial::monomial(0, 0, 1)};
  if (gamma == 2)
    return {Polynomial::monomial(1, 0, 1), Polynomial::monomial(0, 1, 1)};
  throw std::invalid_argument("odd_harmonic_basis: only gamma in {1,2} is supported");
}

PsiSpec PsiSpec::from_coefficients(int gamma, const Eigen::VectorXd& coeffs) {
  auto basis = odd_harmonic_basis(gamma);
  if ((int)basis.size() != coeffs.size())
    throw std::invalid_argument("PsiSpec: coefficient count does not match basis size");
  PsiSpec s;
  s.gamma = gamma;
  s.coefficients = coeffs;
  for (int i = 0; i < coeffs.size(); ++i) s.poly = s.poly + basis[i] * coeffs[i];
  s.pi0 = (s.poly * s.poly).integrate_hemisphere();
  return s;
}

void PsiSpec::validate() const {
  if (!poly.laplacian().is_zero(1e-12))
    throw std::runtime_error("PsiSpec: psi is not harmonic");
  for (const auto& [e, c] : poly.terms())
    if (e[2] == 0 && c != 0.0)
      throw std::runtime_error("PsiSpec: psi does not vanish on {x_N = 0}");
  if (!(pi0 > 0.0)) throw std::runtime_error("PsiSpec: pi0 must be positive");
}

} // namespace patchlab
