// Trivariate polynomials in monomial form with exact integrals over the unit
// upper hemisphere and half-balls, and the blow-up data (gamma, psi, pi_0).
#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

namespace patchlab {

class Polynomial {
 public:
  Polynomial() = default;
  static Polynomial monomial(int a, int b, int c, double coef = 1.0);

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;

  double eval(const Eigen::Vector3d& x) const;
  Polynomial derivative(int axis) const;
  Polynomial laplacian() const;
  bool is_zero(double tol = 0.0) const;
  int degree() const;

  // exact integral over the upper unit hemisphere {|x| = 1, x3 > 0}
  double integrate_hemisphere() const;
  // exact integral over the half-ball {|x| < R, x3 > 0}; homogeneous terms
  // of degree d contribute R^(3+d)/(3+d) times their hemisphere integral
  double integrate_half_ball(double R) const;
  // exact Dirichlet energy of this polynomial over the half-ball of radius R
  double dirichlet_energy_half_ball(double R) const;

  const std::map<std::array<int, 3>, double>& terms() const { return terms_; }

 private:
  std::map<std::array<int, 3>, double> terms_; // exponents -> coefficient
};

// Blow-up polynomial psi of the limit eigenfunction at 0: homogeneous
// harmonic of degree gamma, vanishing on {x3 = 0} and odd across it.
struct PsiSpec {
  int gamma = 1;
  Eigen::VectorXd coefficients; // in the odd harmonic basis of odd_harmonic_basis()
  Polynomial poly;
  double pi0 = 0.0; // integral of Psi^2 over the unit upper hemisphere

  // psi = c * x3 (gamma = 1)
  static PsiSpec linear(double c);
  static PsiSpec from_coefficients(int gamma, const Eigen::VectorXd& coeffs);
  static PsiSpec zero(); // psi = 0; allowed as degenerate input data

  // basis of homogeneous harmonics of degree gamma vanishing on {x3 = 0}:
  // degree 1: {x3}; degree 2: {x1 x3, x2 x3}
  static std::vector<Polynomial> odd_harmonic_basis(int gamma);

  void validate() const; // harmonic, vanishing on the flat face, pi0 > 0
};

} // namespace patchlab
