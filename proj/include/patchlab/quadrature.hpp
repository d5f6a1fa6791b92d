// Fixed quadrature rules: upper-hemisphere product rule (Gauss in the polar
// cosine, uniform in azimuth), triangle midpoint rule, and ball-clipped
// volume integration by sub-simplex subdivision.
#pragma once

#include <functional>

#include "patchlab/interpolate.hpp"
#include "patchlab/mesh.hpp"

namespace patchlab {

struct SphereRule {
  std::vector<Vec3> nodes;    // directions on the unit upper hemisphere
  std::vector<double> weights; // sum to 2*pi
};

// Product rule exact for spherical polynomials well beyond degree 4.
const SphereRule& hemisphere_rule();

// Integral over the sphere {|x| = r, x3 > 0} of f(x); f evaluated at r*theta.
double integrate_hemisphere(double r, const std::function<double(const Vec3&)>& f);

// Integral of f over {|x| < r, x3 > 0} intersected with the mesh; integrand
// evaluated per quadrature point with the containing cell id. Cells cut by
// the sphere are subdivided `levels` times and integrated against the ball
// indicator with a 4-point rule per sub-simplex (3D only).
double integrate_ball_clipped(const Mesh& mesh, double r,
                              const std::function<double(const Vec3&, int)>& f,
                              int levels = 2);

// L2 and H1(seminorm) integrals of a P1 field over the clipped half-ball.
double field_l2sq_in_ball(const Mesh& mesh, const Eigen::VectorXd& values, double r);
double field_h1semisq_in_ball(const Mesh& mesh, const Eigen::VectorXd& values, double r);

// 3-point (edge midpoint) rule on a boundary facet; exact for quadratics.
double integrate_facet(const Mesh& mesh, int facet,
                       const std::function<double(const Vec3&)>& f);

} // namespace patchlab
