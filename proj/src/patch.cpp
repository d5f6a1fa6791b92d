#include "patchlab/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace patchlab {

namespace {

// crossing-number point-in-polygon
bool point_in_polygon(const Eigen::Vector2d& p, const std::vector<Eigen::Vector2d>& poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      double xint = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (p.x() < xint) inside = !inside;
    }
  }
  return inside;
}

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                              const Eigen::Vector2d& b) {
  Eigen::Vector2d ab = b - a;
  double t = ab.squaredNorm() > 0 ? (p - a).dot(ab) / ab.squaredNorm() : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

bool segments_intersect(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                        const Eigen::Vector2d& c, const Eigen::Vector2d& d) {
  auto cross = [](const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
    return u.x() * v.y() - u.y() * v.x();
  };
  double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

} // namespace

PatchSpec PatchSpec::disk(double radius) {
  if (radius <= 0.0) throw std::invalid_argument("PatchSpec::disk: radius must be positive");
  PatchSpec p;
  p.kind_ = Kind::Disk;
  p.disk_radius_ = radius;
  return p;
}

PatchSpec PatchSpec::polygon(std::vector<Eigen::Vector2d> vertices) {
  if (vertices.size() < 3) throw std::invalid_argument("PatchSpec::polygon: need >= 3 vertices");
  PatchSpec p;
  p.kind_ = Kind::Polygon;
  p.poly_ = std::move(vertices);
  return p;
}

PatchSpec PatchSpec::radial(std::vector<double> rho_samples) {
  if (rho_samples.size() < 8)
    throw std::invalid_argument("PatchSpec::radial: need >= 8 samples over S^1");
  for (double r : rho_samples)
    if (r <= 0.0) throw std::invalid_argument("PatchSpec::radial: radii must be positive");
  PatchSpec p;
  p.kind_ = Kind::Radial;
  p.rho_ = std::move(rho_samples);
  return p;
}

PatchSpec PatchSpec::square(double half_side) {
  return polygon({{-half_side, -half_side},
                  {half_side, -half_side},
                  {half_side, half_side},
                  {-half_side, half_side}});
}

std::vector<Eigen::Vector2d> PatchSpec::radial_as_polygon() const {
  std::vector<Eigen::Vector2d> out(rho_.size());
  for (std::size_t k = 0; k < rho_.size(); ++k) {
    double th = 2.0 * M_PI * k / rho_.size();
    out[k] = rho_[k] * Eigen::Vector2d(std::cos(th), std::sin(th));
  }
  return out;
}

bool PatchSpec::contains(const Eigen::Vector2d& x, double eps) const {
  if (eps <= 0.0) return false;
  Eigen::Vector2d y = x / eps;
  switch (kind_) {
    case Kind::Disk:
      return y.norm() < disk_radius_;
    case Kind::Polygon:
      return point_in_polygon(y, poly_);
    case Kind::Radial: {
      double th = std::atan2(y.y(), y.x());
      if (th < 0) th += 2.0 * M_PI;
      double s = th / (2.0 * M_PI) * rho_.size();
      std::size_t k = static_cast<std::size_t>(s) % rho_.size();
      double frac = s - std::floor(s);
      double r = (1.0 - frac) * rho_[k] + frac * rho_[(k + 1) % rho_.size()];
      return y.norm() < r;
    }
  }
  return false;
}

double PatchSpec::sigma_min() const {
  if (kind_ == Kind::Disk) return disk_radius_;
  const auto poly = (kind_ == Kind::Polygon) ? poly_ : radial_as_polygon();
  // x . nu is constant along each edge: the signed distance of the edge line
  // from the origin, with nu the outward normal of a counterclockwise polygon.
  double area2 = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    area2 += a.x() * b.y() - a.y() * b.x();
  }
  const double orient = area2 >= 0 ? 1.0 : -1.0;
  double smin = 1e300;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    Eigen::Vector2d t = b - a;
    if (t.norm() < 1e-15) continue;
    Eigen::Vector2d nu = orient * Eigen::Vector2d(t.y(), -t.x()).normalized();
    smin = std::min(smin, a.dot(nu));
  }
  return smin;
}

double PatchSpec::circumradius() const {
  if (kind_ == Kind::Disk) return disk_radius_;
  const auto poly = (kind_ == Kind::Polygon) ? poly_ : radial_as_polygon();
  double r = 0.0;
  for (const auto& v : poly) r = std::max(r, v.norm());
  return r;
}

double PatchSpec::inradius() const {
  if (kind_ == Kind::Disk) return disk_radius_;
  const auto poly = (kind_ == Kind::Polygon) ? poly_ : radial_as_polygon();
  const std::size_t n = poly.size();
  double r = 1e300;
  for (std::size_t i = 0; i < n; ++i)
    r = std::min(r, point_segment_distance({0.0, 0.0}, poly[i], poly[(i + 1) % n]));
  return r;
}

double PatchSpec::diameter() const {
  if (kind_ == Kind::Disk) return 2.0 * disk_radius_;
  const auto poly = (kind_ == Kind::Polygon) ? poly_ : radial_as_polygon();
  double d = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    for (std::size_t j = i + 1; j < poly.size(); ++j)
      d = std::max(d, (poly[i] - poly[j]).norm());
  return d;
}

double PatchSpec::boundary_distance(const Eigen::Vector2d& x) const {
  if (kind_ == Kind::Disk) return std::abs(x.norm() - disk_radius_);
  const auto poly = (kind_ == Kind::Polygon) ? poly_ : radial_as_polygon();
  double d = 1e300;
  for (std::size_t i = 0; i < poly.size(); ++i)
    d = std::min(d, point_segment_distance(x, poly[i], poly[(i + 1) % poly.size()]));
  return d;
}

PatchSpec PatchSpec::scaled(double s) const {
  if (s <= 0.0) throw std::invalid_argument("PatchSpec::scaled: factor must be positive");
  PatchSpec p = *this;
  if (kind_ == Kind::Disk) {
    p.disk_radius_ *= s;
  } else if (kind_ == Kind::Polygon) {
    for (auto& v : p.poly_) v *= s;
  } else {
    for (auto& r : p.rho_) r *= s;
  }
  return p;
}

void PatchSpec::validate() const {
  if (kind_ == Kind::Disk) return;
  const auto poly = (kind_ == Kind::Polygon) ? poly_ : radial_as_polygon();
  if (!point_in_polygon({0.0, 0.0}, poly))
    throw std::runtime_error("PatchSpec: 0 must lie in the interior of the patch");
  if (diameter() <= 0.0 || !std::isfinite(diameter()))
    throw std::runtime_error("PatchSpec: diameter must be finite and positive");
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue; // adjacent edges share a vertex
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
        throw std::runtime_error("PatchSpec: self-intersecting boundary");
    }
}

} // namespace patchlab
