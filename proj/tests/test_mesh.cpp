#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "patchlab/mesh.hpp"

using namespace patchlab;

namespace {
const double kHalfBallVolume = 2.0 / 3.0 * M_PI;
}

TEST_CASE("half-ball mesh volume approaches (2/3) pi") {
  Mesh m = build_half_ball_mesh(1.0, 0.2, 1.0);
  m.validate();
  CHECK(std::abs(m.total_volume() - kHalfBallVolume) / kHalfBallVolume < 0.02);
}

TEST_CASE("half-ball mesh volume scales with the radius") {
  Mesh m = build_half_ball_mesh(2.0, 0.4, 1.0);
  CHECK(std::abs(m.total_volume() - kHalfBallVolume * 8.0) / (kHalfBallVolume * 8.0) < 0.02);
}

TEST_CASE("grading compresses cells near the origin") {
  Mesh m = build_half_ball_mesh(1.0, 0.2, 4.0);
  double hmin_near = 1e300, hmax = 0.0;
  for (int c = 0; c < m.n_cells(); ++c) {
    double d = m.cell_diameter(c);
    hmax = std::max(hmax, d);
    if (m.cell_barycenter(c).norm() < 0.1) hmin_near = std::min(hmin_near, d);
  }
  CHECK(hmin_near <= 0.06);
  CHECK(hmax >= 0.15);
}

TEST_CASE("volume error decays at second order") {
  double e1 = std::abs(build_half_ball_mesh(1.0, 0.3, 1.0).total_volume() - kHalfBallVolume);
  double e2 = std::abs(build_half_ball_mesh(1.0, 0.15, 1.0).total_volume() - kHalfBallVolume);
  CHECK(e1 / e2 >= 3.0);
}

TEST_CASE("builder rejects bad arguments") {
  CHECK_THROWS(build_half_ball_mesh(1.0, 1.5, 1.0)); // h_far >= radius
  CHECK_THROWS(build_half_ball_mesh(1.0, 0.2, 0.5)); // grading < 1
  CHECK_THROWS(build_half_ball_mesh(-1.0, 0.2, 1.0));
}

TEST_CASE("tagging: empty patch leaves no Neumann facets") {
  Mesh m = build_half_ball_mesh(1.0, 0.2, 1.0);
  TaggedMesh tm = tag_boundary(m, PatchSpec::disk(1.0), 0.0);
  CHECK(tm.count_tag(FacetTag::Neumann) == 0);
  CHECK(tm.count_tag(FacetTag::Dirichlet) == m.n_facets());
}

TEST_CASE("tagging: disk patch area matches eps^2 pi") {
  Mesh m = build_half_ball_mesh(1.0, 0.2, 6.0);
  double eps = 0.2;
  TaggedMesh tm = tag_boundary(m, PatchSpec::disk(1.0), eps);
  double area = tm.tagged_area(FacetTag::Neumann);
  CHECK(std::abs(area - M_PI * eps * eps) / (M_PI * eps * eps) < 0.05);
}

TEST_CASE("tagging: square patch area matches (2 eps)^2") {
  Mesh m = build_half_ball_mesh(1.0, 0.2, 8.0);
  double eps = 0.1;
  TaggedMesh tm = tag_boundary(m, PatchSpec::square(1.0), eps);
  double area = tm.tagged_area(FacetTag::Neumann);
  double exact = 4.0 * eps * eps;
  CHECK(std::abs(area - exact) / exact < 0.05);
}

TEST_CASE("tagging partitions the boundary exactly") {
  Mesh m = build_half_ball_mesh(1.0, 0.25, 4.0);
  TaggedMesh tm = tag_boundary(m, PatchSpec::disk(1.0), 0.3, true);
  CHECK(tm.count_tag(FacetTag::Dirichlet) + tm.count_tag(FacetTag::Neumann) +
            tm.count_tag(FacetTag::ArtificialOuter) ==
        m.n_facets());
  // every Neumann facet lies in the flat face with barycenter in eps V
  for (int f = 0; f < m.n_facets(); ++f) {
    if (tm.facet_tags[f] != FacetTag::Neumann) continue;
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(m.vertices[m.boundary_facets[f][i]].z()) <= 1e-12);
    CHECK(m.facet_barycenter(f).head<2>().norm() < 0.3);
  }
}

TEST_CASE("tagging is monotone in epsilon") {
  Mesh m = build_half_ball_mesh(1.0, 0.2, 6.0);
  TaggedMesh t1 = tag_boundary(m, PatchSpec::disk(1.0), 0.15);
  TaggedMesh t2 = tag_boundary(m, PatchSpec::disk(1.0), 0.3);
  for (int f = 0; f < m.n_facets(); ++f)
    if (t1.facet_tags[f] == FacetTag::Neumann) CHECK(t2.facet_tags[f] == FacetTag::Neumann);
}

TEST_CASE("tagging rejects an under-resolved patch") {
  Mesh m = build_half_ball_mesh(1.0, 0.25, 1.0);
  CHECK_THROWS_WITH_AS(tag_boundary(m, PatchSpec::disk(1.0), 0.05), doctest::Contains("under-resolved"),
                       std::runtime_error);
}

TEST_CASE("strict star-shapedness of model patches") {
  CHECK(check_strict_star_shaped(PatchSpec::disk(1.0)) == doctest::Approx(1.0));
  CHECK(check_strict_star_shaped(PatchSpec::disk(0.37)) == doctest::Approx(0.37));
  CHECK(check_strict_star_shaped(PatchSpec::square(1.0)) == doctest::Approx(1.0));
  // L-shaped polygon with a reentrant edge whose supporting line passes
  // through the origin: x . nu <= 0 on that edge
  auto lshape = PatchSpec::polygon({{-1.0, -1.0},
                                    {1.0, -1.0},
                                    {1.0, 0.0},
                                    {0.0, 0.0},
                                    {0.0, 1.0},
                                    {-1.0, 1.0}});
  CHECK(check_strict_star_shaped(lshape) <= 0.0);
}

TEST_CASE("patch validation catches bad geometry") {
  // origin outside
  CHECK_THROWS(PatchSpec::polygon({{1.0, 1.0}, {2.0, 1.0}, {2.0, 2.0}, {1.0, 2.0}}).validate());
  // self-intersecting bowtie
  CHECK_THROWS(
      PatchSpec::polygon({{-1.0, -1.0}, {1.0, 1.0}, {1.0, -1.0}, {-1.0, 1.0}}).validate());
}

TEST_CASE("refine_toward_origin: factor 1 is the identity") {
  Mesh m = build_half_ball_mesh(1.0, 0.25, 1.0);
  Mesh r = refine_toward_origin(m, 1.0);
  CHECK(r.fingerprint() == m.fingerprint());
}

TEST_CASE("refine_toward_origin adds cells and keeps the mesh watertight") {
  Mesh m = build_half_ball_mesh(1.0, 0.25, 1.0);
  Mesh r = refine_toward_origin(m, 2.0);
  CHECK(r.n_cells() > m.n_cells());
  r.validate();
  // total volume preserved up to the sphere-projection of split edges
  CHECK(std::abs(r.total_volume() - m.total_volume()) < 0.02);
}

TEST_CASE("two refinements halve the size near the origin") {
  Mesh m = build_half_ball_mesh(1.0, 0.25, 1.0);
  auto min_diam_near = [](const Mesh& mm) {
    double d = 1e300;
    for (int c = 0; c < mm.n_cells(); ++c)
      if (mm.cell_barycenter(c).norm() < 0.1) d = std::min(d, mm.cell_diameter(c));
    return d;
  };
  double before = min_diam_near(m);
  Mesh r = refine_toward_origin(refine_toward_origin(m, 2.0), 2.0);
  CHECK(min_diam_near(r) <= before / 2.0);
}

TEST_CASE("size-field refinement reaches the requested resolution") {
  Mesh m = build_half_ball_mesh(1.0, 0.25, 1.0);
  Mesh r = refine_to_size_field(m, [](const Vec3& x) { return x.norm() < 0.3 ? 0.05 : 1e300; });
  r.validate();
  for (int c = 0; c < r.n_cells(); ++c)
    if (r.cell_barycenter(c).norm() < 0.25) CHECK(r.cell_diameter(c) <= 0.05 * 1.0001);
}

TEST_CASE("mesh text format round-trips") {
  Mesh m = build_half_ball_mesh(1.0, 0.3, 2.0);
  TaggedMesh tm = tag_boundary(m, PatchSpec::disk(1.0), 0.4, true);
  write_mesh(tm, "roundtrip_mesh.txt");
  TaggedMesh back = read_mesh("roundtrip_mesh.txt");
  CHECK(back.mesh.n_vertices() == m.n_vertices());
  CHECK(back.mesh.n_cells() == m.n_cells());
  CHECK(back.count_tag(FacetTag::Neumann) == tm.count_tag(FacetTag::Neumann));
  CHECK(back.count_tag(FacetTag::ArtificialOuter) == tm.count_tag(FacetTag::ArtificialOuter));
  CHECK(back.mesh.total_volume() == doctest::Approx(m.total_volume()));
}

TEST_CASE("meshing is deterministic") {
  Mesh a = build_half_ball_mesh(1.0, 0.22, 3.0);
  Mesh b = build_half_ball_mesh(1.0, 0.22, 3.0);
  CHECK(a.fingerprint() == b.fingerprint());
}

TEST_CASE("2d half-disk mesh is sound") {
  Mesh m = build_half_ball_mesh(1.0, 0.1, 1.0, 2);
  m.validate();
  CHECK(std::abs(m.total_volume() - M_PI / 2.0) / (M_PI / 2.0) < 0.02);
}
