#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <sstream>

#include "support.hpp"

using namespace lodwave;
using Catch::Approx;

TEST_CASE("L-shape initial mesh") {
  auto mesh = make_lshape_mesh();
  REQUIRE(mesh.n_triangles() == 12);
  REQUIRE(mesh.n_vertices() == 11);
  REQUIRE(is_conforming(mesh));
  REQUIRE(total_area(mesh) == Approx(3.0).margin(1e-14));

  for (int t = 0; t < mesh.n_triangles(); ++t) REQUIRE(triangle_area(mesh, t) > 0.0);

  int corner = -1;
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (norm(mesh.vertices[v]) < 1e-14) corner = v;
  REQUIRE(corner >= 0);
  REQUIRE(mesh.boundary_vertex[corner] == 1);

  auto s = mesh_stats(mesh);
  REQUIRE(s.n_triangles == 12);
  REQUIRE(s.n_interior_vertices == 3);
  REQUIRE(s.min_angle == Approx(M_PI / 4).margin(1e-12));
}

TEST_CASE("uniform refinement conformity and area") {
  auto mesh = make_lshape_mesh();
  auto [refined, ancestry] = uniform_refine(mesh);
  REQUIRE(is_conforming(refined));
  REQUIRE(refined.n_triangles() >= 24);
  REQUIRE(refined.n_triangles() <= 48);
  REQUIRE(total_area(refined) == Approx(3.0).margin(1e-12));
  REQUIRE(static_cast<int>(ancestry.size()) == refined.n_triangles());

  // h_max shrinks by a factor in [1/2, 1/sqrt(2)]
  double ratio = mesh_stats(refined).h_max / mesh_stats(mesh).h_max;
  REQUIRE(ratio >= 0.5 - 1e-12);
  REQUIRE(ratio <= 1.0 / std::sqrt(2.0) + 1e-12);

  // ancestry is area-consistent: children tile their ancestor
  std::vector<double> child_area(mesh.n_triangles(), 0.0);
  for (int t = 0; t < refined.n_triangles(); ++t) child_area[ancestry[t]] += triangle_area(refined, t);
  for (int t = 0; t < mesh.n_triangles(); ++t)
    REQUIRE(child_area[t] == Approx(triangle_area(mesh, t)).epsilon(1e-12));
}

TEST_CASE("bisecting a right isoceles triangle twice yields four similar copies") {
  auto mesh = testsupport::single_unit_right_triangle();
  auto once = uniform_refine(mesh).first;
  auto twice = uniform_refine(once).first;
  REQUIRE(twice.n_triangles() == 4);
  REQUIRE(total_area(twice) == Approx(0.5).margin(1e-14));
  for (int t = 0; t < 4; ++t) {
    REQUIRE(triangle_area(twice, t) == Approx(0.125).margin(1e-14));
    // each child is right isoceles: legs 1/2, hypotenuse sqrt(2)/2
    std::multiset<double> lens;
    for (int k = 0; k < 3; ++k)
      lens.insert(std::sqrt(detail::edge_sq_length(twice, twice.triangles[t], k)));
    auto it = lens.begin();
    REQUIRE(*it == Approx(0.5).margin(1e-14));
    REQUIRE(*std::next(it) == Approx(0.5).margin(1e-14));
    REQUIRE(*std::next(it, 2) == Approx(std::sqrt(0.5)).margin(1e-14));
  }
}

TEST_CASE("grading: alpha near 1 reduces to quasi-uniform refinement to size H") {
  auto mesh = make_lshape_mesh();
  double H = 0.25;
  auto graded = grade_toward_corner(mesh, {0, 0}, H, 1.0 - 1e-9);
  REQUIRE(is_conforming(graded));
  auto s = mesh_stats(graded);
  REQUIRE(s.h_max <= H * (1.0 + 1e-6));
  REQUIRE(s.h_min >= H / 8.0);
}

TEST_CASE("grading toward the corner, alpha = 2/3") {
  Triangulation base = make_lshape_mesh();
  for (int i = 0; i < 6; ++i) base = uniform_refine(base).first;  // H = 2^-3
  double H = mesh_stats(base).h_max;
  REQUIRE(H == Approx(0.125).margin(1e-14));

  auto graded = grade_toward_corner(base, {0, 0}, H, 2.0 / 3.0);
  REQUIRE(is_conforming(graded));
  auto s = mesh_stats(graded);
  REQUIRE(s.h_min / s.h_max < 0.25);
  // triangle count within 4x of the uniform-H mesh
  REQUIRE(s.n_triangles <= 4 * base.n_triangles());
  REQUIRE(s.n_triangles > base.n_triangles());

  SECTION("idempotent at fixed (H, alpha)") {
    auto again = grade_toward_corner(graded, {0, 0}, H, 2.0 / 3.0);
    REQUIRE(again.n_triangles() == graded.n_triangles());
  }
}

TEST_CASE("grading rejects bad arguments") {
  auto mesh = make_lshape_mesh();
  REQUIRE_THROWS_AS(grade_toward_corner(mesh, {0.123, 0.456}, 0.25, 0.5), std::invalid_argument);
  REQUIRE_THROWS_AS(grade_toward_corner(mesh, {0, 0}, 0.25, 1.5), std::invalid_argument);
  // generation cap guards non-termination
  REQUIRE_THROWS_AS(grade_toward_corner(mesh, {0, 0}, 1e-9, 0.5, 3), std::runtime_error);
}

TEST_CASE("element patches") {
  auto mesh = make_lshape_mesh();
  auto p0 = element_patch(mesh, 5, 0);
  REQUIRE(p0 == std::vector<int>{5});

  // nested and eventually covering, against an independent BFS oracle
  std::vector<int> prev = p0;
  for (int m = 1; m <= 4; ++m) {
    auto pm = element_patch(mesh, 5, m);
    REQUIRE(std::includes(pm.begin(), pm.end(), prev.begin(), prev.end()));
    prev = pm;
  }
  REQUIRE(static_cast<int>(element_patch(mesh, 5, 12).size()) == 12);

  // oracle: one-hop neighbourhood recomputed directly
  auto one = element_patch(mesh, 0, 1);
  std::set<int> expect;
  for (int t = 0; t < mesh.n_triangles(); ++t)
    for (int v : mesh.triangles[t])
      for (int u : mesh.triangles[0])
        if (u == v) expect.insert(t);
  REQUIRE(one == std::vector<int>(expect.begin(), expect.end()));
}

TEST_CASE("mesh stats on the square pair") {
  auto mesh = testsupport::unit_square_pair();
  auto s = mesh_stats(mesh);
  REQUIRE(s.h_max == Approx(std::sqrt(2.0)).margin(1e-14));
  REQUIRE(s.n_triangles == 2);
  REQUIRE(s.n_interior_vertices == 0);
}

TEST_CASE("conformity audit catches defects") {
  auto mesh = make_lshape_mesh();
  SECTION("flipped orientation") {
    std::swap(mesh.triangles[0][0], mesh.triangles[0][1]);
    REQUIRE_FALSE(is_conforming(mesh));
  }
  SECTION("wrong boundary flag") {
    mesh.boundary_vertex[8] = 1;
    REQUIRE_FALSE(is_conforming(mesh));
  }
  SECTION("dangling triangle duplicating an edge") {
    mesh.triangles.push_back({0, 1, 5});
    mesh.refinement_edge.push_back(0);
    REQUIRE_FALSE(is_conforming(mesh));
  }
}

TEST_CASE("hierarchy transfer data") {
  Triangulation coarse = make_lshape_mesh();
  coarse = uniform_refine(coarse).first;
  auto [fine, anc] = grade_toward_corner_with_ancestry(coarse, {0, 0}, mesh_stats(coarse).h_max, 0.5);
  auto h = make_hierarchy(coarse, fine, anc);

  for (int v = 0; v < h.coarse.n_vertices(); ++v) {
    REQUIRE(h.coarse_vertex_in_fine[v] == v);
    REQUIRE(norm(h.fine.vertices[v] - h.coarse.vertices[v]) < 1e-14);
  }
  for (int v = 0; v < h.fine.n_vertices(); ++v) {
    const auto& ref = h.fine_vertex_in_coarse[v];
    REQUIRE(ref.coarse_tri >= 0);
    double sum = 0.0;
    for (double l : ref.bary) {
      REQUIRE(l >= -1e-12);
      REQUIRE(l <= 1.0 + 1e-12);
      sum += l;
    }
    REQUIRE(sum == Approx(1.0).margin(1e-12));
    // the barycentric data reproduces the vertex position
    const auto& tri = h.coarse.triangles[ref.coarse_tri];
    Vec2 x = ref.bary[0] * h.coarse.vertices[tri[0]] + ref.bary[1] * h.coarse.vertices[tri[1]] +
             ref.bary[2] * h.coarse.vertices[tri[2]];
    REQUIRE(norm(x - h.fine.vertices[v]) < 1e-12);
  }
}

TEST_CASE("refine_at_vertex deepens locally") {
  auto mesh = make_lshape_mesh();
  for (int i = 0; i < 2; ++i) mesh = uniform_refine(mesh).first;
  int corner = -1;
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (norm(mesh.vertices[v]) < 1e-12) corner = v;
  auto [fine, anc] = refine_at_vertex(mesh, corner, 6);
  REQUIRE(is_conforming(fine));
  REQUIRE(mesh_stats(fine).h_min <= mesh_stats(mesh).h_min / 8.0 + 1e-12);
  // refinement stays local: triangle count grows mildly
  REQUIRE(fine.n_triangles() < 3 * mesh.n_triangles());
}

TEST_CASE("text format round trip") {
  std::mt19937 rng(7);
  Triangulation mesh = make_lshape_mesh();
  for (int i = 0; i < 3; ++i) mesh = uniform_refine(mesh).first;
  std::stringstream ss;
  write_mesh_text(ss, mesh);
  auto back = read_mesh_text(ss);
  REQUIRE(back.n_vertices() == mesh.n_vertices());
  REQUIRE(back.n_triangles() == mesh.n_triangles());
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    REQUIRE(back.vertices[v].x == mesh.vertices[v].x);
    REQUIRE(back.vertices[v].y == mesh.vertices[v].y);
    REQUIRE(back.boundary_vertex[v] == mesh.boundary_vertex[v]);
  }
  REQUIRE(back.triangles == mesh.triangles);
}

TEST_CASE("conformity and area preserved under randomized refinement sequences") {
  std::mt19937 rng(2024);
  for (int rep = 0; rep < 5; ++rep) {
    Triangulation mesh = make_lshape_mesh();
    std::uniform_int_distribution<int> coin(0, 2);
    for (int step = 0; step < 4; ++step) {
      int action = coin(rng);
      if (action == 0) {
        mesh = uniform_refine(mesh).first;
      } else if (action == 1) {
        mesh = grade_toward_corner(mesh, {0, 0}, std::max(0.25, mesh_stats(mesh).h_max / 2), 0.5);
      } else {
        std::uniform_int_distribution<int> pick(0, mesh.n_vertices() - 1);
        mesh = refine_at_vertex(mesh, pick(rng), 1).first;
      }
      REQUIRE(is_conforming(mesh));
      REQUIRE(total_area(mesh) == Approx(3.0).margin(1e-12));
    }
  }
}
