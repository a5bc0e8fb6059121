#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "support.hpp"

using namespace lodwave;
using Catch::Approx;

namespace {

MeshHierarchy graded_hierarchy(int coarse_levels, double alpha = 0.5) {
  Triangulation coarse = make_lshape_mesh();
  for (int i = 0; i < coarse_levels; ++i) coarse = uniform_refine(coarse).first;
  auto [fine, anc] =
      grade_toward_corner_with_ancestry(coarse, {0, 0}, mesh_stats(coarse).h_max, alpha);
  return make_hierarchy(std::move(coarse), std::move(fine), std::move(anc));
}

std::vector<double> kernel_column(const KernelBasis& kb, int k, int n_fine) {
  std::vector<double> e(kb.B.n_cols, 0.0);
  e[k] = 1.0;
  auto w = kb.B * e;
  w.resize(n_fine);
  return w;
}

}  // namespace

TEST_CASE("identity hierarchy: no correctors") {
  Triangulation mesh = uniform_refine(make_lshape_mesh()).first;
  auto h = identity_hierarchy(mesh);
  auto A = assemble_stiffness(mesh);
  auto M = assemble_mass(mesh);
  auto kb = kernel_basis(h);
  REQUIRE(kb.B.n_cols == 0);

  DofMap dofs(mesh);
  std::mt19937 rng(1);
  std::vector<double> c(mesh.n_vertices(), 0.0);
  for (int v : dofs.interior) c[v] = std::uniform_real_distribution<double>(-1, 1)(rng);
  auto corr = global_corrector(h, A, kb, c);
  for (double v : corr) REQUIRE(v == 0.0);

  auto rb = build_reduced_basis(h, A, kb, 2);
  REQUIRE(rb.R.n_cols == dofs.n_dofs());
  // identity embedding of the coarse hats
  auto dense = rb.R.to_dense();
  for (int col = 0; col < rb.R.n_cols; ++col)
    for (int v = 0; v < mesh.n_vertices(); ++v)
      REQUIRE(dense[v][col] == Approx(v == rb.coarse_dofs[col] ? 1.0 : 0.0).margin(1e-14));

  auto [Ar, Mr] = reduced_matrices(rb, A, M);
  auto A_int = dofs.restrict_matrix(A);
  REQUIRE(Ar.nnz() == A_int.nnz());
  auto d1 = Ar.to_dense(), d2 = A_int.to_dense();
  for (int i = 0; i < Ar.n_rows; ++i)
    for (int j = 0; j < Ar.n_cols; ++j) REQUIRE(d1[i][j] == Approx(d2[i][j]).margin(1e-14));

  auto rep = nnz_report(rb, Ar, Mr, dofs.restrict_matrix(M).nnz());
  REQUIRE(rep.fill_ratio == Approx(1.0).margin(1e-14));
}

TEST_CASE("global corrector") {
  auto h = graded_hierarchy(2);
  auto A = assemble_stiffness(h.fine);
  auto kb = kernel_basis(h);
  DofMap dc(h.coarse), df(h.fine);
  std::mt19937 rng(2);

  std::vector<double> vH(h.coarse.n_vertices(), 0.0);
  for (int v : dc.interior) vH[v] = std::uniform_real_distribution<double>(-1, 1)(rng);
  auto corr = global_corrector(h, A, kb, vH, 1e-12);

  SECTION("defining equation holds against random kernel vectors") {
    auto resid = prolongate(h, vH);
    axpy(-1.0, corr, resid);
    auto Ares = A * resid;
    double energy = std::sqrt(dot(prolongate(h, vH), A * prolongate(h, vH)));
    std::uniform_int_distribution<int> pick(0, kb.B.n_cols - 1);
    for (int rep = 0; rep < 20; ++rep) {
      auto w = kernel_column(kb, pick(rng), h.fine.n_vertices());
      REQUIRE(std::abs(dot(w, Ares)) < 1e-9 * energy);
    }
  }

  SECTION("matches the dense saddle-point oracle") {
    REQUIRE(df.n_dofs() + dc.n_dofs() < 600);  // desk-size double check
    auto A_int = df.restrict_matrix(A);
    auto IH = quasi_interpolation_matrix(h);
    auto IH_int = IH.restricted(dc.interior, df.interior);
    int n = df.n_dofs(), nc = dc.n_dofs();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + nc, n + nc);
    K.topLeftCorner(n, n) = testsupport::to_eigen(A_int);
    K.block(n, 0, nc, n) = testsupport::to_eigen(IH_int);
    K.block(0, n, n, nc) = testsupport::to_eigen(IH_int).transpose();
    Eigen::VectorXd rhs(n + nc);
    rhs.setZero();
    auto APv = A * prolongate(h, vH);
    for (int i = 0; i < n; ++i) rhs(i) = APv[df.interior[i]];
    Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
    for (int i = 0; i < n; ++i)
      REQUIRE(corr[df.interior[i]] == Approx(sol(i)).margin(1e-8));
  }
}

TEST_CASE("element correctors") {
  auto h = graded_hierarchy(2);
  auto A = assemble_stiffness(h.fine);
  auto kb = kernel_basis(h);
  DofMap dc(h.coarse);

  SECTION("unrefined patch gives zero") {
    // pick a coarse triangle far from the corner whose 2-patch is unrefined
    std::vector<int> refined(h.coarse.n_triangles(), 0);
    for (int t = 0; t < h.fine.n_triangles(); ++t) ++refined[h.fine_tri_ancestor[t]];
    int far_t = -1, far_z = -1;
    for (int t = 0; t < h.coarse.n_triangles() && far_t < 0; ++t) {
      bool clean = true;
      for (int s : element_patch(h.coarse, t, 2)) clean &= refined[s] == 1;
      if (!clean) continue;
      for (int v : h.coarse.triangles[t])
        if (!h.coarse.boundary_vertex[v]) {
          far_t = t;
          far_z = v;
        }
    }
    if (far_t >= 0) {
      auto ec = element_corrector(h, A, kb, far_t, far_z, 2);
      for (double v : ec) REQUIRE(v == 0.0);
    }
  }

  SECTION("support is contained in the patch") {
    int z = dc.interior[0];
    int t = -1;
    for (int s = 0; s < h.coarse.n_triangles() && t < 0; ++s)
      for (int v : h.coarse.triangles[s])
        if (v == z) t = s;
    auto ec = element_corrector(h, A, kb, t, z, 2);
    std::set<int> patch_set;
    for (int s : element_patch(h.coarse, t, 2)) patch_set.insert(s);
    for (int ft = 0; ft < h.fine.n_triangles(); ++ft) {
      const auto& tri = h.fine.triangles[ft];
      bool touched = ec[tri[0]] != 0.0 || ec[tri[1]] != 0.0 || ec[tri[2]] != 0.0;
      if (touched) REQUIRE(patch_set.count(h.fine_tri_ancestor[ft]) == 1);
    }
  }

  SECTION("full-coverage element correctors sum to the global corrector") {
    int z = dc.interior[dc.n_dofs() / 3];
    std::vector<double> hat(h.coarse.n_vertices(), 0.0);
    hat[z] = 1.0;
    auto global = global_corrector(h, A, kb, hat, 1e-12);
    std::vector<double> sum(h.fine.n_vertices(), 0.0);
    for (int t = 0; t < h.coarse.n_triangles(); ++t) {
      bool has_z = false;
      for (int v : h.coarse.triangles[t]) has_z |= v == z;
      if (!has_z) continue;
      auto ec = element_corrector(h, A, kb, t, z, m_global, 1e-12);
      axpy(1.0, ec, sum);
    }
    double scale = std::sqrt(dot(global, A * global));
    for (int v = 0; v < h.fine.n_vertices(); ++v)
      REQUIRE(sum[v] == Approx(global[v]).margin(1e-8 * std::max(1.0, scale)));
  }

  SECTION("invalid vertex is rejected") {
    int t = 0;
    int z = -1;
    for (int v = 0; v < h.coarse.n_vertices(); ++v) {
      bool in_t = false;
      for (int u : h.coarse.triangles[t]) in_t |= u == v;
      if (!in_t) z = v;
    }
    REQUIRE_THROWS_AS(element_corrector(h, A, kb, t, z, 2), std::invalid_argument);
  }
}

TEST_CASE("reduced basis structure") {
  auto h = graded_hierarchy(2);
  auto A = assemble_stiffness(h.fine);
  auto M = assemble_mass(h.fine);
  auto kb = kernel_basis(h);
  auto IH = quasi_interpolation_matrix(h);
  DofMap dc(h.coarse);
  auto rb = build_reduced_basis(h, A, kb, 2);

  SECTION("quasi-interpolation of every column is the corresponding hat") {
    for (int col = 0; col < rb.R.n_cols; ++col) {
      std::vector<double> e(rb.R.n_cols, 0.0);
      e[col] = 1.0;
      auto back = IH * (rb.R * e);
      for (int v : dc.interior)
        REQUIRE(back[v] == Approx(v == rb.coarse_dofs[col] ? 1.0 : 0.0).margin(1e-10));
    }
  }

  SECTION("columns with untouched two-layer patches stay plain hats") {
    // corner-localized refinement leaves most of the mesh untouched
    Triangulation coarse = make_lshape_mesh();
    for (int i = 0; i < 3; ++i) coarse = uniform_refine(coarse).first;
    int corner = -1;
    for (int v = 0; v < coarse.n_vertices(); ++v)
      if (norm(coarse.vertices[v]) < 1e-12) corner = v;
    auto [fine, anc] = refine_at_vertex(coarse, corner, 2);
    auto hl = make_hierarchy(coarse, fine, anc);
    auto Al = assemble_stiffness(hl.fine);
    auto rbl = build_reduced_basis(hl, Al, kernel_basis(hl), 2);
    auto P = prolongation_matrix(hl);
    DofMap dcl(hl.coarse);

    std::vector<int> refined(hl.coarse.n_triangles(), 0);
    for (int t = 0; t < hl.fine.n_triangles(); ++t) ++refined[hl.fine_tri_ancestor[t]];
    std::vector<std::vector<int>> tris_of_vertex(hl.coarse.n_vertices());
    for (int t = 0; t < hl.coarse.n_triangles(); ++t)
      for (int v : hl.coarse.triangles[t]) tris_of_vertex[v].push_back(t);

    int checked = 0;
    for (int col = 0; col < rbl.R.n_cols; ++col) {
      int z = rbl.coarse_dofs[col];
      bool untouched = true;
      for (int t : tris_of_vertex[z])
        for (int s : element_patch(hl.coarse, t, 2)) untouched &= refined[s] == 1;
      if (!untouched) continue;
      ++checked;
      std::vector<double> e(rbl.R.n_cols, 0.0), hat(hl.coarse.n_vertices(), 0.0);
      e[col] = 1.0;
      hat[z] = 1.0;
      auto column = rbl.R * e;
      auto plain = P * hat;
      for (int v = 0; v < hl.fine.n_vertices(); ++v)
        REQUIRE(column[v] == Approx(plain[v]).margin(1e-12));
    }
    REQUIRE(checked > 0);
  }

  SECTION("localization error decays geometrically") {
    int z = -1;
    double best = 1e300;
    for (int v : dc.interior)
      if (norm(h.coarse.vertices[v]) < best) {
        best = norm(h.coarse.vertices[v]);
        z = v;
      }
    std::vector<double> hat(h.coarse.n_vertices(), 0.0);
    hat[z] = 1.0;
    auto global = global_corrector(h, A, kb, hat, 1e-12);
    std::vector<int> tris_at_z;
    for (int t = 0; t < h.coarse.n_triangles(); ++t)
      for (int v : h.coarse.triangles[t])
        if (v == z) tris_at_z.push_back(t);
    double prev = -1.0;
    for (int m = 1; m <= 4; ++m) {
      std::vector<double> cm(h.fine.n_vertices(), 0.0);
      for (int t : tris_at_z) axpy(1.0, element_corrector(h, A, kb, t, z, m, 1e-12), cm);
      auto diff = global;
      axpy(-1.0, cm, diff);
      double err = std::sqrt(dot(diff, A * diff));
      if (prev >= 0.0 && prev > 1e-11) REQUIRE(err < 0.9 * prev);
      prev = err;
    }
  }

  SECTION("reduced matrices: symmetry and mass positivity") {
    auto [Ar, Mr] = reduced_matrices(rb, A, M);
    auto At = Ar.transpose();
    double asym = 0.0;
    for (std::size_t k = 0; k < Ar.vals.size(); ++k)
      asym = std::max(asym, std::abs(Ar.vals[k] - At.vals[k]));
    REQUIRE(asym < 1e-12 * Ar.max_abs());

    auto eigM = testsupport::eigen_generalized_eigenvalues(Mr, SparseMatrix::identity(Mr.n_rows));
    REQUIRE(eigM.front() > 0.0);
    auto eigA = testsupport::eigen_generalized_eigenvalues(Ar, SparseMatrix::identity(Ar.n_rows));
    REQUIRE(eigA.front() > 0.0);
  }

  SECTION("nnz growth with m stays within the patch-size bound") {
    auto rb1 = build_reduced_basis(h, A, kb, 1);
    auto [A1, M1] = reduced_matrices(rb1, A, M);
    auto rb2 = build_reduced_basis(h, A, kb, 2);
    auto [A2, M2] = reduced_matrices(rb2, A, M);
    auto Mc = dc.restrict_matrix(assemble_mass(h.coarse));
    auto r1 = nnz_report(rb1, A1, M1, Mc.nnz());
    auto r2 = nnz_report(rb2, A2, M2, Mc.nnz());
    REQUIRE(r2.nnz_M >= r1.nnz_M);
    REQUIRE(r1.nnz_M >= Mc.nnz());
    for (auto [m, rep] : {std::pair{1, r1}, std::pair{2, r2}})
      REQUIRE(rep.nnz_M <= (2 * m + 3) * (2 * m + 3) * Mc.nnz());
  }
}

TEST_CASE("reduced space quality (untruncated correctors)") {
  auto h = graded_hierarchy(2);
  auto A = assemble_stiffness(h.fine);
  auto M = assemble_mass(h.fine);
  auto kb = kernel_basis(h);
  DofMap dc(h.coarse), df(h.fine);
  auto rb = build_reduced_basis(h, A, kb, m_global, 1e-12);
  std::mt19937 rng(9);

  SECTION("columns are energy-orthogonal to the kernel") {
    SparseMatrix Rt = rb.R.transpose();
    std::uniform_int_distribution<int> pick_col(0, rb.R.n_cols - 1), pick_w(0, kb.B.n_cols - 1);
    for (int rep = 0; rep < 30; ++rep) {
      std::vector<double> e(rb.R.n_cols, 0.0);
      e[pick_col(rng)] = 1.0;
      auto r = rb.R * e;
      auto w = kernel_column(kb, pick_w(rng), h.fine.n_vertices());
      REQUIRE(std::abs(dot(w, A * r)) < 1e-9);
    }
  }

  SECTION("corrector removes energy") {
    std::vector<int> all(h.fine.n_vertices());
    for (int i = 0; i < h.fine.n_vertices(); ++i) all[i] = i;
    auto Rc = prolongation_matrix(h).restricted(all, dc.interior);
    auto A_red = triple_product(rb.R, A);
    auto A_coarse = triple_product(Rc, A);
    for (int rep = 0; rep < 20; ++rep) {
      auto v = testsupport::random_vector(dc.n_dofs(), rng);
      REQUIRE(dot(v, A_red * v) <= dot(v, A_coarse * v) + 1e-10);
    }
  }

  SECTION("mass matrices are spectrally equivalent") {
    std::vector<int> all(h.fine.n_vertices());
    for (int i = 0; i < h.fine.n_vertices(); ++i) all[i] = i;
    auto Rc = prolongation_matrix(h).restricted(all, dc.interior);
    auto M_red = triple_product(rb.R, M);
    auto M_coarse = triple_product(Rc, M);
    for (int rep = 0; rep < 100; ++rep) {
      auto v = testsupport::random_vector(dc.n_dofs(), rng);
      double ratio = dot(v, M_red * v) / dot(v, M_coarse * v);
      REQUIRE(ratio >= 0.1);
      REQUIRE(ratio <= 10.0);
    }
  }
}

TEST_CASE("improved inverse inequality on graded hierarchies") {
  for (int lvl : {2, 3}) {
    auto h = graded_hierarchy(lvl + 2);  // deeper grading, h_min well below H
    auto A = assemble_stiffness(h.fine);
    auto M = assemble_mass(h.fine);
    DofMap dc(h.coarse), df(h.fine);
    auto ops = build_space_operators(h, A, M, SpaceTag::reduced, 2);
    double lam_red = max_generalized_eig(ops.A, ops.M, 1e-8);
    double lam_coarse = max_generalized_eig(dc.restrict_matrix(assemble_stiffness(h.coarse)),
                                            dc.restrict_matrix(assemble_mass(h.coarse)), 1e-8);
    double lam_fine = max_generalized_eig(df.restrict_matrix(A), df.restrict_matrix(M), 1e-8);
    REQUIRE(lam_red <= 4.0 * lam_coarse);
    REQUIRE(lam_fine >= 5.0 * lam_red);
  }
}

TEST_CASE("approximation transfer for the stationary singular solution") {
  auto h = graded_hierarchy(3);
  auto A = assemble_stiffness(h.fine);
  auto M = assemble_mass(h.fine);
  DofMap df(h.fine);

  auto stationary_error = [&](const SparseMatrix& R, const SparseMatrix& lift_basis,
                              const std::vector<int>& lift_vertices) {
    std::vector<double> gb(lift_vertices.size());
    for (std::size_t j = 0; j < lift_vertices.size(); ++j)
      gb[j] = singular_mode(h.fine.vertices[lift_vertices[j]]);
    auto L = lift_basis * gb;
    auto rhs = R.multiply_transpose(A * L);
    for (double& v : rhs) v = -v;
    auto [U, rep] = cg(triple_product(R, A), rhs, 1e-12, 40000);
    REQUIRE(rep.converged);
    auto x = R * U;
    axpy(1.0, L, x);
    return h1_seminorm_error(h.fine, x, singular_mode_gradient, 5);
  };

  auto fine_ops = build_space_operators(h, A, M, SpaceTag::fine);
  double err_fine = stationary_error(fine_ops.R, fine_ops.lift_basis, fine_ops.lift_vertices);
  auto red_ops = build_space_operators(h, A, M, SpaceTag::reduced, 2);
  double err_red = stationary_error(red_ops.R, red_ops.lift_basis, red_ops.lift_vertices);
  REQUIRE(err_red <= 2.0 * err_fine);
}
