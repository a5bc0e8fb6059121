#pragma once

// Transfers between the coarse and fine P1 spaces: prolongation, the
// elementwise L2 projection onto discontinuous coarse affines, nodal
// averaging, their composition (a projective quasi-interpolation), and the
// basis of its kernel.

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lodwave/assembly.hpp"
#include "lodwave/mesh.hpp"
#include "lodwave/sparse.hpp"

namespace lodwave {

// One affine value triple per coarse triangle, discontinuous across edges.
struct ElementwiseAffine {
  std::vector<std::array<double, 3>> tri_values;
};

// Fine vertex values of a coarse P1 function, via barycentric evaluation.
inline SparseMatrix prolongation_matrix(const MeshHierarchy& h) {
  std::vector<Triplet> trips;
  trips.reserve(3 * h.fine.n_vertices());
  for (int v = 0; v < h.fine.n_vertices(); ++v) {
    const auto& ref = h.fine_vertex_in_coarse[v];
    const auto& tri = h.coarse.triangles[ref.coarse_tri];
    for (int i = 0; i < 3; ++i)
      if (ref.bary[i] != 0.0) trips.push_back({v, tri[i], ref.bary[i]});
  }
  return SparseMatrix::from_triplets(h.fine.n_vertices(), h.coarse.n_vertices(), std::move(trips));
}

inline std::vector<double> prolongate(const MeshHierarchy& h, const std::vector<double>& coarse_coeffs) {
  std::vector<double> fine(h.fine.n_vertices(), 0.0);
  for (int v = 0; v < h.fine.n_vertices(); ++v) {
    const auto& ref = h.fine_vertex_in_coarse[v];
    const auto& tri = h.coarse.triangles[ref.coarse_tri];
    fine[v] = ref.bary[0] * coarse_coeffs[tri[0]] + ref.bary[1] * coarse_coeffs[tri[1]] +
              ref.bary[2] * coarse_coeffs[tri[2]];
  }
  return fine;
}

namespace detail {

inline std::vector<std::vector<int>> fine_tris_by_ancestor(const MeshHierarchy& h) {
  std::vector<std::vector<int>> lists(h.coarse.n_triangles());
  for (int t = 0; t < h.fine.n_triangles(); ++t) lists[h.fine_tri_ancestor[t]].push_back(t);
  return lists;
}

// Inverse of the local P1 mass matrix |T|/12 * [[2,1,1],[1,2,1],[1,1,2]].
inline double local_mass_inverse(double area, int i, int j) {
  return (i == j ? 9.0 : -3.0) / area;
}

// rhs[i] accumulates int_K v * lambda_i^T for the fine triangle K inside the
// coarse triangle T; the integrand is quadratic, so the order-2 rule is exact.
inline void accumulate_p1dc_rhs(const MeshHierarchy& h, int coarse_tri, int fine_tri,
                                const std::vector<double>& fine_coeffs, std::array<double, 3>& rhs) {
  const auto& rule = triangle_quadrature(2);
  const auto& ktri = h.fine.triangles[fine_tri];
  Vec2 p0 = h.fine.vertices[ktri[0]], p1 = h.fine.vertices[ktri[1]], p2 = h.fine.vertices[ktri[2]];
  double area = signed_area(p0, p1, p2);
  for (const auto& qp : rule) {
    Vec2 x = qp.bary[0] * p0 + qp.bary[1] * p1 + qp.bary[2] * p2;
    double v = qp.bary[0] * fine_coeffs[ktri[0]] + qp.bary[1] * fine_coeffs[ktri[1]] +
               qp.bary[2] * fine_coeffs[ktri[2]];
    auto lam = barycentric_coords(h.coarse, coarse_tri, x);
    for (int i = 0; i < 3; ++i) rhs[i] += area * qp.weight * v * lam[i];
  }
}

}  // namespace detail

// L2 projection onto discontinuous coarse affines, one 3x3 solve per coarse
// triangle with the right side integrated exactly over fine sub-triangles.
inline ElementwiseAffine project_p1_dc(const MeshHierarchy& h, const std::vector<double>& fine_coeffs) {
  auto by_anc = detail::fine_tris_by_ancestor(h);
  ElementwiseAffine out;
  out.tri_values.assign(h.coarse.n_triangles(), {0.0, 0.0, 0.0});
  for (int T = 0; T < h.coarse.n_triangles(); ++T) {
    std::array<double, 3> rhs{0.0, 0.0, 0.0};
    for (int K : by_anc[T]) detail::accumulate_p1dc_rhs(h, T, K, fine_coeffs, rhs);
    double area = triangle_area(h.coarse, T);
    for (int i = 0; i < 3; ++i) {
      double v = 0.0;
      for (int j = 0; j < 3; ++j) v += detail::local_mass_inverse(area, i, j) * rhs[j];
      out.tri_values[T][i] = v;
    }
  }
  return out;
}

// Averages the adjacent-triangle limits at interior vertices; boundary
// vertices get zero, so the result lies in the homogeneous coarse space.
inline std::vector<double> nodal_average(const Triangulation& coarse, const ElementwiseAffine& w) {
  std::vector<double> sums(coarse.n_vertices(), 0.0);
  std::vector<int> counts(coarse.n_vertices(), 0);
  for (int T = 0; T < coarse.n_triangles(); ++T)
    for (int i = 0; i < 3; ++i) {
      sums[coarse.triangles[T][i]] += w.tri_values[T][i];
      ++counts[coarse.triangles[T][i]];
    }
  std::vector<double> out(coarse.n_vertices(), 0.0);
  for (int z = 0; z < coarse.n_vertices(); ++z)
    if (!coarse.boundary_vertex[z] && counts[z] > 0) out[z] = sums[z] / counts[z];
  return out;
}

inline std::vector<double> quasi_interpolate(const MeshHierarchy& h, const std::vector<double>& fine_coeffs) {
  return nodal_average(h.coarse, project_p1_dc(h, fine_coeffs));
}

// The same map assembled as a sparse matrix (coarse vertices x fine
// vertices); rows of boundary vertices are empty.
inline SparseMatrix quasi_interpolation_matrix(const MeshHierarchy& h) {
  auto by_anc = detail::fine_tris_by_ancestor(h);
  const auto& rule = triangle_quadrature(2);
  std::vector<int> card(h.coarse.n_vertices(), 0);
  for (int T = 0; T < h.coarse.n_triangles(); ++T)
    for (int v : h.coarse.triangles[T]) ++card[v];

  std::vector<Triplet> trips;
  std::vector<std::array<double, 3>> rhs_by_vertex;  // per touched fine vertex
  std::vector<int> touched;
  std::vector<int> slot(h.fine.n_vertices(), -1);
  for (int T = 0; T < h.coarse.n_triangles(); ++T) {
    rhs_by_vertex.clear();
    touched.clear();
    for (int K : by_anc[T]) {
      const auto& ktri = h.fine.triangles[K];
      Vec2 p0 = h.fine.vertices[ktri[0]], p1 = h.fine.vertices[ktri[1]], p2 = h.fine.vertices[ktri[2]];
      double area = signed_area(p0, p1, p2);
      for (const auto& qp : rule) {
        Vec2 x = qp.bary[0] * p0 + qp.bary[1] * p1 + qp.bary[2] * p2;
        auto lam = barycentric_coords(h.coarse, T, x);
        for (int a = 0; a < 3; ++a) {
          int v = ktri[a];
          if (slot[v] < 0) {
            slot[v] = static_cast<int>(rhs_by_vertex.size());
            rhs_by_vertex.push_back({0.0, 0.0, 0.0});
            touched.push_back(v);
          }
          double w = area * qp.weight * qp.bary[a];
          for (int i = 0; i < 3; ++i) rhs_by_vertex[slot[v]][i] += w * lam[i];
        }
      }
    }
    double area = triangle_area(h.coarse, T);
    const auto& tri = h.coarse.triangles[T];
    for (int i = 0; i < 3; ++i) {
      int z = tri[i];
      if (h.coarse.boundary_vertex[z]) continue;
      double inv_card = 1.0 / card[z];
      for (int v : touched) {
        double val = 0.0;
        for (int j = 0; j < 3; ++j)
          val += detail::local_mass_inverse(area, i, j) * rhs_by_vertex[slot[v]][j];
        trips.push_back({z, v, inv_card * val});
      }
    }
    for (int v : touched) slot[v] = -1;
  }
  return SparseMatrix::from_triplets(h.coarse.n_vertices(), h.fine.n_vertices(), std::move(trips));
}

// Basis w_y = e_y - prolongate(I_H e_y) of the quasi-interpolation kernel,
// one column per fine interior vertex that is not a coarse vertex.
struct KernelBasis {
  SparseMatrix B;              // fine vertices x kernel dimension
  std::vector<int> generator;  // fine vertex per column
};

inline KernelBasis kernel_basis(const MeshHierarchy& h, const SparseMatrix& P, const SparseMatrix& IH) {
  std::vector<std::uint8_t> is_coarse(h.fine.n_vertices(), 0);
  for (int v : h.coarse_vertex_in_fine) is_coarse[v] = 1;

  KernelBasis kb;
  for (int y = 0; y < h.fine.n_vertices(); ++y)
    if (!is_coarse[y] && !h.fine.boundary_vertex[y]) kb.generator.push_back(y);

  SparseMatrix IHt = IH.transpose();  // fine x coarse
  SparseMatrix Pt = P.transpose();    // coarse x fine, gives column access into P
  std::vector<Triplet> trips;
  for (int k = 0; k < static_cast<int>(kb.generator.size()); ++k) {
    int y = kb.generator[k];
    trips.push_back({y, k, 1.0});
    for (int a = IHt.row_ptr[y]; a < IHt.row_ptr[y + 1]; ++a) {
      int z = IHt.col_idx[a];
      double c = IHt.vals[a];
      for (int b = Pt.row_ptr[z]; b < Pt.row_ptr[z + 1]; ++b)
        trips.push_back({Pt.col_idx[b], k, -c * Pt.vals[b]});
    }
  }
  kb.B = SparseMatrix::from_triplets(h.fine.n_vertices(), static_cast<int>(kb.generator.size()),
                                     std::move(trips));
  return kb;
}

inline KernelBasis kernel_basis(const MeshHierarchy& h) {
  return kernel_basis(h, prolongation_matrix(h), quasi_interpolation_matrix(h));
}

}  // namespace lodwave
