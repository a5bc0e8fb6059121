#pragma once

// P1 finite element assembly on triangulations: stiffness, mass, lumped
// mass, load vectors and error norms against analytic references.

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "lodwave/mesh.hpp"
#include "lodwave/sparse.hpp"

namespace lodwave {

// Interior (non-boundary) vertices carry the homogeneous-Dirichlet dofs.
struct DofMap {
  int n_vertices = 0;
  std::vector<int> interior;       // vertex index per dof
  std::vector<int> vertex_to_dof;  // -1 for boundary vertices

  explicit DofMap(const Triangulation& mesh) : n_vertices(mesh.n_vertices()) {
    vertex_to_dof.assign(n_vertices, -1);
    for (int v = 0; v < n_vertices; ++v)
      if (!mesh.boundary_vertex[v]) {
        vertex_to_dof[v] = static_cast<int>(interior.size());
        interior.push_back(v);
      }
  }

  int n_dofs() const { return static_cast<int>(interior.size()); }

  std::vector<double> restrict_vector(const std::vector<double>& full) const {
    std::vector<double> out(interior.size());
    for (std::size_t i = 0; i < interior.size(); ++i) out[i] = full[interior[i]];
    return out;
  }

  std::vector<double> expand_vector(const std::vector<double>& restricted) const {
    std::vector<double> out(n_vertices, 0.0);
    for (std::size_t i = 0; i < interior.size(); ++i) out[interior[i]] = restricted[i];
    return out;
  }

  SparseMatrix restrict_matrix(const SparseMatrix& full) const {
    return full.restricted(interior, interior);
  }

  // Embedding of interior dofs into full vertex vectors as a sparse matrix.
  SparseMatrix embedding_matrix() const {
    std::vector<Triplet> trips;
    trips.reserve(interior.size());
    for (std::size_t i = 0; i < interior.size(); ++i)
      trips.push_back({interior[i], static_cast<int>(i), 1.0});
    return SparseMatrix::from_triplets(n_vertices, n_dofs(), std::move(trips));
  }
};

struct QuadPoint {
  std::array<double, 3> bary;
  double weight;  // weights sum to 1, integral ~= |T| * sum w_q f(x_q)
};

// Symmetric interior Gauss rules, exact for the named polynomial degree.
inline const std::vector<QuadPoint>& triangle_quadrature(int order) {
  static const std::vector<QuadPoint> q1 = {{{1.0 / 3, 1.0 / 3, 1.0 / 3}, 1.0}};
  static const std::vector<QuadPoint> q2 = {{{2.0 / 3, 1.0 / 6, 1.0 / 6}, 1.0 / 3},
                                            {{1.0 / 6, 2.0 / 3, 1.0 / 6}, 1.0 / 3},
                                            {{1.0 / 6, 1.0 / 6, 2.0 / 3}, 1.0 / 3}};
  static const std::vector<QuadPoint> q3 = {{{1.0 / 3, 1.0 / 3, 1.0 / 3}, -27.0 / 48},
                                            {{0.6, 0.2, 0.2}, 25.0 / 48},
                                            {{0.2, 0.6, 0.2}, 25.0 / 48},
                                            {{0.2, 0.2, 0.6}, 25.0 / 48}};
  static const std::vector<QuadPoint> q5 = [] {
    const double a1 = 0.059715871789769820, b1 = 0.470142064105115090;
    const double a2 = 0.797426985353087320, b2 = 0.101286507323456340;
    const double w1 = 0.132394152788506180, w2 = 0.125939180544827150;
    return std::vector<QuadPoint>{{{1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.225},
                                  {{a1, b1, b1}, w1}, {{b1, a1, b1}, w1}, {{b1, b1, a1}, w1},
                                  {{a2, b2, b2}, w2}, {{b2, a2, b2}, w2}, {{b2, b2, a2}, w2}};
  }();
  switch (order) {
    case 1: return q1;
    case 2: return q2;
    case 3: return q3;
    case 5: return q5;
    default: throw std::invalid_argument("triangle_quadrature: order must be in {1,2,3,5}");
  }
}

// Constant P1 shape-function gradients on a triangle; area returned as well.
inline double p1_gradients(const Triangulation& mesh, int t, std::array<Vec2, 3>& grad) {
  const auto& tri = mesh.triangles[t];
  Vec2 p0 = mesh.vertices[tri[0]], p1 = mesh.vertices[tri[1]], p2 = mesh.vertices[tri[2]];
  double two_area = cross(p1 - p0, p2 - p0);
  double area = 0.5 * two_area;
  grad[0] = (1.0 / two_area) * Vec2{p1.y - p2.y, p2.x - p1.x};
  grad[1] = (1.0 / two_area) * Vec2{p2.y - p0.y, p0.x - p2.x};
  grad[2] = (1.0 / two_area) * Vec2{p0.y - p1.y, p1.x - p0.x};
  return area;
}

inline SparseMatrix assemble_stiffness(const Triangulation& mesh) {
  std::vector<Triplet> trips;
  trips.reserve(9 * mesh.triangles.size());
  std::array<Vec2, 3> grad;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    double area = p1_gradients(mesh, t, grad);
    if (area < 1e-14) throw std::runtime_error("assemble_stiffness: degenerate triangle");
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trips.push_back({tri[i], tri[j], area * dot(grad[i], grad[j])});
  }
  return SparseMatrix::from_triplets(mesh.n_vertices(), mesh.n_vertices(), std::move(trips), true);
}

inline SparseMatrix assemble_mass(const Triangulation& mesh) {
  std::vector<Triplet> trips;
  trips.reserve(9 * mesh.triangles.size());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    double area = triangle_area(mesh, t);
    if (area < 1e-14) throw std::runtime_error("assemble_mass: degenerate triangle");
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trips.push_back({tri[i], tri[j], area / 12.0 * (i == j ? 2.0 : 1.0)});
  }
  return SparseMatrix::from_triplets(mesh.n_vertices(), mesh.n_vertices(), std::move(trips), true);
}

// Row sums d_j = sum_k M_jk; for P1 mass matrices all entries are positive
// and they sum to the mesh area.
inline std::vector<double> lump_mass(const SparseMatrix& M) {
  std::vector<double> d(M.n_rows, 0.0);
  for (int r = 0; r < M.n_rows; ++r)
    for (int k = M.row_ptr[r]; k < M.row_ptr[r + 1]; ++k) d[r] += M.vals[k];
  return d;
}

using SpatialFn = std::function<double(Vec2)>;
using SpatialGradFn = std::function<Vec2(Vec2)>;

inline std::vector<double> assemble_load(const Triangulation& mesh, const SpatialFn& f,
                                         int quad_order = 2) {
  const auto& rule = triangle_quadrature(quad_order);
  std::vector<double> b(mesh.n_vertices(), 0.0);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    Vec2 p0 = mesh.vertices[tri[0]], p1 = mesh.vertices[tri[1]], p2 = mesh.vertices[tri[2]];
    double area = signed_area(p0, p1, p2);
    for (const auto& qp : rule) {
      Vec2 x = qp.bary[0] * p0 + qp.bary[1] * p1 + qp.bary[2] * p2;
      double fw = area * qp.weight * f(x);
      for (int i = 0; i < 3; ++i) b[tri[i]] += fw * qp.bary[i];
    }
  }
  return b;
}

// sqrt( sum_T int_T |grad_u - grad u_h|^2 ); the rules above have interior
// points only, so a singular corner vertex is never sampled.
inline double h1_seminorm_error(const Triangulation& mesh, const std::vector<double>& coeffs,
                                const SpatialGradFn& grad_u, int quad_order = 5) {
  const auto& rule = triangle_quadrature(quad_order);
  std::array<Vec2, 3> grad;
  double err2 = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    double area = p1_gradients(mesh, t, grad);
    const auto& tri = mesh.triangles[t];
    Vec2 gh{0.0, 0.0};
    for (int i = 0; i < 3; ++i) gh = gh + coeffs[tri[i]] * grad[i];
    Vec2 p0 = mesh.vertices[tri[0]], p1 = mesh.vertices[tri[1]], p2 = mesh.vertices[tri[2]];
    for (const auto& qp : rule) {
      Vec2 x = qp.bary[0] * p0 + qp.bary[1] * p1 + qp.bary[2] * p2;
      Vec2 d = grad_u(x) - gh;
      err2 += area * qp.weight * dot(d, d);
    }
  }
  return std::sqrt(err2);
}

inline double l2_norm_squared(const SparseMatrix& M, const std::vector<double>& coeffs) {
  return dot(coeffs, M * coeffs);
}

inline std::vector<double> nodal_values(const Triangulation& mesh, const SpatialFn& f) {
  std::vector<double> v(mesh.n_vertices());
  for (int i = 0; i < mesh.n_vertices(); ++i) v[i] = f(mesh.vertices[i]);
  return v;
}

}  // namespace lodwave
