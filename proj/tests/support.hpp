#pragma once

// Shared test oracles, kept independent of the library's own solver paths:
// exact polynomial integrals over triangles, Eigen-backed dense solves and
// eigendecompositions, closed-form 1D chain spectra, and small mesh helpers.

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "lodwave/lodwave.hpp"

namespace testsupport {

// integral over T of lambda0^a lambda1^b lambda2^c = 2|T| a! b! c! / (a+b+c+2)!
inline double bary_moment(double area, int a, int b, int c) {
  auto fact = [](int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  return 2.0 * area * fact(a) * fact(b) * fact(c) / fact(a + b + c + 2);
}

// integral over T of x^p y^q (p+q <= 2) via barycentric expansion
inline double integrate_xy(const std::array<lodwave::Vec2, 3>& v, int p, int q) {
  double area = lodwave::signed_area(v[0], v[1], v[2]);
  auto term = [&](int i, int j) {  // integral of (coordinate factors) lambda_i lambda_j
    int e[3] = {0, 0, 0};
    ++e[i];
    ++e[j];
    return bary_moment(area, e[0], e[1], e[2]);
  };
  if (p + q == 0) return area;
  if (p + q == 1) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      int e[3] = {0, 0, 0};
      ++e[i];
      s += (p ? v[i].x : v[i].y) * bary_moment(area, e[0], e[1], e[2]);
    }
    return s;
  }
  // quadratic: x^2, y^2 or xy
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double ci = (p >= 1) ? v[i].x : v[i].y;
      double cj = (p == 2) ? v[j].x : v[j].y;
      s += ci * cj * term(i, j);
    }
  return s;
}

// integral over T of x^p y^q lambda_loc (p+q <= 2), for load-vector oracles
inline double integrate_xy_hat(const std::array<lodwave::Vec2, 3>& v, int p, int q, int loc) {
  double area = lodwave::signed_area(v[0], v[1], v[2]);
  if (p + q == 0) {
    int e[3] = {0, 0, 0};
    ++e[loc];
    return bary_moment(area, e[0], e[1], e[2]);
  }
  if (p + q == 1) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      int e[3] = {0, 0, 0};
      ++e[i];
      ++e[loc];
      s += (p ? v[i].x : v[i].y) * bary_moment(area, e[0], e[1], e[2]);
    }
    return s;
  }
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double ci = (p >= 1) ? v[i].x : v[i].y;
      double cj = (p == 2) ? v[j].x : v[j].y;
      int e[3] = {0, 0, 0};
      ++e[i];
      ++e[j];
      ++e[loc];
      s += ci * cj * bary_moment(area, e[0], e[1], e[2]);
    }
  return s;
}

inline Eigen::MatrixXd to_eigen(const lodwave::SparseMatrix& m) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m.n_rows, m.n_cols);
  for (int r = 0; r < m.n_rows; ++r)
    for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) d(r, m.col_idx[k]) = m.vals[k];
  return d;
}

inline std::vector<double> eigen_generalized_eigenvalues(const lodwave::SparseMatrix& A,
                                                         const lodwave::SparseMatrix& M) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(A), to_eigen(M));
  std::vector<double> out(solver.eigenvalues().data(),
                          solver.eigenvalues().data() + solver.eigenvalues().size());
  return out;
}

inline std::vector<double> eigen_dense_solve(const lodwave::SparseMatrix& A,
                                             const std::vector<double>& b) {
  Eigen::VectorXd bb = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
  Eigen::VectorXd x = to_eigen(A).fullPivLu().solve(bb);
  return std::vector<double>(x.data(), x.data() + x.size());
}

// Generalized eigenvalues of the 1D P1 chain on (0,1) with n interior nodes:
// lambda_k = (6/h^2) (1 - cos t_k) / (2 + cos t_k), t_k = k pi / (n+1).
inline std::vector<double> chain_spectrum(int n) {
  double h = 1.0 / (n + 1);
  std::vector<double> out;
  for (int k = 1; k <= n; ++k) {
    double c = std::cos(k * M_PI / (n + 1));
    out.push_back(6.0 / (h * h) * (1.0 - c) / (2.0 + c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::pair<lodwave::SparseMatrix, lodwave::SparseMatrix> chain_matrices(int n) {
  double h = 1.0 / (n + 1);
  std::vector<lodwave::Triplet> ta, tm;
  for (int i = 0; i < n; ++i) {
    ta.push_back({i, i, 2.0 / h});
    tm.push_back({i, i, 4.0 * h / 6.0});
    if (i + 1 < n) {
      ta.push_back({i, i + 1, -1.0 / h});
      ta.push_back({i + 1, i, -1.0 / h});
      tm.push_back({i, i + 1, h / 6.0});
      tm.push_back({i + 1, i, h / 6.0});
    }
  }
  return {lodwave::SparseMatrix::from_triplets(n, n, ta, true),
          lodwave::SparseMatrix::from_triplets(n, n, tm, true)};
}

// Mesh of the unit square split along the (0,0)-(1,1) diagonal.
inline lodwave::Triangulation unit_square_pair() {
  lodwave::Triangulation m;
  m.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  m.boundary_vertex = {1, 1, 1, 1};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  m.refinement_edge = {0, 1};
  return m;
}

inline lodwave::Triangulation single_unit_right_triangle() {
  lodwave::Triangulation m;
  m.vertices = {{0, 0}, {1, 0}, {0, 1}};
  m.boundary_vertex = {1, 1, 1};
  m.triangles = {{0, 1, 2}};
  m.refinement_edge = {0};
  return m;
}

inline std::vector<double> random_vector(int n, std::mt19937& rng, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

// SPD matrix G^T G + n I as triplets, for solver tests.
inline lodwave::SparseMatrix random_spd(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = dist(rng);
  Eigen::MatrixXd S = G.transpose() * G + double(n) * Eigen::MatrixXd::Identity(n, n);
  std::vector<lodwave::Triplet> trips;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) trips.push_back({i, j, S(i, j)});
  return lodwave::SparseMatrix::from_triplets(n, n, trips, true);
}

}  // namespace testsupport
