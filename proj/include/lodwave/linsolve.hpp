#pragma once

// Iterative solvers and eigenvalue computations: conjugate gradients,
// diagonally preconditioned CG, power iteration for the largest generalized
// eigenvalue, and a dense path for full desk-scale spectra.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lodwave/sparse.hpp"

namespace lodwave {

struct solver_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolveReport {
  int iterations = 0;
  double final_relative_residual = 0.0;
  bool converged = false;
};

using LinearOperator = std::function<void(const std::vector<double>&, std::vector<double>&)>;

inline LinearOperator as_operator(const SparseMatrix& A) {
  return [&A](const std::vector<double>& x, std::vector<double>& y) { A.multiply(x, y); };
}

// Plain CG for an SPD operator; relative residual ||b - Ax|| / ||b||.
inline SolveReport cg_operator(const LinearOperator& apply, int n, const std::vector<double>& b,
                               std::vector<double>& x, double tol, int maxit) {
  x.assign(n, 0.0);
  double bnorm = norm2(b);
  SolveReport rep;
  if (bnorm == 0.0) {
    rep.converged = true;
    return rep;
  }
  std::vector<double> r = b, p = b, Ap(n);
  double rr = dot(r, r);
  for (int it = 0; it < maxit; ++it) {
    if (std::sqrt(rr) / bnorm <= tol) break;
    apply(p, Ap);
    double alpha = rr / dot(p, Ap);
    axpy(alpha, p, x);
    axpy(-alpha, Ap, r);
    double rr_new = dot(r, r);
    double beta = rr_new / rr;
    rr = rr_new;
    for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    ++rep.iterations;
  }
  rep.final_relative_residual = std::sqrt(rr) / bnorm;
  rep.converged = rep.final_relative_residual <= tol;
  return rep;
}

inline std::pair<std::vector<double>, SolveReport> cg(const SparseMatrix& A, const std::vector<double>& b,
                                                      double tol = 1e-10, int maxit = -1) {
  if (maxit < 0) maxit = 10 * A.n_rows + 100;
  std::vector<double> x;
  auto rep = cg_operator(as_operator(A), A.n_rows, b, x, tol, maxit);
  return {std::move(x), rep};
}

// Jacobi-preconditioned CG; the inverse diagonal is spectrally equivalent to
// the inverse for the mass matrices this code meets, so iteration counts stay
// level-independent.
inline std::pair<std::vector<double>, SolveReport> pcg_diag(const SparseMatrix& M,
                                                            const std::vector<double>& b,
                                                            double tol = 1e-10, int maxit = -1) {
  if (maxit < 0) maxit = 10 * M.n_rows + 100;
  int n = M.n_rows;
  std::vector<double> dinv = M.diagonal();
  for (double& d : dinv) {
    if (d <= 0.0) throw solver_error("pcg_diag: non-positive diagonal entry");
    d = 1.0 / d;
  }
  std::vector<double> x(n, 0.0);
  SolveReport rep;
  double bnorm = norm2(b);
  if (bnorm == 0.0) {
    rep.converged = true;
    return {std::move(x), rep};
  }
  std::vector<double> r = b, z(n), p(n), Mp(n);
  for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
  p = z;
  double rz = dot(r, z);
  double rnorm = norm2(r);
  for (int it = 0; it < maxit; ++it) {
    if (rnorm / bnorm <= tol) break;
    M.multiply(p, Mp);
    double alpha = rz / dot(p, Mp);
    axpy(alpha, p, x);
    axpy(-alpha, Mp, r);
    for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    double rz_new = dot(r, z);
    double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rnorm = norm2(r);
    ++rep.iterations;
  }
  rep.final_relative_residual = rnorm / bnorm;
  rep.converged = rep.final_relative_residual <= tol;
  return {std::move(x), rep};
}

// Largest lambda with A x = lambda M x by power iteration on M^{-1} A.
// Successive Rayleigh quotients within tol stop the iteration; inner mass
// solves run at tol/100 so the outer stopping rule dominates.
inline double max_generalized_eig(const SparseMatrix& A, const SparseMatrix& M, double tol = 1e-10,
                                  int max_iterations = 20000) {
  int n = A.n_rows;
  if (n == 0) throw solver_error("max_generalized_eig: empty matrix");
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  bool restarted = false;
  double lambda_prev = 0.0;
  std::vector<double> Ax(n), Mx(n);
  for (int it = 0; it < max_iterations; ++it) {
    A.multiply(x, Ax);
    M.multiply(x, Mx);
    double lambda = dot(x, Ax) / dot(x, Mx);
    if (it > 0 && std::abs(lambda - lambda_prev) <= tol * std::abs(lambda)) {
      // guard against a start vector (near-)orthogonal to the top mode:
      // a grossly large eigen-residual triggers one deterministic restart
      std::vector<double> res = Ax;
      axpy(-lambda, Mx, res);
      if (norm2(res) <= 1e-2 * std::abs(lambda) * norm2(Mx) || restarted) return lambda;
      std::uint64_t state = 0x9e3779b97f4a7c15ull;
      for (int i = 0; i < n; ++i) {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        x[i] = (static_cast<double>(state >> 11) / 9007199254740992.0) - 0.5;
      }
      double s = norm2(x);
      for (double& v : x) v /= s;
      restarted = true;
      lambda_prev = 0.0;
      continue;
    }
    lambda_prev = lambda;
    auto [y, rep] = pcg_diag(M, Ax, tol / 100.0, 20 * n + 200);
    if (!rep.converged) throw solver_error("max_generalized_eig: inner mass solve stalled");
    double ynorm = norm2(y);
    if (ynorm == 0.0) throw solver_error("max_generalized_eig: zero iterate");
    for (int i = 0; i < n; ++i) x[i] = y[i] / ynorm;
  }
  throw solver_error("max_generalized_eig: no convergence within iteration cap");
}

namespace dense {

using Matrix = std::vector<std::vector<double>>;

// In-place lower Cholesky factor of an SPD matrix.
inline Matrix cholesky(const Matrix& M) {
  int n = static_cast<int>(M.size());
  Matrix L(n, std::vector<double>(n, 0.0));
  for (int j = 0; j < n; ++j) {
    double d = M[j][j];
    for (int k = 0; k < j; ++k) d -= L[j][k] * L[j][k];
    if (d <= 0.0) throw solver_error("cholesky: matrix not positive definite");
    L[j][j] = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = M[i][j];
      for (int k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
      L[i][j] = s / L[j][j];
    }
  }
  return L;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
inline std::vector<double> jacobi_eigenvalues(Matrix C, int max_sweeps = 60, double tol = 1e-13) {
  int n = static_cast<int>(C.size());
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (int i = 0; i < n; ++i) {
      diag += C[i][i] * C[i][i];
      for (int j = i + 1; j < n; ++j) off += 2.0 * C[i][j] * C[i][j];
    }
    if (off <= tol * tol * (diag + off) || off == 0.0) break;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(C[p][q]) <= 1e-16 * (std::abs(C[p][p]) + std::abs(C[q][q]))) continue;
        double theta = (C[q][q] - C[p][p]) / (2.0 * C[p][q]);
        double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double ckp = C[k][p], ckq = C[k][q];
          C[k][p] = c * ckp - s * ckq;
          C[k][q] = s * ckp + c * ckq;
        }
        for (int k = 0; k < n; ++k) {
          double cpk = C[p][k], cqk = C[q][k];
          C[p][k] = c * cpk - s * cqk;
          C[q][k] = s * cpk + c * cqk;
        }
      }
  }
  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = C[i][i];
  std::sort(eig.begin(), eig.end());
  return eig;
}

}  // namespace dense

// All generalized eigenvalues of (A, M) in ascending order, via M = L L^T and
// the symmetric reduction L^{-1} A L^{-T}. Intended for desk-scale spectra.
inline std::vector<double> full_spectrum(const SparseMatrix& A, const SparseMatrix& M,
                                         int dimension_cap = 2500) {
  int n = A.n_rows;
  if (n > dimension_cap)
    throw solver_error("full_spectrum: dimension " + std::to_string(n) +
                       " above cap; use max_generalized_eig for the top eigenvalue");
  dense::Matrix Ad = A.to_dense();
  dense::Matrix L = dense::cholesky(M.to_dense());
  // W = L^{-1} A (forward substitution per column)
  dense::Matrix W(n, std::vector<double>(n));
  for (int col = 0; col < n; ++col) {
    for (int i = 0; i < n; ++i) {
      double s = Ad[i][col];
      for (int k = 0; k < i; ++k) s -= L[i][k] * W[k][col];
      W[i][col] = s / L[i][i];
    }
  }
  // C = W L^{-T}, i.e. C^T = L^{-1} W^T (forward substitution per row of W)
  dense::Matrix C(n, std::vector<double>(n));
  for (int row = 0; row < n; ++row) {
    for (int i = 0; i < n; ++i) {
      double s = W[row][i];
      for (int k = 0; k < i; ++k) s -= L[i][k] * C[row][k];
      C[row][i] = s / L[i][i];
    }
  }
  return dense::jacobi_eigenvalues(std::move(C));
}

}  // namespace lodwave
