#pragma once

// Compressed-row symmetric-capable sparse matrices, assembled from triplets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace lodwave {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

struct SparseMatrix {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<int> row_ptr;  // size n_rows+1
  std::vector<int> col_idx;
  std::vector<double> vals;
  bool symmetric = false;

  std::int64_t nnz() const { return static_cast<std::int64_t>(vals.size()); }

  static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> trips,
                                    bool symmetric_flag = false) {
    // stable sort keeps duplicate accumulation order fixed, so assembled
    // values are bit-identical for a given insertion order
    std::stable_sort(trips.begin(), trips.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseMatrix m;
    m.n_rows = rows;
    m.n_cols = cols;
    m.symmetric = symmetric_flag;
    m.row_ptr.assign(rows + 1, 0);
    std::size_t i = 0;
    while (i < trips.size()) {
      std::size_t j = i;
      double sum = 0.0;
      while (j < trips.size() && trips[j].row == trips[i].row && trips[j].col == trips[i].col)
        sum += trips[j++].value;
      if (sum != 0.0) {
        m.col_idx.push_back(trips[i].col);
        m.vals.push_back(sum);
        ++m.row_ptr[trips[i].row + 1];
      }
      i = j;
    }
    for (int r = 0; r < rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
    return m;
  }

  static SparseMatrix identity(int n) {
    std::vector<Triplet> trips;
    trips.reserve(n);
    for (int i = 0; i < n; ++i) trips.push_back({i, i, 1.0});
    return from_triplets(n, n, std::move(trips), true);
  }

  void multiply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(n_rows, 0.0);
    for (int r = 0; r < n_rows; ++r) {
      double acc = 0.0;
      for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += vals[k] * x[col_idx[k]];
      y[r] = acc;
    }
  }

  std::vector<double> operator*(const std::vector<double>& x) const {
    std::vector<double> y;
    multiply(x, y);
    return y;
  }

  std::vector<double> multiply_transpose(const std::vector<double>& x) const {
    std::vector<double> y(n_cols, 0.0);
    for (int r = 0; r < n_rows; ++r)
      for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) y[col_idx[k]] += vals[k] * x[r];
    return y;
  }

  SparseMatrix transpose() const {
    std::vector<Triplet> trips;
    trips.reserve(vals.size());
    for (int r = 0; r < n_rows; ++r)
      for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) trips.push_back({col_idx[k], r, vals[k]});
    return from_triplets(n_cols, n_rows, std::move(trips), symmetric);
  }

  std::vector<double> diagonal() const {
    std::vector<double> d(std::min(n_rows, n_cols), 0.0);
    for (int r = 0; r < static_cast<int>(d.size()); ++r)
      for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
        if (col_idx[k] == r) d[r] = vals[k];
    return d;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : vals) m = std::max(m, std::abs(v));
    return m;
  }

  // Keeps rows/columns listed in the index sets (values untouched).
  SparseMatrix restricted(const std::vector<int>& rows, const std::vector<int>& cols) const {
    std::vector<int> row_of(n_rows, -1), col_of(n_cols, -1);
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) row_of[rows[i]] = i;
    for (int j = 0; j < static_cast<int>(cols.size()); ++j) col_of[cols[j]] = j;
    std::vector<Triplet> trips;
    for (int r = 0; r < n_rows; ++r) {
      if (row_of[r] < 0) continue;
      for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
        if (col_of[col_idx[k]] >= 0) trips.push_back({row_of[r], col_of[col_idx[k]], vals[k]});
    }
    return from_triplets(static_cast<int>(rows.size()), static_cast<int>(cols.size()),
                         std::move(trips), symmetric);
  }

  // Drops entries below tol_rel * max|entry|.
  SparseMatrix compressed(double tol_rel) const {
    double cut = tol_rel * max_abs();
    std::vector<Triplet> trips;
    for (int r = 0; r < n_rows; ++r)
      for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
        if (std::abs(vals[k]) > cut) trips.push_back({r, col_idx[k], vals[k]});
    return from_triplets(n_rows, n_cols, std::move(trips), symmetric);
  }

  std::vector<std::vector<double>> to_dense() const {
    std::vector<std::vector<double>> d(n_rows, std::vector<double>(n_cols, 0.0));
    for (int r = 0; r < n_rows; ++r)
      for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) d[r][col_idx[k]] = vals[k];
    return d;
  }
};

// out = A + s * B
inline SparseMatrix add(const SparseMatrix& A, double s, const SparseMatrix& B) {
  if (A.n_rows != B.n_rows || A.n_cols != B.n_cols) throw std::invalid_argument("add: shape mismatch");
  std::vector<Triplet> trips;
  for (int r = 0; r < A.n_rows; ++r) {
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) trips.push_back({r, A.col_idx[k], A.vals[k]});
    for (int k = B.row_ptr[r]; k < B.row_ptr[r + 1]; ++k) trips.push_back({r, B.col_idx[k], s * B.vals[k]});
  }
  return SparseMatrix::from_triplets(A.n_rows, A.n_cols, std::move(trips),
                                     A.symmetric && B.symmetric);
}

// Galerkin triple product Rt * A * R for a basis matrix R (rows of A indexed
// like rows of R). Column supports of R stay modest, so a scatter buffer per
// column is enough.
inline SparseMatrix triple_product(const SparseMatrix& R, const SparseMatrix& A,
                                   double drop_tol_rel = 1e-14) {
  if (A.n_rows != R.n_rows || A.n_cols != R.n_rows)
    throw std::invalid_argument("triple_product: shape mismatch");
  SparseMatrix Rt = R.transpose();  // rows = basis columns
  std::vector<Triplet> trips;
  std::vector<double> work(R.n_rows, 0.0);
  std::vector<int> touched;
  std::vector<double> acc(R.n_cols, 0.0);
  std::vector<int> acc_touched;
  for (int z = 0; z < R.n_cols; ++z) {
    // work = A * r_z restricted to reachable rows
    for (int k = Rt.row_ptr[z]; k < Rt.row_ptr[z + 1]; ++k) {
      int i = Rt.col_idx[k];
      double rv = Rt.vals[k];
      for (int a = A.row_ptr[i]; a < A.row_ptr[i + 1]; ++a) {
        int j = A.col_idx[a];
        if (work[j] == 0.0) touched.push_back(j);
        work[j] += A.vals[a] * rv;
      }
    }
    // acc = Rt * work
    for (int j : touched) {
      double wj = work[j];
      if (wj == 0.0) continue;
      for (int k = R.row_ptr[j]; k < R.row_ptr[j + 1]; ++k) {
        int zp = R.col_idx[k];
        if (acc[zp] == 0.0) acc_touched.push_back(zp);
        acc[zp] += R.vals[k] * wj;
      }
    }
    for (int zp : acc_touched) {
      if (acc[zp] != 0.0) trips.push_back({zp, z, acc[zp]});
      acc[zp] = 0.0;
    }
    acc_touched.clear();
    for (int j : touched) work[j] = 0.0;
    touched.clear();
  }
  auto out = SparseMatrix::from_triplets(R.n_cols, R.n_cols, std::move(trips), true);
  return drop_tol_rel > 0.0 ? out.compressed(drop_tol_rel) : out;
}

// Coordinate-format export "i j value" sorted by (i, j).
inline void write_coordinate_text(std::ostream& os, const SparseMatrix& m) {
  os.precision(17);
  for (int r = 0; r < m.n_rows; ++r)
    for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
      os << r << ' ' << m.col_idx[k] << ' ' << m.vals[k] << '\n';
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace lodwave
