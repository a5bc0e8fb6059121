#pragma once

// Correctors and the reduced generalized FE space: energy-orthogonal
// projections of coarse hat functions onto the quasi-interpolation kernel,
// either global or truncated to element patches, and the Galerkin matrices
// of the resulting space.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lodwave/assembly.hpp"
#include "lodwave/interp.hpp"
#include "lodwave/linsolve.hpp"
#include "lodwave/mesh.hpp"
#include "lodwave/sparse.hpp"

namespace lodwave {

// Localization parameter value encoding the untruncated corrector.
inline constexpr int m_global = std::numeric_limits<int>::max();

struct ReducedBasis {
  SparseMatrix R;                // fine vertices x coarse interior dofs
  int m = m_global;              // patch layers used for the correctors
  std::vector<int> coarse_dofs;  // coarse vertex per column

  // Corrected boundary hats, used to lift inhomogeneous Dirichlet data. A
  // plain coarse-hat lift leaves an O(1) kernel-space residual that the
  // reduced space cannot absorb; correcting the boundary hats keeps the
  // lift energy-orthogonal to the kernel like the interior columns.
  SparseMatrix R_boundary;           // fine vertices x coarse boundary nodes
  std::vector<int> boundary_vertices;

  std::vector<int> column_support(int col) const {
    SparseMatrix Rt = R.transpose();
    std::vector<int> out;
    for (int k = Rt.row_ptr[col]; k < Rt.row_ptr[col + 1]; ++k) out.push_back(Rt.col_idx[k]);
    return out;
  }
};

namespace detail {

class PatchFinder {
 public:
  explicit PatchFinder(const Triangulation& mesh) : mesh_(&mesh) {
    vertex_tris_.resize(mesh.n_vertices());
    for (int t = 0; t < mesh.n_triangles(); ++t)
      for (int v : mesh.triangles[t]) vertex_tris_[v].push_back(t);
    stamp_.assign(mesh.n_triangles(), 0);
  }

  // Triangles within m vertex-touching hops of t.
  std::vector<int> patch(int t, int m) const {
    ++current_;
    std::vector<int> out{t};
    stamp_[t] = current_;
    std::size_t frontier_begin = 0;
    for (int hop = 0; hop < m; ++hop) {
      std::size_t frontier_end = out.size();
      if (frontier_begin == frontier_end) break;
      for (std::size_t f = frontier_begin; f < frontier_end; ++f)
        for (int v : mesh_->triangles[out[f]])
          for (int u : vertex_tris_[v])
            if (stamp_[u] != current_) {
              stamp_[u] = current_;
              out.push_back(u);
            }
      frontier_begin = frontier_end;
    }
    return out;
  }

  const std::vector<int>& tris_of_vertex(int v) const { return vertex_tris_[v]; }

 private:
  const Triangulation* mesh_;
  std::vector<std::vector<int>> vertex_tris_;
  mutable std::vector<int> stamp_;
  mutable int current_ = 0;
};

// Value at fine vertex v of the prolongated coarse hat of vertex z.
inline double prolongated_hat_value(const MeshHierarchy& h, int v, int z) {
  const auto& ref = h.fine_vertex_in_coarse[v];
  const auto& tri = h.coarse.triangles[ref.coarse_tri];
  double val = 0.0;
  for (int i = 0; i < 3; ++i)
    if (tri[i] == z) val += ref.bary[i];
  return val;
}

// Shared machinery for the corrector solves: the kernel basis with its
// transpose, and per fine vertex the coarse triangles containing it.
struct CorrectorSetup {
  const MeshHierarchy* h = nullptr;
  const SparseMatrix* A = nullptr;
  KernelBasis kb;
  SparseMatrix Bt;
  std::vector<std::vector<int>> coarse_tris_of_fine_vertex;
  std::vector<std::vector<int>> kernel_cols_by_coarse_tri;
  PatchFinder patches;

  CorrectorSetup(const MeshHierarchy& hier, const SparseMatrix& A_h, KernelBasis basis)
      : h(&hier), A(&A_h), kb(std::move(basis)), patches(hier.coarse) {
    Bt = kb.B.transpose();
    coarse_tris_of_fine_vertex.resize(hier.fine.n_vertices());
    for (int t = 0; t < hier.fine.n_triangles(); ++t) {
      int anc = hier.fine_tri_ancestor[t];
      for (int v : hier.fine.triangles[t]) {
        auto& lst = coarse_tris_of_fine_vertex[v];
        bool seen = false;
        for (int c : lst) seen |= (c == anc);
        if (!seen) lst.push_back(anc);
      }
    }
    kernel_cols_by_coarse_tri.resize(hier.coarse.n_triangles());
    for (int k = 0; k < static_cast<int>(kb.generator.size()); ++k)
      for (int c : coarse_tris_of_fine_vertex[kb.generator[k]])
        kernel_cols_by_coarse_tri[c].push_back(k);
  }
};

// Local Galerkin solve over the kernel columns selected for one patch.
// Carries the patch-restricted stiffness and column data between the up-to
// -three right-hand sides of one coarse element.
class PatchSolver {
 public:
  PatchSolver(const CorrectorSetup& setup, const std::vector<int>& patch_tris) : setup_(&setup) {
    const auto& h = *setup.h;
    in_patch_.assign(h.coarse.n_triangles(), 0);
    for (int t : patch_tris) in_patch_[t] = 1;

    // kernel columns supported inside the patch: every fine vertex the
    // column touches must have all its coarse elements in the patch,
    // which realizes homogeneous conditions on the artificial boundary
    std::vector<std::uint8_t> col_seen(setup.kb.generator.size(), 0);
    for (int t : patch_tris)
      for (int k : setup.kernel_cols_by_coarse_tri[t]) {
        if (col_seen[k]) continue;
        col_seen[k] = 1;
        bool inside = true;
        for (int a = setup.Bt.row_ptr[k]; inside && a < setup.Bt.row_ptr[k + 1]; ++a)
          for (int c : setup.coarse_tris_of_fine_vertex[setup.Bt.col_idx[a]])
            inside &= (in_patch_[c] != 0);
        if (inside) cols_.push_back(k);
      }
    std::sort(cols_.begin(), cols_.end());

    // local indexing over the union of the selected columns' supports
    local_of_.assign(h.fine.n_vertices(), -1);
    for (int k : cols_)
      for (int a = setup.Bt.row_ptr[k]; a < setup.Bt.row_ptr[k + 1]; ++a) {
        int v = setup.Bt.col_idx[a];
        if (local_of_[v] < 0) {
          local_of_[v] = static_cast<int>(fine_dofs_.size());
          fine_dofs_.push_back(v);
        }
      }

    // patch-restricted stiffness
    const SparseMatrix& A = *setup.A;
    a_ptr_.assign(fine_dofs_.size() + 1, 0);
    for (std::size_t i = 0; i < fine_dofs_.size(); ++i) {
      int v = fine_dofs_[i];
      for (int a = A.row_ptr[v]; a < A.row_ptr[v + 1]; ++a)
        if (local_of_[A.col_idx[a]] >= 0) {
          a_col_.push_back(local_of_[A.col_idx[a]]);
          a_val_.push_back(A.vals[a]);
        }
      a_ptr_[i + 1] = static_cast<int>(a_col_.size());
    }

    // local column data
    col_entries_.resize(cols_.size());
    for (std::size_t k = 0; k < cols_.size(); ++k) {
      int col = cols_[k];
      for (int a = setup.Bt.row_ptr[col]; a < setup.Bt.row_ptr[col + 1]; ++a)
        col_entries_[k].push_back({local_of_[setup.Bt.col_idx[a]], setup.Bt.vals[a]});
    }
  }

  bool empty() const { return cols_.empty(); }
  int n_cols() const { return static_cast<int>(cols_.size()); }

  // Solves the patch system for the element load of hat z over one coarse
  // triangle (element_fine_tris lists the fine triangles inside it) and
  // appends the corrector as (fine vertex, value) contributions, possibly
  // with repeated indices.
  void solve_element_load(int z, const std::vector<int>& element_fine_tris, double tol,
                          std::vector<std::pair<int, double>>& out) const {
    if (cols_.empty()) return;
    const auto& h = *setup_->h;
    // right-hand side: stiffness action of fine triangles inside t applied
    // to the prolongated hat, then paired with each kernel column
    std::vector<double> r_local(fine_dofs_.size(), 0.0);
    std::array<Vec2, 3> grad;
    for (int ft : element_fine_tris) {
      double area = p1_gradients(h.fine, ft, grad);
      const auto& tri = h.fine.triangles[ft];
      Vec2 gh{0.0, 0.0};
      for (int i = 0; i < 3; ++i) gh = gh + prolongated_hat_value(h, tri[i], z) * grad[i];
      for (int i = 0; i < 3; ++i) {
        int li = local_of_[tri[i]];
        if (li >= 0) r_local[li] += area * dot(grad[i], gh);
      }
    }
    std::vector<double> rhs(cols_.size(), 0.0);
    for (std::size_t k = 0; k < cols_.size(); ++k)
      for (const auto& [li, val] : col_entries_[k]) rhs[k] += val * r_local[li];

    std::vector<double> c;
    auto apply = [this](const std::vector<double>& cin, std::vector<double>& cout) {
      this->apply_galerkin(cin, cout);
    };
    auto rep = cg_operator(apply, static_cast<int>(cols_.size()), rhs, c, tol,
                           10 * static_cast<int>(cols_.size()) + 100);
    if (!rep.converged)
      throw solver_error("element corrector CG stalled at residual " +
                         std::to_string(rep.final_relative_residual));
    for (std::size_t k = 0; k < cols_.size(); ++k)
      for (const auto& [li, val] : col_entries_[k])
        if (c[k] * val != 0.0) out.emplace_back(fine_dofs_[li], c[k] * val);
  }

 private:
  void apply_galerkin(const std::vector<double>& cin, std::vector<double>& cout) const {
    std::vector<double> y(fine_dofs_.size(), 0.0), Ay(fine_dofs_.size(), 0.0);
    for (std::size_t k = 0; k < cols_.size(); ++k)
      for (const auto& [li, val] : col_entries_[k]) y[li] += cin[k] * val;
    for (std::size_t i = 0; i < fine_dofs_.size(); ++i) {
      double acc = 0.0;
      for (int a = a_ptr_[i]; a < a_ptr_[i + 1]; ++a) acc += a_val_[a] * y[a_col_[a]];
      Ay[i] = acc;
    }
    cout.assign(cols_.size(), 0.0);
    for (std::size_t k = 0; k < cols_.size(); ++k)
      for (const auto& [li, val] : col_entries_[k]) cout[k] += val * Ay[li];
  }

  const CorrectorSetup* setup_;
  std::vector<std::uint8_t> in_patch_;
  std::vector<int> cols_;
  std::vector<int> fine_dofs_;
  std::vector<int> local_of_;
  std::vector<int> a_ptr_, a_col_;
  std::vector<double> a_val_;
  std::vector<std::vector<std::pair<int, double>>> col_entries_;
};

}  // namespace detail

// Galerkin projection of the prolongated coarse function onto the kernel
// space, computed on the kernel basis by conjugate gradients.
inline std::vector<double> global_corrector(const MeshHierarchy& h, const SparseMatrix& A_h,
                                            const KernelBasis& kb,
                                            const std::vector<double>& coarse_coeffs,
                                            double tol = 1e-10) {
  int nk = kb.B.n_cols;
  std::vector<double> fine = prolongate(h, coarse_coeffs);
  if (nk == 0) return std::vector<double>(h.fine.n_vertices(), 0.0);
  std::vector<double> rhs = kb.B.multiply_transpose(A_h * fine);
  auto apply = [&](const std::vector<double>& c, std::vector<double>& out) {
    out = kb.B.multiply_transpose(A_h * (kb.B * c));
  };
  std::vector<double> c;
  auto rep = cg_operator(apply, nk, rhs, c, tol, 10 * nk + 100);
  if (!rep.converged)
    throw solver_error("global corrector CG stalled at residual " +
                       std::to_string(rep.final_relative_residual));
  return kb.B * c;
}

inline std::vector<double> global_corrector(const MeshHierarchy& h, const SparseMatrix& A_h,
                                            const std::vector<double>& coarse_coeffs,
                                            double tol = 1e-10) {
  return global_corrector(h, A_h, kernel_basis(h), coarse_coeffs, tol);
}

// Corrector contribution of one coarse element t to the hat of vertex z,
// solved on the m-layer patch around t with homogeneous conditions on its
// artificial boundary. An unrefined patch yields the zero vector.
inline std::vector<double> element_corrector(const MeshHierarchy& h, const SparseMatrix& A_h,
                                             const KernelBasis& kb, int t, int z, int m,
                                             double tol = 1e-10) {
  bool z_in_t = false;
  for (int v : h.coarse.triangles[t]) z_in_t |= (v == z);
  if (!z_in_t) throw std::invalid_argument("element_corrector: z is not a vertex of t");
  detail::CorrectorSetup setup(h, A_h, kb);
  auto patch = setup.patches.patch(t, m == m_global ? h.coarse.n_triangles() : m);
  detail::PatchSolver solver(setup, patch);
  std::vector<int> element_fine_tris;
  for (int ft = 0; ft < h.fine.n_triangles(); ++ft)
    if (h.fine_tri_ancestor[ft] == t) element_fine_tris.push_back(ft);
  std::vector<std::pair<int, double>> contrib;
  solver.solve_element_load(z, element_fine_tris, tol, contrib);
  std::vector<double> out(h.fine.n_vertices(), 0.0);
  for (const auto& [v, val] : contrib) out[v] += val;
  return out;
}

// Columns hat_z - sum of element correctors over the coarse elements at z.
// m = m_global routes through the untruncated corrector.
inline ReducedBasis build_reduced_basis(const MeshHierarchy& h, const SparseMatrix& A_h,
                                        const KernelBasis& kb, int m, double cg_tol = 1e-10,
                                        double drop_tol = 1e-14) {
  DofMap coarse_dofs(h.coarse);
  ReducedBasis rb;
  rb.m = m;
  rb.coarse_dofs = coarse_dofs.interior;
  std::vector<int> boundary_col(h.coarse.n_vertices(), -1);
  for (int v = 0; v < h.coarse.n_vertices(); ++v)
    if (h.coarse.boundary_vertex[v]) {
      boundary_col[v] = static_cast<int>(rb.boundary_vertices.size());
      rb.boundary_vertices.push_back(v);
    }

  std::vector<Triplet> trips, bnd_trips;

  // plain prolongated hats, walked through the transposed prolongation
  SparseMatrix Pt = prolongation_matrix(h).transpose();
  for (int z = 0; z < h.coarse.n_vertices(); ++z) {
    auto& dst = h.coarse.boundary_vertex[z] ? bnd_trips : trips;
    int col = h.coarse.boundary_vertex[z] ? boundary_col[z] : coarse_dofs.vertex_to_dof[z];
    for (int k = Pt.row_ptr[z]; k < Pt.row_ptr[z + 1]; ++k)
      dst.push_back({Pt.col_idx[k], col, Pt.vals[k]});
  }

  if (kb.B.n_cols > 0) {
    if (m == m_global) {
      for (int z = 0; z < h.coarse.n_vertices(); ++z) {
        std::vector<double> hat(h.coarse.n_vertices(), 0.0);
        hat[z] = 1.0;
        auto corr = global_corrector(h, A_h, kb, hat, cg_tol);
        auto& dst = h.coarse.boundary_vertex[z] ? bnd_trips : trips;
        int col = h.coarse.boundary_vertex[z] ? boundary_col[z] : coarse_dofs.vertex_to_dof[z];
        for (int v = 0; v < static_cast<int>(corr.size()); ++v)
          if (corr[v] != 0.0) dst.push_back({v, col, -corr[v]});
      }
    } else {
      if (m < 1) throw std::invalid_argument("build_reduced_basis: m must be >= 1");
      detail::CorrectorSetup setup(h, A_h, kb);
      auto by_anc = detail::fine_tris_by_ancestor(h);
      std::vector<std::pair<int, double>> contrib;
      for (int t = 0; t < h.coarse.n_triangles(); ++t) {
        auto patch = setup.patches.patch(t, m);
        detail::PatchSolver solver(setup, patch);
        if (solver.empty()) continue;
        for (int v : h.coarse.triangles[t]) {
          contrib.clear();
          solver.solve_element_load(v, by_anc[t], cg_tol, contrib);
          auto& dst = h.coarse.boundary_vertex[v] ? bnd_trips : trips;
          int col = h.coarse.boundary_vertex[v] ? boundary_col[v] : coarse_dofs.vertex_to_dof[v];
          for (const auto& [fv, val] : contrib) dst.push_back({fv, col, -val});
        }
      }
    }
  }

  rb.R = SparseMatrix::from_triplets(h.fine.n_vertices(), coarse_dofs.n_dofs(), std::move(trips))
             .compressed(drop_tol);
  rb.R_boundary = SparseMatrix::from_triplets(h.fine.n_vertices(),
                                              static_cast<int>(rb.boundary_vertices.size()),
                                              std::move(bnd_trips))
                      .compressed(drop_tol);
  return rb;
}

inline ReducedBasis build_reduced_basis(const MeshHierarchy& h, const SparseMatrix& A_h, int m,
                                        double cg_tol = 1e-10, double drop_tol = 1e-14) {
  return build_reduced_basis(h, A_h, kernel_basis(h), m, cg_tol, drop_tol);
}

inline std::pair<SparseMatrix, SparseMatrix> reduced_matrices(const ReducedBasis& rb,
                                                              const SparseMatrix& A_h,
                                                              const SparseMatrix& M_h,
                                                              double drop_tol = 1e-14) {
  return {triple_product(rb.R, A_h, drop_tol), triple_product(rb.R, M_h, drop_tol)};
}

struct NnzReport {
  std::int64_t nnz_R = 0;
  std::int64_t nnz_A = 0;
  std::int64_t nnz_M = 0;
  double fill_ratio = 0.0;  // reduced mass vs coarse FEM mass
};

inline NnzReport nnz_report(const ReducedBasis& rb, const SparseMatrix& A_red,
                            const SparseMatrix& M_red, std::int64_t coarse_mass_nnz) {
  NnzReport rep;
  rep.nnz_R = rb.R.compressed(1e-14).nnz();
  rep.nnz_A = A_red.compressed(1e-14).nnz();
  rep.nnz_M = M_red.compressed(1e-14).nnz();
  rep.fill_ratio = coarse_mass_nnz > 0 ? static_cast<double>(rep.nnz_M) / coarse_mass_nnz : 0.0;
  return rep;
}

}  // namespace lodwave
