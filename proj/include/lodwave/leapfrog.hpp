#pragma once

// Explicit leapfrog time stepping for the wave equation in four spatial
// discretisations: coarse FEM, fine FEM, the corrector-reduced space, and
// the reduced space with lumped mass. Supports CFL-derived step sizes,
// discrete energy tracking, inhomogeneous Dirichlet lifting, and error
// accumulation against analytic solutions.

#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "lodwave/assembly.hpp"
#include "lodwave/interp.hpp"
#include "lodwave/linsolve.hpp"
#include "lodwave/mesh.hpp"
#include "lodwave/reduced.hpp"
#include "lodwave/sparse.hpp"

namespace lodwave {

struct instability_error : std::runtime_error {
  int step = 0;
  double state_norm = 0.0;
  instability_error(const std::string& msg, int step_, double norm_)
      : std::runtime_error(msg), step(step_), state_norm(norm_) {}
};

using SpaceTimeFn = std::function<double(double, Vec2)>;
using SpaceTimeGradFn = std::function<Vec2(double, Vec2)>;
using TimeFn = std::function<double(double)>;

struct WaveProblem {
  MeshHierarchy hierarchy;
  SpaceTimeFn f;      // forcing; empty means zero
  SpaceTimeFn g;      // Dirichlet data; empty means homogeneous
  SpatialFn u0, v0;   // initial displacement / velocity; empty means zero
  double T_end = 0.5;
  SpaceTimeFn exact;  // optional analytic reference
  SpaceTimeGradFn exact_gradient;

  // Optional separable forms h(t, x) = time(t) * shape(x). When present they
  // replace per-step reassembly by scaling precomputed vectors.
  TimeFn f_time;
  SpatialFn f_shape;
  TimeFn g_time;
  SpatialFn g_shape;
  TimeFn exact_time;
  SpatialGradFn exact_grad_shape;

  bool has_exact() const { return static_cast<bool>(exact); }
};

enum class SpaceTag { coarse, fine, reduced, reduced_lumped };

inline const char* space_name(SpaceTag tag) {
  switch (tag) {
    case SpaceTag::coarse: return "coarse";
    case SpaceTag::fine: return "fine";
    case SpaceTag::reduced: return "reduced";
    case SpaceTag::reduced_lumped: return "reduced_lumped";
  }
  return "?";
}

inline SpaceTag space_from_name(const std::string& name) {
  if (name == "coarse") return SpaceTag::coarse;
  if (name == "fine") return SpaceTag::fine;
  if (name == "reduced") return SpaceTag::reduced;
  if (name == "reduced_lumped") return SpaceTag::reduced_lumped;
  throw std::invalid_argument("unknown space: " + name);
}

// A spatial discretisation presented as a basis over fine-mesh coefficients:
// column j of R holds basis function j, so all four spaces run through the
// same stepping machinery.
struct SpaceOperators {
  SpaceTag tag = SpaceTag::coarse;
  SparseMatrix R;                    // fine vertices x dofs
  SparseMatrix A;                    // Rt A_h R
  SparseMatrix M;                    // Rt M_h R
  std::vector<double> lumped_mass;   // row sums of M; used when tag == reduced_lumped
  std::vector<int> sample_vertices;  // mesh vertex per dof, for nodal sampling
  SparseMatrix lift_basis;           // fine vertices x boundary nodes, Dirichlet lift
  std::vector<int> lift_vertices;    // mesh vertex per lift column
  int ndof = 0;

  bool use_lumped() const { return tag == SpaceTag::reduced_lumped; }

  std::vector<double> mass_solve(const std::vector<double>& rhs, double tol) const {
    if (use_lumped()) {
      std::vector<double> x(rhs.size());
      for (std::size_t i = 0; i < rhs.size(); ++i) x[i] = rhs[i] / lumped_mass[i];
      return x;
    }
    auto [x, rep] = pcg_diag(M, rhs, tol);
    if (!rep.converged)
      throw solver_error("mass solve stalled at residual " +
                         std::to_string(rep.final_relative_residual));
    return x;
  }

  double mass_norm(const std::vector<double>& x) const {
    if (use_lumped()) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += lumped_mass[i] * x[i] * x[i];
      return std::sqrt(s);
    }
    return std::sqrt(dot(x, M * x));
  }
};

inline SpaceOperators build_space_operators(const MeshHierarchy& h, const SparseMatrix& A_h,
                                            const SparseMatrix& M_h, SpaceTag tag, int m = 2,
                                            double corrector_tol = 1e-10) {
  SpaceOperators ops;
  ops.tag = tag;
  std::vector<int> all_rows(h.fine.n_vertices());
  for (int i = 0; i < h.fine.n_vertices(); ++i) all_rows[i] = i;
  if (tag == SpaceTag::fine) {
    DofMap dofs(h.fine);
    ops.R = dofs.embedding_matrix();
    ops.sample_vertices = dofs.interior;
    for (int v = 0; v < h.fine.n_vertices(); ++v)
      if (h.fine.boundary_vertex[v]) ops.lift_vertices.push_back(v);
    std::vector<Triplet> trips;
    for (int j = 0; j < static_cast<int>(ops.lift_vertices.size()); ++j)
      trips.push_back({ops.lift_vertices[j], j, 1.0});
    ops.lift_basis = SparseMatrix::from_triplets(
        h.fine.n_vertices(), static_cast<int>(ops.lift_vertices.size()), std::move(trips));
  } else if (tag == SpaceTag::coarse) {
    DofMap dofs(h.coarse);
    SparseMatrix P = prolongation_matrix(h);
    ops.R = P.restricted(all_rows, dofs.interior);
    ops.sample_vertices = dofs.interior;  // coarse vertices keep their fine index
    for (int v = 0; v < h.coarse.n_vertices(); ++v)
      if (h.coarse.boundary_vertex[v]) ops.lift_vertices.push_back(v);
    ops.lift_basis = P.restricted(all_rows, ops.lift_vertices);
  } else {
    ReducedBasis rb = build_reduced_basis(h, A_h, m, corrector_tol);
    ops.R = std::move(rb.R);
    ops.sample_vertices = std::move(rb.coarse_dofs);
    ops.lift_basis = std::move(rb.R_boundary);
    ops.lift_vertices = std::move(rb.boundary_vertices);
  }
  ops.A = triple_product(ops.R, A_h);
  ops.M = triple_product(ops.R, M_h);
  if (tag == SpaceTag::reduced_lumped) ops.lumped_mass = lump_mass(ops.M);
  ops.ndof = ops.R.n_cols;
  return ops;
}

// dt = safety * sqrt(2) / C_inv with C_inv^2 the largest eigenvalue of the
// stiffness/mass pencil.
inline double cfl_timestep(const SparseMatrix& A, const SparseMatrix& M, double safety = 1.0,
                           double eig_tol = 1e-8) {
  if (!(safety > 0.0 && safety <= 1.0)) throw std::invalid_argument("cfl_timestep: safety in (0,1]");
  double lambda_max = max_generalized_eig(A, M, eig_tol);
  return safety * std::sqrt(2.0) / std::sqrt(lambda_max);
}

inline SparseMatrix diagonal_matrix(const std::vector<double>& d) {
  std::vector<Triplet> trips;
  trips.reserve(d.size());
  for (int i = 0; i < static_cast<int>(d.size()); ++i) trips.push_back({i, i, d[i]});
  return SparseMatrix::from_triplets(static_cast<int>(d.size()), static_cast<int>(d.size()),
                                     std::move(trips), true);
}

// One central-difference step: u_next = 2 u - u_prev + dt^2 M^{-1}(b - A u).
inline std::vector<double> leapfrog_step(const SparseMatrix& A, const SparseMatrix& M,
                                         const std::vector<double>& u_prev,
                                         const std::vector<double>& u_curr,
                                         const std::vector<double>& load_curr, double dt,
                                         double mass_tol = 1e-10) {
  std::vector<double> rhs = load_curr;
  std::vector<double> Au = A * u_curr;
  axpy(-1.0, Au, rhs);
  auto [a, rep] = pcg_diag(M, rhs, mass_tol);
  if (!rep.converged)
    throw solver_error("leapfrog mass solve stalled at residual " +
                       std::to_string(rep.final_relative_residual));
  std::vector<double> u_next(u_curr.size());
  for (std::size_t i = 0; i < u_curr.size(); ++i)
    u_next[i] = 2.0 * u_curr[i] - u_prev[i] + dt * dt * a[i];
  return u_next;
}

inline std::vector<double> leapfrog_step(const SparseMatrix& A, const std::vector<double>& lumped,
                                         const std::vector<double>& u_prev,
                                         const std::vector<double>& u_curr,
                                         const std::vector<double>& load_curr, double dt) {
  std::vector<double> Au = A * u_curr;
  std::vector<double> u_next(u_curr.size());
  for (std::size_t i = 0; i < u_curr.size(); ++i)
    u_next[i] = 2.0 * u_curr[i] - u_prev[i] + dt * dt * (load_curr[i] - Au[i]) / lumped[i];
  return u_next;
}

// E^{n+1/2} = 1/2 ( ||(u^{n+1}-u^n)/dt||_M^2 + u^n . A u^{n+1} )
inline double discrete_energy(const SparseMatrix& A, const SparseMatrix& M,
                              const std::vector<double>& u_n, const std::vector<double>& u_np1,
                              double dt) {
  std::vector<double> v(u_n.size());
  for (std::size_t i = 0; i < u_n.size(); ++i) v[i] = (u_np1[i] - u_n[i]) / dt;
  return 0.5 * (dot(v, M * v) + dot(u_n, A * u_np1));
}

inline double discrete_energy(const SparseMatrix& A, const std::vector<double>& lumped,
                              const std::vector<double>& u_n, const std::vector<double>& u_np1,
                              double dt) {
  double kinetic = 0.0;
  for (std::size_t i = 0; i < u_n.size(); ++i) {
    double v = (u_np1[i] - u_n[i]) / dt;
    kinetic += lumped[i] * v * v;
  }
  return 0.5 * (kinetic + dot(u_n, A * u_np1));
}

struct DtPolicy {
  enum class Kind { auto_cfl, explicit_dt } kind = Kind::auto_cfl;
  double safety = 1.0;
  double dt = 0.0;

  static DtPolicy auto_cfl(double safety = 1.0) { return {Kind::auto_cfl, safety, 0.0}; }
  static DtPolicy explicit_dt(double dt) { return {Kind::explicit_dt, 1.0, dt}; }
};

struct RunOptions {
  double mass_tol = 1e-10;  // relative residual of per-step mass solves
  int error_quad_order = 5;
  bool store_trajectory = false;
  double blowup_factor = 1e8;
  double eig_tol = 1e-8;
  bool check_relaxed_cfl = true;  // cap dt at the reduced pencil's own bound
};

struct LeapfrogRun {
  SpaceTag space = SpaceTag::coarse;
  double dt = 0.0;
  int n_steps = 0;
  int ndof = 0;
  std::vector<double> energies;     // E^{n+1/2} for n = 0..N-1
  std::vector<double> step_errors;  // H1-seminorm errors at t_k, k = 1..N
  double accumulated_error = 0.0;   // sum_k dt * step_errors[k]
  std::vector<std::vector<double>> trajectory;  // states, only when requested
};

namespace detail {

// Per-triangle moments of a separable exact gradient: with grad u(t,x) =
// c(t) G(x) and elementwise-constant grad u_h, the squared error splits as
// |T| |grad u_h|^2 - 2 c (grad u_h . int_T G) + c^2 int_T |G|^2.
struct SeparableErrorTables {
  std::vector<Vec2> first_moment;
  std::vector<double> second_moment;

  SeparableErrorTables(const Triangulation& mesh, const SpatialGradFn& G, int quad_order) {
    const auto& rule = triangle_quadrature(quad_order);
    first_moment.resize(mesh.n_triangles());
    second_moment.resize(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      const auto& tri = mesh.triangles[t];
      Vec2 p0 = mesh.vertices[tri[0]], p1 = mesh.vertices[tri[1]], p2 = mesh.vertices[tri[2]];
      double area = signed_area(p0, p1, p2);
      Vec2 m{0.0, 0.0};
      double s = 0.0;
      for (const auto& qp : rule) {
        Vec2 x = qp.bary[0] * p0 + qp.bary[1] * p1 + qp.bary[2] * p2;
        Vec2 g = G(x);
        m = m + (area * qp.weight) * g;
        s += area * qp.weight * dot(g, g);
      }
      first_moment[t] = m;
      second_moment[t] = s;
    }
  }

  double error(const Triangulation& mesh, const std::vector<double>& coeffs, double c) const {
    std::array<Vec2, 3> grad;
    double err2 = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      double area = p1_gradients(mesh, t, grad);
      const auto& tri = mesh.triangles[t];
      Vec2 gh{0.0, 0.0};
      for (int i = 0; i < 3; ++i) gh = gh + coeffs[tri[i]] * grad[i];
      err2 += area * dot(gh, gh) - 2.0 * c * dot(gh, first_moment[t]) + c * c * second_moment[t];
    }
    return std::sqrt(std::max(err2, 0.0));
  }
};

}  // namespace detail

// Drives one leapfrog integration. The fine-space matrices are shared with
// the caller so several spaces can reuse one assembly.
class WaveRunner {
 public:
  WaveRunner(const WaveProblem& problem, const SparseMatrix& A_h, const SparseMatrix& M_h,
             const SpaceOperators& ops)
      : p_(&problem), A_h_(&A_h), M_h_(&M_h), ops_(&ops) {}

  // Boundary lift in fine coefficients from nodal Dirichlet data. The lift
  // basis is per space: fine boundary hats, coarse boundary hats, or
  // corrected coarse boundary hats for the reduced spaces.
  std::vector<double> lift_shape(const SpatialFn& g_spatial) const {
    const auto& fine = p_->hierarchy.fine;
    std::vector<double> gb(ops_->lift_vertices.size());
    for (std::size_t j = 0; j < ops_->lift_vertices.size(); ++j)
      gb[j] = g_spatial(fine.vertices[ops_->lift_vertices[j]]);
    return ops_->lift_basis * gb;
  }

  std::vector<double> lift_at(double t) const {
    return lift_shape([&](Vec2 x) { return p_->g(t, x); });
  }

  // U0 samples u0 nodally; U1 samples the exact solution at dt when there is
  // one, otherwise takes a second-order Taylor step.
  std::pair<std::vector<double>, std::vector<double>> initial_states(double dt,
                                                                     double mass_tol = 1e-10) const {
    const auto& fine = p_->hierarchy.fine;
    std::vector<double> U0(ops_->ndof, 0.0), U1(ops_->ndof, 0.0);
    if (p_->u0)
      for (int j = 0; j < ops_->ndof; ++j) U0[j] = p_->u0(fine.vertices[ops_->sample_vertices[j]]);
    if (p_->has_exact()) {
      for (int j = 0; j < ops_->ndof; ++j)
        U1[j] = p_->exact(dt, fine.vertices[ops_->sample_vertices[j]]);
      return {std::move(U0), std::move(U1)};
    }
    std::vector<double> V0(ops_->ndof, 0.0);
    if (p_->v0)
      for (int j = 0; j < ops_->ndof; ++j) V0[j] = p_->v0(fine.vertices[ops_->sample_vertices[j]]);
    std::vector<double> rhs(ops_->ndof, 0.0);
    if (p_->f)
      rhs = ops_->R.multiply_transpose(
          assemble_load(fine, [&](Vec2 x) { return p_->f(0.0, x); }, 2));
    std::vector<double> AU0 = ops_->A * U0;
    axpy(-1.0, AU0, rhs);
    if (p_->g) {
      std::vector<double> L0 = lift_at(0.0), Lp = lift_at(dt), Lm = lift_at(-dt);
      std::vector<double> d2(L0.size());
      for (std::size_t i = 0; i < L0.size(); ++i) d2[i] = (Lp[i] - 2.0 * L0[i] + Lm[i]) / (dt * dt);
      auto lift_load = ops_->R.multiply_transpose((*A_h_) * L0);
      axpy(-1.0, lift_load, rhs);
      auto lift_acc = ops_->R.multiply_transpose((*M_h_) * d2);
      axpy(-1.0, lift_acc, rhs);
    }
    auto a0 = ops_->mass_solve(rhs, mass_tol);
    for (int j = 0; j < ops_->ndof; ++j) U1[j] = U0[j] + dt * V0[j] + 0.5 * dt * dt * a0[j];
    return {std::move(U0), std::move(U1)};
  }

  LeapfrogRun run(double dt, const RunOptions& opt = {}) const {
    validate_consistency();
    const auto& h = p_->hierarchy;
    const int N = static_cast<int>(std::ceil(p_->T_end / dt - 1e-12));
    LeapfrogRun out;
    out.space = ops_->tag;
    out.dt = dt;
    out.n_steps = N;
    out.ndof = ops_->ndof;

    const bool f_separable = static_cast<bool>(p_->f_shape);
    const bool g_separable = static_cast<bool>(p_->g_shape);
    const bool err_separable = static_cast<bool>(p_->exact_grad_shape);

    // precomputed shapes for the separable paths
    std::vector<double> load_shape;  // Rt F_shape
    if (p_->f && f_separable)
      load_shape = ops_->R.multiply_transpose(assemble_load(h.fine, p_->f_shape, 2));
    std::vector<double> lift_fine_shape, lift_stiff_shape, lift_mass_shape;
    if (p_->g && g_separable) {
      lift_fine_shape = lift_shape(p_->g_shape);
      lift_stiff_shape = ops_->R.multiply_transpose((*A_h_) * lift_fine_shape);
      lift_mass_shape = ops_->R.multiply_transpose((*M_h_) * lift_fine_shape);
    }
    const detail::SeparableErrorTables* err_tables = nullptr;
    std::unique_ptr<detail::SeparableErrorTables> err_tables_storage;
    if (p_->has_exact() && err_separable) {
      err_tables_storage = std::make_unique<detail::SeparableErrorTables>(
          h.fine, p_->exact_grad_shape, opt.error_quad_order);
      err_tables = err_tables_storage.get();
    }

    auto load_at = [&](double t) -> std::vector<double> {
      if (!p_->f) return std::vector<double>(ops_->ndof, 0.0);
      if (f_separable) {
        std::vector<double> b = load_shape;
        double c = p_->f_time(t);
        for (double& v : b) v *= c;
        return b;
      }
      return ops_->R.multiply_transpose(
          assemble_load(h.fine, [&](Vec2 x) { return p_->f(t, x); }, 2));
    };

    auto reconstruct = [&](const std::vector<double>& U, double t) {
      std::vector<double> x = ops_->R * U;
      if (p_->g) {
        if (g_separable) {
          double c = p_->g_time(t);
          axpy(c, lift_fine_shape, x);
        } else {
          auto L = lift_at(t);
          axpy(1.0, L, x);
        }
      }
      return x;
    };

    auto step_error = [&](const std::vector<double>& U, double t) -> double {
      if (!p_->has_exact()) return 0.0;
      auto x = reconstruct(U, t);
      if (err_tables) return err_tables->error(h.fine, x, p_->exact_time(t));
      return h1_seminorm_error(h.fine, x,
                               [&](Vec2 q) { return p_->exact_gradient(t, q); },
                               opt.error_quad_order);
    };

    auto [U_prev, U_curr] = initial_states(dt, opt.mass_tol);
    const double initial_norm = ops_->mass_norm(U_prev);
    const double blowup_cap = opt.blowup_factor * (1.0 + initial_norm);

    out.energies.push_back(energy(U_prev, U_curr, dt));
    if (p_->has_exact()) out.step_errors.push_back(step_error(U_curr, dt));
    if (opt.store_trajectory) {
      out.trajectory.push_back(U_prev);
      out.trajectory.push_back(U_curr);
    }

    for (int n = 1; n < N; ++n) {
      const double t_n = n * dt;
      std::vector<double> rhs = load_at(t_n);
      std::vector<double> AU = ops_->A * U_curr;
      axpy(-1.0, AU, rhs);
      if (p_->g) {
        if (g_separable) {
          double c = p_->g_time(t_n);
          double d2 = (p_->g_time(t_n + dt) - 2.0 * p_->g_time(t_n) + p_->g_time(t_n - dt)) /
                      (dt * dt);
          axpy(-c, lift_stiff_shape, rhs);
          axpy(-d2, lift_mass_shape, rhs);
        } else {
          auto L = lift_at(t_n);
          auto Lp = lift_at(t_n + dt);
          auto Lm = lift_at(t_n - dt);
          std::vector<double> d2(L.size());
          for (std::size_t i = 0; i < L.size(); ++i)
            d2[i] = (Lp[i] - 2.0 * L[i] + Lm[i]) / (dt * dt);
          auto lift_load = ops_->R.multiply_transpose((*A_h_) * L);
          axpy(-1.0, lift_load, rhs);
          auto lift_acc = ops_->R.multiply_transpose((*M_h_) * d2);
          axpy(-1.0, lift_acc, rhs);
        }
      }
      auto a = ops_->mass_solve(rhs, opt.mass_tol);
      std::vector<double> U_next(ops_->ndof);
      for (int j = 0; j < ops_->ndof; ++j)
        U_next[j] = 2.0 * U_curr[j] - U_prev[j] + dt * dt * a[j];

      out.energies.push_back(energy(U_curr, U_next, dt));
      if (p_->has_exact()) out.step_errors.push_back(step_error(U_next, t_n + dt));
      if (opt.store_trajectory) out.trajectory.push_back(U_next);

      double state_norm = ops_->mass_norm(U_next);
      if (!(state_norm <= blowup_cap))
        throw instability_error("leapfrog state norm " + std::to_string(state_norm) +
                                    " exceeded guard at step " + std::to_string(n + 1),
                                n + 1, state_norm);
      U_prev = std::move(U_curr);
      U_curr = std::move(U_next);
    }

    for (double e : out.step_errors) out.accumulated_error += dt * e;
    return out;
  }

 private:
  double energy(const std::vector<double>& u_n, const std::vector<double>& u_np1, double dt) const {
    return ops_->use_lumped() ? discrete_energy(ops_->A, ops_->lumped_mass, u_n, u_np1, dt)
                              : discrete_energy(ops_->A, ops_->M, u_n, u_np1, dt);
  }

  void validate_consistency() const {
    if (!(p_->T_end > 0.0)) throw std::invalid_argument("WaveProblem: T_end must be positive");
    if (p_->g && p_->u0) {
      const auto& fine = p_->hierarchy.fine;
      for (int v = 0; v < fine.n_vertices(); ++v)
        if (fine.boundary_vertex[v] &&
            std::abs(p_->g(0.0, fine.vertices[v]) - p_->u0(fine.vertices[v])) > 1e-10)
          throw std::invalid_argument("WaveProblem: g(0) inconsistent with u0 on the boundary");
    }
  }

  const WaveProblem* p_;
  const SparseMatrix* A_h_;
  const SparseMatrix* M_h_;
  const SpaceOperators* ops_;
};

// Resolves the time step for a space: the coarse-FEM CFL value for the
// coarse-based spaces and the fine-FEM value for the fine space. Reduced
// spaces additionally verify their own pencil admits this dt and shrink to
// 0.99x their bound otherwise.
inline double resolve_timestep(const MeshHierarchy& h, const SparseMatrix& A_h,
                               const SparseMatrix& M_h, const SpaceOperators& ops,
                               const DtPolicy& policy, const RunOptions& opt = {}) {
  if (policy.kind == DtPolicy::Kind::explicit_dt) return policy.dt;
  double dt = 0.0;
  if (ops.tag == SpaceTag::fine) {
    DofMap dofs(h.fine);
    dt = cfl_timestep(dofs.restrict_matrix(A_h), dofs.restrict_matrix(M_h), policy.safety,
                      opt.eig_tol);
  } else {
    DofMap dofs(h.coarse);
    SparseMatrix A_H = assemble_stiffness(h.coarse);
    SparseMatrix M_H = assemble_mass(h.coarse);
    dt = cfl_timestep(dofs.restrict_matrix(A_H), dofs.restrict_matrix(M_H), policy.safety,
                      opt.eig_tol);
  }
  if ((ops.tag == SpaceTag::reduced || ops.tag == SpaceTag::reduced_lumped) &&
      opt.check_relaxed_cfl) {
    double own_bound = ops.use_lumped()
                           ? cfl_timestep(ops.A, diagonal_matrix(ops.lumped_mass), 1.0, opt.eig_tol)
                           : cfl_timestep(ops.A, ops.M, 1.0, opt.eig_tol);
    if (dt > own_bound) {
      std::fprintf(stderr,
                   "warning: coarse CFL dt %.3e exceeds reduced-space bound %.3e; shrinking\n", dt,
                   own_bound);
      dt = 0.99 * own_bound;
    }
  }
  return dt;
}

// Convenience wrapper assembling everything for a single run.
inline LeapfrogRun run_wave(const WaveProblem& problem, SpaceTag tag, const DtPolicy& policy,
                            int m = 2, const RunOptions& opt = {}) {
  SparseMatrix A_h = assemble_stiffness(problem.hierarchy.fine);
  SparseMatrix M_h = assemble_mass(problem.hierarchy.fine);
  SpaceOperators ops = build_space_operators(problem.hierarchy, A_h, M_h, tag, m);
  double dt = resolve_timestep(problem.hierarchy, A_h, M_h, ops, policy, opt);
  return WaveRunner(problem, A_h, M_h, ops).run(dt, opt);
}

}  // namespace lodwave
