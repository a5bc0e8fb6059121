#pragma once

// The L-shaped-domain benchmark: uniform coarse meshes, corner-graded fine
// meshes, and the wave problem driven by the first singular Laplace mode.

#include <cmath>
#include <numbers>

#include "lodwave/leapfrog.hpp"
#include "lodwave/mesh.hpp"

namespace lodwave {

// Polar angle measured from the positive x axis, increasing through the
// upper half plane; the re-entrant edges of the L-shape sit at 0 and 3*pi/2.
inline double lshape_angle(Vec2 p) {
  double th = std::atan2(p.y, p.x);
  if (th < 0.0) th += 2.0 * std::numbers::pi;
  return th;
}

// phi = r^(2/3) sin(2 theta / 3): harmonic, zero on both re-entrant edges,
// with the generic corner singularity of the L-shape.
inline double singular_mode(Vec2 p) {
  double r2 = dot(p, p);
  if (r2 == 0.0) return 0.0;
  return std::pow(r2, 1.0 / 3.0) * std::sin(2.0 * lshape_angle(p) / 3.0);
}

inline Vec2 singular_mode_gradient(Vec2 p) {
  double r = norm(p);
  if (r == 0.0) return {0.0, 0.0};
  double th = lshape_angle(p);
  double dr = (2.0 / 3.0) * std::pow(r, -1.0 / 3.0) * std::sin(2.0 * th / 3.0);
  double dth = (2.0 / 3.0) * std::pow(r, -1.0 / 3.0) * std::cos(2.0 * th / 3.0);
  double c = std::cos(th), s = std::sin(th);
  return {dr * c - dth * s, dr * s + dth * c};
}

struct LshapeOptions {
  int base_refinements = 6;  // uniform bisections applied before level 1
  double T_end = 0.5;
  // Grading strength: h_min ~ H^(1/alpha). 1/2 halves the fine CFL step per
  // level, matching the benchmark's step-size trend; 2/3 would be the
  // weakest grading that still restores the optimal rate, but its corner
  // depth advances on the bisection ladder only every other level.
  double alpha = 0.5;
  int grade_generation_cap = 60;
};

// Coarse mesh of level ell: the 12-triangle L-shape after base+ell-1 uniform
// bisection sweeps. h_max shrinks by sqrt(2) per level.
inline Triangulation lshape_coarse_mesh(int level, const LshapeOptions& opt = {}) {
  if (level < 1) throw std::invalid_argument("lshape_coarse_mesh: level must be >= 1");
  Triangulation mesh = make_lshape_mesh();
  for (int i = 0; i < opt.base_refinements + level - 1; ++i) mesh = uniform_refine(mesh).first;
  return mesh;
}

inline MeshHierarchy lshape_hierarchy(int level, const LshapeOptions& opt = {}) {
  Triangulation coarse = lshape_coarse_mesh(level, opt);
  double H = mesh_stats(coarse).h_max;
  auto [fine, ancestry] =
      grade_toward_corner_with_ancestry(coarse, {0.0, 0.0}, H, opt.alpha, opt.grade_generation_cap);
  return make_hierarchy(std::move(coarse), std::move(fine), std::move(ancestry));
}

// Localization parameter m = ceil(-0.5 log2(H)), clamped to [1, 3].
inline int patch_layers_for(double H) {
  int m = static_cast<int>(std::ceil(-0.5 * std::log2(H)));
  return std::max(1, std::min(3, m));
}

// u(t,x) = sin(pi t) phi(x); phi is harmonic, so f = -pi^2 sin(pi t) phi.
inline WaveProblem lshape_problem(int level, const LshapeOptions& opt = {}) {
  WaveProblem p;
  p.hierarchy = lshape_hierarchy(level, opt);
  p.T_end = opt.T_end;
  const double pi = std::numbers::pi;
  auto sin_t = [pi](double t) { return std::sin(pi * t); };

  p.f = [pi, sin_t](double t, Vec2 x) { return -pi * pi * sin_t(t) * singular_mode(x); };
  p.f_time = sin_t;
  p.f_shape = [pi](Vec2 x) { return -pi * pi * singular_mode(x); };

  p.g = [sin_t](double t, Vec2 x) { return sin_t(t) * singular_mode(x); };
  p.g_time = sin_t;
  p.g_shape = [](Vec2 x) { return singular_mode(x); };

  p.u0 = [](Vec2) { return 0.0; };
  p.v0 = [pi](Vec2 x) { return pi * singular_mode(x); };

  p.exact = [sin_t](double t, Vec2 x) { return sin_t(t) * singular_mode(x); };
  p.exact_gradient = [sin_t](double t, Vec2 x) { return sin_t(t) * singular_mode_gradient(x); };
  p.exact_time = sin_t;
  p.exact_grad_shape = [](Vec2 x) { return singular_mode_gradient(x); };
  return p;
}

// Free oscillation on the same hierarchy: f = 0, g = 0, smooth initial
// displacement vanishing on the boundary. Used for energy-conservation runs.
inline WaveProblem lshape_free_problem(int level, double T_end, const LshapeOptions& opt = {}) {
  WaveProblem p;
  LshapeOptions o = opt;
  o.T_end = T_end;
  p.hierarchy = lshape_hierarchy(level, o);
  p.T_end = T_end;
  const double pi = std::numbers::pi;
  p.u0 = [pi](Vec2 x) { return std::sin(pi * x.x) * std::sin(pi * x.y); };
  return p;
}

}  // namespace lodwave
