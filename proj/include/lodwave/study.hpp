#pragma once

// Batch experiment orchestration: study configuration (key=value files plus
// overrides), reproducible CSV emission, and the study commands behind the
// CLI subcommands.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lodwave/leapfrog.hpp"
#include "lodwave/problems.hpp"
#include "lodwave/reduced.hpp"

namespace lodwave {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StudyConfig {
  int level_first = 1;
  int level_last = 1;
  std::vector<SpaceTag> spaces = {SpaceTag::coarse, SpaceTag::reduced};
  bool m_paper = true;  // m = ceil(-0.5 log2 H) clamped to [1,3]
  int m_fixed = 2;
  double safety = 1.0;
  int quad_order = 5;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  // file-only knobs
  double mass_tol = 1e-10;
  double energy_mass_tol = 1e-13;  // conservation runs solve the mass system tighter
  double energy_T = 25.0;
  long long step_budget = 1000000;
  // spectrum mesh pair: a modest uniform coarse mesh, a block around the
  // re-entrant corner refined a few rounds, and the corner itself refined
  // deeper so the fine pencil's top eigenvalue stands clear of both
  int spectrum_base_refinements = 4;
  int spectrum_region_rounds = 2;
  int spectrum_corner_rounds = 6;

  int n_levels() const { return level_last - level_first + 1; }
  int m_for(double H) const { return m_paper ? patch_layers_for(H) : m_fixed; }
};

inline void validate(const StudyConfig& c) {
  if (c.level_first < 1 || c.level_last < c.level_first)
    throw config_error("levels must be a non-empty range starting at 1 or above");
  if (c.spaces.empty()) throw config_error("spaces must be non-empty");
  if (!(c.safety > 0.0 && c.safety <= 1.0)) throw config_error("safety must be in (0,1]");
  if (!c.m_paper && c.m_fixed < 1) throw config_error("fixed m must be >= 1");
  if (c.quad_order != 1 && c.quad_order != 2 && c.quad_order != 3 && c.quad_order != 5)
    throw config_error("quad_order must be one of 1,2,3,5");
}

inline std::pair<int, int> parse_level_range(const std::string& s) {
  auto pos = s.find("..");
  try {
    if (pos == std::string::npos) {
      int v = std::stoi(s);
      return {v, v};
    }
    return {std::stoi(s.substr(0, pos)), std::stoi(s.substr(pos + 2))};
  } catch (const std::exception&) {
    throw config_error("bad level range: " + s);
  }
}

inline std::vector<SpaceTag> parse_spaces(const std::string& s) {
  std::vector<SpaceTag> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(space_from_name(item));
    } catch (const std::exception&) {
      throw config_error("unknown space: " + item);
    }
  }
  if (out.empty()) throw config_error("empty spaces list");
  return out;
}

inline void apply_config_entry(StudyConfig& c, const std::string& key, const std::string& value) {
  try {
    if (key == "levels") {
      auto [a, b] = parse_level_range(value);
      c.level_first = a;
      c.level_last = b;
    } else if (key == "spaces") {
      c.spaces = parse_spaces(value);
    } else if (key == "m") {
      if (value == "paper") {
        c.m_paper = true;
      } else {
        c.m_paper = false;
        c.m_fixed = std::stoi(value);
      }
    } else if (key == "safety") {
      c.safety = std::stod(value);
    } else if (key == "quad_order") {
      c.quad_order = std::stoi(value);
    } else if (key == "out") {
      c.output_dir = value;
    } else if (key == "seed") {
      c.seed = std::stoull(value);
    } else if (key == "mass_tol") {
      c.mass_tol = std::stod(value);
    } else if (key == "energy_mass_tol") {
      c.energy_mass_tol = std::stod(value);
    } else if (key == "energy_T") {
      c.energy_T = std::stod(value);
    } else if (key == "step_budget") {
      c.step_budget = std::stoll(value);
    } else if (key == "spectrum_base_refinements") {
      c.spectrum_base_refinements = std::stoi(value);
    } else if (key == "spectrum_region_rounds") {
      c.spectrum_region_rounds = std::stoi(value);
    } else if (key == "spectrum_corner_rounds") {
      c.spectrum_corner_rounds = std::stoi(value);
    } else {
      throw config_error("unknown config key: " + key);
    }
  } catch (const config_error&) {
    throw;
  } catch (const std::exception&) {
    throw config_error("bad value for " + key + ": " + value);
  }
}

// Flat key=value file; '#' starts a comment, blank lines ignored.
inline void load_config_file(StudyConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    while (!value.empty() && (value.front() == ' ' || value.front() == '\t')) value.erase(0, 1);
    apply_config_entry(c, key, value);
  }
}

inline std::string canonical_config_string(const StudyConfig& c) {
  std::ostringstream os;
  os << "energy_T=" << c.energy_T << '\n'
     << "energy_mass_tol=" << c.energy_mass_tol << '\n'
     << "levels=" << c.level_first << ".." << c.level_last << '\n'
     << "m=" << (c.m_paper ? std::string("paper") : std::to_string(c.m_fixed)) << '\n'
     << "mass_tol=" << c.mass_tol << '\n'
     << "quad_order=" << c.quad_order << '\n'
     << "safety=" << c.safety << '\n'
     << "seed=" << c.seed << '\n'
     << "spaces=";
  for (std::size_t i = 0; i < c.spaces.size(); ++i)
    os << (i ? "," : "") << space_name(c.spaces[i]);
  os << '\n'
     << "spectrum_base_refinements=" << c.spectrum_base_refinements << '\n'
     << "spectrum_corner_rounds=" << c.spectrum_corner_rounds << '\n'
     << "spectrum_region_rounds=" << c.spectrum_region_rounds << '\n'
     << "step_budget=" << c.step_budget << '\n';
  return os.str();
}

inline std::uint64_t config_hash(const StudyConfig& c) {
  // FNV-1a over the canonical serialization
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical_config_string(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

// 17 significant digits, fixed scientific notation; golden-file friendly.
inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

// Writes through a temp file and renames, so partial runs never leave a
// half-written CSV behind.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

// ---------------------------------------------------------------------------
// study commands

struct RunRow {
  int level = 0;
  int ndof = 0;
  double dt = 0.0;
  long long n_steps = 0;
  SpaceTag space = SpaceTag::coarse;
  double accumulated_error = 0.0;
  std::int64_t nnz_mass = 0;
  double energy_drift = 0.0;
};

struct ConvergenceResult {
  std::vector<RunRow> rows;
  std::map<std::string, double> slopes;  // per space name
  std::vector<std::string> skipped;      // "level,space,reason"
};

namespace detail {

inline double loglog_slope(const std::vector<std::pair<double, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double n = static_cast<double>(pts.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline std::string run_csv(const LeapfrogRun& run) {
  std::ostringstream os;
  os << "step,time,energy,h1_error\n";
  for (int k = 1; k <= run.n_steps; ++k) {
    double energy = k - 1 < static_cast<int>(run.energies.size()) ? run.energies[k - 1] : 0.0;
    double err = k - 1 < static_cast<int>(run.step_errors.size()) ? run.step_errors[k - 1] : 0.0;
    os << k << ',' << csv_num(k * run.dt) << ',' << csv_num(energy) << ',' << csv_num(err) << '\n';
  }
  return os.str();
}

inline double energy_drift(const LeapfrogRun& run) {
  if (run.energies.empty()) return 0.0;
  double e0 = run.energies.front(), drift = 0.0;
  for (double e : run.energies) drift = std::max(drift, std::abs(e - e0));
  return std::abs(e0) > 0.0 ? drift / std::abs(e0) : drift;
}

// Shared per-level state for study loops: hierarchy, fine matrices, and
// space operators with the reduced basis reused by the lumped variant.
struct LevelWorkspace {
  WaveProblem problem;
  SparseMatrix A_h, M_h;
  double H = 0.0;
  int m = 0;

  LevelWorkspace(WaveProblem p, const StudyConfig& cfg) : problem(std::move(p)) {
    A_h = assemble_stiffness(problem.hierarchy.fine);
    M_h = assemble_mass(problem.hierarchy.fine);
    H = mesh_stats(problem.hierarchy.coarse).h_max;
    m = cfg.m_for(H);
  }

  SpaceOperators operators_for(SpaceTag tag) {
    if (tag == SpaceTag::reduced || tag == SpaceTag::reduced_lumped) {
      if (reduced_ops_.ndof == 0)
        reduced_ops_ = build_space_operators(problem.hierarchy, A_h, M_h, SpaceTag::reduced, m);
      SpaceOperators ops = reduced_ops_;
      ops.tag = tag;
      if (tag == SpaceTag::reduced_lumped) ops.lumped_mass = lump_mass(ops.M);
      return ops;
    }
    return build_space_operators(problem.hierarchy, A_h, M_h, tag, m);
  }

 private:
  SpaceOperators reduced_ops_;  // shared between reduced and reduced_lumped
};

}  // namespace detail

// The L-shape convergence study: one run per (level, space), summary rows,
// per-run CSVs, and least-squares log-log slopes per space.
inline ConvergenceResult cmd_convergence(const StudyConfig& cfg) {
  validate(cfg);
  ConvergenceResult result;
  std::map<std::string, std::vector<std::pair<double, double>>> err_by_space;
  const std::string hash = hash_hex(config_hash(cfg));
  std::filesystem::path outdir(cfg.output_dir);

  for (int level = cfg.level_first; level <= cfg.level_last; ++level) {
    detail::LevelWorkspace ws(lshape_problem(level), cfg);
    for (SpaceTag tag : cfg.spaces) {
      SpaceOperators ops = ws.operators_for(tag);
      RunOptions opt;
      opt.mass_tol = cfg.mass_tol;
      opt.error_quad_order = cfg.quad_order;
      double dt = resolve_timestep(ws.problem.hierarchy, ws.A_h, ws.M_h, ops,
                                   DtPolicy::auto_cfl(cfg.safety), opt);
      long long steps = static_cast<long long>(std::ceil(ws.problem.T_end / dt - 1e-12));
      if (steps > cfg.step_budget) {
        result.skipped.push_back(std::to_string(level) + "," + space_name(tag) +
                                 ",step budget exceeded (" + std::to_string(steps) + " steps)");
        continue;
      }
      LeapfrogRun run = WaveRunner(ws.problem, ws.A_h, ws.M_h, ops).run(dt, opt);
      RunRow row;
      row.level = level;
      row.ndof = ops.ndof;
      row.dt = dt;
      row.n_steps = run.n_steps;
      row.space = tag;
      row.accumulated_error = run.accumulated_error;
      row.nnz_mass =
          ops.use_lumped() ? static_cast<std::int64_t>(ops.lumped_mass.size()) : ops.M.nnz();
      row.energy_drift = detail::energy_drift(run);
      result.rows.push_back(row);
      err_by_space[space_name(tag)].push_back({double(ops.ndof), run.accumulated_error});
      write_file_atomic(outdir / ("run_L" + std::to_string(level) + "_" + space_name(tag) + ".csv"),
                        detail::run_csv(run));
    }
  }

  for (const auto& [name, pts] : err_by_space)
    if (pts.size() >= 2) result.slopes[name] = detail::loglog_slope(pts);

  std::ostringstream summary;
  summary << "level,ndof,dt,n_steps,space,accumulated_error,nnz_mass,config_hash\n";
  for (const auto& r : result.rows)
    summary << r.level << ',' << r.ndof << ',' << csv_num(r.dt) << ',' << r.n_steps << ','
            << space_name(r.space) << ',' << csv_num(r.accumulated_error) << ',' << r.nnz_mass
            << ',' << hash << '\n';
  write_file_atomic(outdir / "summary.csv", summary.str());

  std::ostringstream slopes;
  slopes << "space,slope,config_hash\n";
  for (const auto& [name, s] : result.slopes) slopes << name << ',' << csv_num(s) << ',' << hash << '\n';
  write_file_atomic(outdir / "slopes.csv", slopes.str());

  if (!result.skipped.empty()) {
    std::ostringstream sk;
    sk << "level,space,reason\n";
    for (const auto& s : result.skipped) sk << s << '\n';
    write_file_atomic(outdir / "skipped.csv", sk.str());
  }
  return result;
}

struct SpectrumResult {
  std::vector<double> fine, coarse, reduced;            // ascending eigenvalues
  std::vector<double> rel_err_coarse, rel_err_reduced;  // lowest modes vs fine
  MeshHierarchy hierarchy;
};

// Locally refined mesh pair for the eigenvalue study: a modest uniform
// coarse mesh; a block around the re-entrant corner refined a few rounds so
// the low modes feel the refinement; the corner itself refined deeper so
// h_min drops well below H.
inline MeshHierarchy spectrum_hierarchy(const StudyConfig& cfg) {
  Triangulation coarse = make_lshape_mesh();
  for (int i = 0; i < cfg.spectrum_base_refinements; ++i) coarse = uniform_refine(coarse).first;
  auto in_block = [](const Triangulation& m, int t) {
    Vec2 c = barycenter(m, t);
    return std::max(std::abs(c.x), std::abs(c.y)) <= 0.5;
  };
  auto [fine, anc1] = refine_where(coarse, in_block, cfg.spectrum_region_rounds);
  int corner = -1;
  for (int v = 0; v < fine.n_vertices(); ++v)
    if (norm(fine.vertices[v]) < 1e-12) corner = v;
  auto [fine2, anc2] = refine_at_vertex(fine, corner, cfg.spectrum_corner_rounds);
  std::vector<int> composed(anc2.size());
  for (std::size_t t = 0; t < anc2.size(); ++t) composed[t] = anc1[anc2[t]];
  return make_hierarchy(std::move(coarse), std::move(fine2), std::move(composed));
}

inline SpectrumResult cmd_spectrum(const StudyConfig& cfg, int dense_cap = 2500) {
  validate(cfg);
  MeshHierarchy h = spectrum_hierarchy(cfg);

  SparseMatrix A_h = assemble_stiffness(h.fine), M_h = assemble_mass(h.fine);
  DofMap df(h.fine);
  if (df.n_dofs() > dense_cap)
    throw solver_error("spectrum: fine dimension " + std::to_string(df.n_dofs()) +
                       " above dense cap " + std::to_string(dense_cap));
  double H = mesh_stats(h.coarse).h_max;

  SpectrumResult res;
  res.fine = full_spectrum(df.restrict_matrix(A_h), df.restrict_matrix(M_h), dense_cap);
  {
    SparseMatrix A_H = assemble_stiffness(h.coarse), M_H = assemble_mass(h.coarse);
    DofMap dc(h.coarse);
    res.coarse = full_spectrum(dc.restrict_matrix(A_H), dc.restrict_matrix(M_H), dense_cap);
  }
  {
    SpaceOperators ops = build_space_operators(h, A_h, M_h, SpaceTag::reduced, cfg.m_for(H));
    res.reduced = full_spectrum(ops.A, ops.M, dense_cap);
  }

  int n_modes = std::min<std::size_t>(10, std::min(res.coarse.size(), res.fine.size()));
  for (int k = 0; k < n_modes; ++k) {
    res.rel_err_coarse.push_back(std::abs(res.coarse[k] - res.fine[k]) / res.fine[k]);
    res.rel_err_reduced.push_back(std::abs(res.reduced[k] - res.fine[k]) / res.fine[k]);
  }

  const std::string hash = hash_hex(config_hash(cfg));
  std::filesystem::path outdir(cfg.output_dir);
  auto dump = [&](const std::string& name, const std::vector<double>& eig) {
    std::ostringstream os;
    os << "index,eigenvalue\n";
    for (std::size_t i = 0; i < eig.size(); ++i) os << i << ',' << csv_num(eig[i]) << '\n';
    write_file_atomic(outdir / ("spectrum_" + name + ".csv"), os.str());
  };
  dump("fine", res.fine);
  dump("coarse", res.coarse);
  dump("reduced", res.reduced);
  std::ostringstream os;
  os << "mode,fine,coarse,reduced,rel_err_coarse,rel_err_reduced,config_hash\n";
  for (int k = 0; k < n_modes; ++k)
    os << k << ',' << csv_num(res.fine[k]) << ',' << csv_num(res.coarse[k]) << ','
       << csv_num(res.reduced[k]) << ',' << csv_num(res.rel_err_coarse[k]) << ','
       << csv_num(res.rel_err_reduced[k]) << ',' << hash << '\n';
  write_file_atomic(outdir / "first_branch_errors.csv", os.str());
  res.hierarchy = std::move(h);
  return res;
}

struct CflRow {
  int level = 0;
  double dt = 0.0;
  double dt_h = 0.0;
  double ratio = 0.0;
};

inline std::vector<CflRow> cmd_cfl_table(const StudyConfig& cfg) {
  validate(cfg);
  std::vector<CflRow> rows;
  for (int level = cfg.level_first; level <= cfg.level_last; ++level) {
    MeshHierarchy h = lshape_hierarchy(level);
    DofMap dc(h.coarse), df(h.fine);
    SparseMatrix A_H = assemble_stiffness(h.coarse), M_H = assemble_mass(h.coarse);
    SparseMatrix A_h = assemble_stiffness(h.fine), M_h = assemble_mass(h.fine);
    CflRow row;
    row.level = level;
    row.dt = cfl_timestep(dc.restrict_matrix(A_H), dc.restrict_matrix(M_H));
    row.dt_h = cfl_timestep(df.restrict_matrix(A_h), df.restrict_matrix(M_h));
    row.ratio = row.dt_h / row.dt;
    rows.push_back(row);
  }
  const std::string hash = hash_hex(config_hash(cfg));
  std::ostringstream os;
  os << "level,dt,dt_h,ratio,config_hash\n";
  for (const auto& r : rows)
    os << r.level << ',' << csv_num(r.dt) << ',' << csv_num(r.dt_h) << ',' << csv_num(r.ratio)
       << ',' << hash << '\n';
  write_file_atomic(std::filesystem::path(cfg.output_dir) / "cfl_table.csv", os.str());
  return rows;
}

struct DecayRow {
  int m = 0;
  double energy_error = 0.0;  // ||grad(C hat - C_m hat)||
};

// Corrector localization error against the global corrector, for the coarse
// interior vertex nearest the re-entrant corner of the first level's graded
// hierarchy, m = 1 up to full coverage.
inline std::vector<DecayRow> cmd_corrector_decay(const StudyConfig& cfg) {
  validate(cfg);
  MeshHierarchy h = lshape_hierarchy(cfg.level_first);
  SparseMatrix A_h = assemble_stiffness(h.fine);
  DofMap dc(h.coarse);
  int z = -1;
  double best = 1e300;
  for (int v : dc.interior) {
    double d = norm(h.coarse.vertices[v]);
    if (d < best) {
      best = d;
      z = v;
    }
  }
  auto kb = kernel_basis(h);
  std::vector<double> hat(h.coarse.n_vertices(), 0.0);
  hat[z] = 1.0;
  auto global = global_corrector(h, A_h, kb, hat, 1e-12);

  // patch layers needed to cover the whole mesh from the elements at z
  detail::PatchFinder patches(h.coarse);
  std::vector<int> tris_at_z;
  for (int t = 0; t < h.coarse.n_triangles(); ++t)
    for (int v : h.coarse.triangles[t])
      if (v == z) tris_at_z.push_back(t);
  int cover_m = 1;
  while (true) {
    bool all = true;
    for (int t : tris_at_z)
      all &= static_cast<int>(patches.patch(t, cover_m).size()) == h.coarse.n_triangles();
    if (all) break;
    ++cover_m;
  }

  std::vector<DecayRow> rows;
  for (int m = 1; m <= cover_m; ++m) {
    std::vector<double> cm(h.fine.n_vertices(), 0.0);
    for (int t : tris_at_z) {
      auto ec = element_corrector(h, A_h, kb, t, z, m, 1e-12);
      axpy(1.0, ec, cm);
    }
    std::vector<double> diff = global;
    axpy(-1.0, cm, diff);
    rows.push_back({m, std::sqrt(dot(diff, A_h * diff))});
  }

  const std::string hash = hash_hex(config_hash(cfg));
  std::ostringstream os;
  os << "m,energy_error,config_hash\n";
  for (const auto& r : rows) os << r.m << ',' << csv_num(r.energy_error) << ',' << hash << '\n';
  write_file_atomic(std::filesystem::path(cfg.output_dir) / "corrector_decay.csv", os.str());
  return rows;
}

// Free-oscillation energy study: f = 0, g = 0, smooth initial displacement;
// reports the relative drift of the discrete energy per run.
inline ConvergenceResult cmd_energy(const StudyConfig& cfg) {
  validate(cfg);
  ConvergenceResult result;
  const std::string hash = hash_hex(config_hash(cfg));
  std::filesystem::path outdir(cfg.output_dir);
  for (int level = cfg.level_first; level <= cfg.level_last; ++level) {
    detail::LevelWorkspace ws(lshape_free_problem(level, cfg.energy_T), cfg);
    for (SpaceTag tag : cfg.spaces) {
      SpaceOperators ops = ws.operators_for(tag);
      RunOptions opt;
      opt.mass_tol = cfg.energy_mass_tol;
      double dt = resolve_timestep(ws.problem.hierarchy, ws.A_h, ws.M_h, ops,
                                   DtPolicy::auto_cfl(cfg.safety), opt);
      LeapfrogRun run = WaveRunner(ws.problem, ws.A_h, ws.M_h, ops).run(dt, opt);
      RunRow row;
      row.level = level;
      row.ndof = ops.ndof;
      row.dt = dt;
      row.n_steps = run.n_steps;
      row.space = tag;
      row.nnz_mass =
          ops.use_lumped() ? static_cast<std::int64_t>(ops.lumped_mass.size()) : ops.M.nnz();
      row.energy_drift = detail::energy_drift(run);
      result.rows.push_back(row);
      write_file_atomic(
          outdir / ("energy_L" + std::to_string(level) + "_" + space_name(tag) + ".csv"),
          detail::run_csv(run));
    }
  }
  std::ostringstream os;
  os << "level,ndof,dt,n_steps,space,energy_drift,config_hash\n";
  for (const auto& r : result.rows)
    os << r.level << ',' << r.ndof << ',' << csv_num(r.dt) << ',' << r.n_steps << ','
       << space_name(r.space) << ',' << csv_num(r.energy_drift) << ',' << hash << '\n';
  write_file_atomic(outdir / "energy_summary.csv", os.str());
  return result;
}

// Writes the coarse and graded fine meshes of each level in the text format.
inline void cmd_mesh(const StudyConfig& cfg) {
  validate(cfg);
  std::filesystem::path outdir(cfg.output_dir);
  for (int level = cfg.level_first; level <= cfg.level_last; ++level) {
    MeshHierarchy h = lshape_hierarchy(level);
    std::ostringstream oc, of;
    write_mesh_text(oc, h.coarse);
    write_mesh_text(of, h.fine);
    write_file_atomic(outdir / ("mesh_L" + std::to_string(level) + "_coarse.txt"), oc.str());
    write_file_atomic(outdir / ("mesh_L" + std::to_string(level) + "_fine.txt"), of.str());
  }
}

}  // namespace lodwave
