// Command-line driver for the L-shaped-domain wave studies.
//
// Subcommands: mesh, convergence, spectrum, cfl-table, corrector-decay,
// energy. Exit codes: 0 success, 2 config error, 3 solver failure,
// 4 instability guard.

#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "lodwave/lodwave.hpp"

namespace {

struct CommonFlags {
  std::string levels;
  std::string spaces;
  std::string m;
  double safety = -1.0;
  std::string out;
  std::string seed;
  std::string config_path;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--levels", flags.levels, "level range, e.g. 1..5 or 3");
  cmd->add_option("--spaces", flags.spaces,
                  "comma list of coarse,fine,reduced,reduced_lumped");
  cmd->add_option("--m", flags.m, "localization layers: an integer or 'paper'");
  cmd->add_option("--safety", flags.safety, "CFL safety factor in (0,1]");
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--seed", flags.seed, "seed recorded in the config hash");
  cmd->add_option("--config", flags.config_path, "key=value config file (flags win)");
}

lodwave::StudyConfig resolve_config(const CommonFlags& flags) {
  lodwave::StudyConfig cfg;
  if (!flags.config_path.empty()) lodwave::load_config_file(cfg, flags.config_path);
  if (!flags.levels.empty()) lodwave::apply_config_entry(cfg, "levels", flags.levels);
  if (!flags.spaces.empty()) lodwave::apply_config_entry(cfg, "spaces", flags.spaces);
  if (!flags.m.empty()) lodwave::apply_config_entry(cfg, "m", flags.m);
  if (flags.safety >= 0.0) cfg.safety = flags.safety;
  if (!flags.out.empty()) cfg.output_dir = flags.out;
  if (!flags.seed.empty()) lodwave::apply_config_entry(cfg, "seed", flags.seed);
  lodwave::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leapfrog wave solver with a corrector-reduced coarse space"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto* mesh_cmd = app.add_subcommand("mesh", "emit coarse/graded meshes in text format");
  auto* conv_cmd = app.add_subcommand("convergence", "L-shape convergence study");
  auto* spec_cmd = app.add_subcommand("spectrum", "eigenvalue spectra and first-branch errors");
  auto* cfl_cmd = app.add_subcommand("cfl-table", "coarse/fine CFL time-step table");
  auto* decay_cmd = app.add_subcommand("corrector-decay", "corrector localization error vs m");
  auto* energy_cmd = app.add_subcommand("energy", "free-oscillation energy conservation runs");
  for (auto* cmd : {mesh_cmd, conv_cmd, spec_cmd, cfl_cmd, decay_cmd, energy_cmd})
    add_common_flags(cmd, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    lodwave::StudyConfig cfg = resolve_config(flags);
    if (mesh_cmd->parsed()) {
      lodwave::cmd_mesh(cfg);
    } else if (conv_cmd->parsed()) {
      auto result = lodwave::cmd_convergence(cfg);
      for (const auto& [name, slope] : result.slopes)
        std::printf("%s slope: %.4f\n", name.c_str(), slope);
      for (const auto& s : result.skipped) std::printf("skipped: %s\n", s.c_str());
    } else if (spec_cmd->parsed()) {
      auto res = lodwave::cmd_spectrum(cfg);
      std::printf("fine max %.6e  coarse max %.6e  reduced max %.6e\n", res.fine.back(),
                  res.coarse.back(), res.reduced.back());
    } else if (cfl_cmd->parsed()) {
      auto rows = lodwave::cmd_cfl_table(cfg);
      for (const auto& r : rows)
        std::printf("level %d: dt %.6e dt_h %.6e ratio %.4f\n", r.level, r.dt, r.dt_h, r.ratio);
    } else if (decay_cmd->parsed()) {
      auto rows = lodwave::cmd_corrector_decay(cfg);
      for (const auto& r : rows) std::printf("m %d: %.6e\n", r.m, r.energy_error);
    } else if (energy_cmd->parsed()) {
      auto result = lodwave::cmd_energy(cfg);
      for (const auto& r : result.rows)
        std::printf("level %d %s: drift %.3e\n", r.level, lodwave::space_name(r.space),
                    r.energy_drift);
    }
  } catch (const lodwave::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const lodwave::instability_error& e) {
    std::fprintf(stderr, "instability guard: %s\n", e.what());
    return 4;
  } catch (const lodwave::solver_error& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
