// Command-line driver: build, verify, stats, certificate, render.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "treelike/inverse_limit.hpp"
#include "treelike/render.hpp"
#include "treelike/serialize.hpp"
#include "treelike/tent.hpp"
#include "treelike/verify.hpp"

using namespace treelike;

namespace {

TowerOptions tower_options(const std::string& cache, bool quiet) {
  TowerOptions opts;
  opts.cache_dir = cache.empty() ? default_cache_dir() : std::filesystem::path(cache);
  if (!quiet) opts.log = [](const std::string& msg) { std::cerr << msg << '\n'; };
  return opts;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact construction of a tree-like continuum with a fixed-point-free self-map"};
  app.require_subcommand(1);
  app.fallthrough();
  int level = 0;
  std::string cache;
  bool quiet = false;
  app.add_option("--cache", cache, "cache directory (default $TREELIKE_CACHE_DIR or .treelike-cache)");
  app.add_flag("-q,--quiet", quiet, "no progress messages on stderr");

  auto* build = app.add_subcommand("build", "construct the tower to a level and cache every level");
  build->add_option("--level", level, "highest level N")->required()->check(CLI::NonNegativeNumber);

  auto* verify = app.add_subcommand("verify", "run verification passes; exit code 0 iff all pass");
  std::string check = "all", mutation;
  int mutation_level = 1;
  verify->add_option("--level", level, "highest level N")->required()->check(CLI::NonNegativeNumber);
  verify->add_option("--check", check, "commute|coincidence|gamma|valence|all")
      ->check(CLI::IsMember({"commute", "coincidence", "gamma", "valence", "all"}));
  verify->add_option("--inject-mutation", mutation, "perturb one ruled-value row")
      ->check(CLI::IsMember(mutation_names()));
  verify->add_option("--mutation-level", mutation_level, "level whose table is perturbed")
      ->check(CLI::NonNegativeNumber);

  auto* stats = app.add_subcommand("stats", "per-level counts, epsilon_n and delta_n");
  stats->add_option("--level", level, "highest level N")->required()->check(CLI::NonNegativeNumber);

  auto* cert = app.add_subcommand("certificate", "displacement certificate for the induced map");
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  cert->add_option("--level", level, "thread height N")->required()->check(CLI::PositiveNumber);
  cert->add_option("--samples", samples, "number of random threads")->required();
  cert->add_option("--seed", seed, "generator seed");

  auto* render = app.add_subcommand("render", "write an SVG figure");
  std::string what, output;
  render->add_option("what", what, "tree|gamma|maps")->required()->check(CLI::IsMember({"tree", "gamma", "maps"}));
  render->add_option("--level", level, "level n")->required()->check(CLI::NonNegativeNumber);
  render->add_option("-o,--output", output, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) {
      const Tower tower = build_tower(level, tower_options(cache, quiet));
      nlohmann::json levels = nlohmann::json::array();
      for (const auto& l : tower.levels)
        levels.push_back({{"n", l.n}, {"gamma_points", l.gamma.point_count()},
                          {"f_breakpoints", l.f.breakpoint_count()}, {"g_breakpoints", l.g.breakpoint_count()}});
      std::cout << nlohmann::json{{"built", tower.height()}, {"levels", levels}}.dump(2) << '\n';
      return 0;
    }
    if (*verify) {
      VerifyOptions opts;
      opts.level = level;
      opts.checks = parse_checks(check);
      opts.tower = tower_options(cache, quiet);
      opts.mutation = mutation;
      opts.mutation_level = mutation_level;
      const VerifyOutcome outcome = run_verify(opts);
      std::cout << outcome.json.dump(2) << '\n';
      return outcome.ok() ? 0 : 1;
    }
    if (*stats) {
      const Tower tower = build_tower(level, tower_options(cache, quiet));
      nlohmann::json levels = nlohmann::json::array();
      for (const auto& l : tower.levels) {
        const MapDistance d = min_map_distance(l.f, l.g);
        levels.push_back({{"n", l.n},
                          {"triods", triod_count(l.n)},
                          {"epsilon", epsilon(l.n).str()},
                          {"gamma_arcs", l.gamma.arcs.size()},
                          {"gamma_points", l.gamma.point_count()},
                          {"f_breakpoints", l.f.breakpoint_count()},
                          {"g_breakpoints", l.g.breakpoint_count()},
                          {"delta", d.value.str()},
                          {"delta_witness", d.witness.str()}});
      }
      std::cout << nlohmann::json{{"levels", levels}}.dump(2) << '\n';
      return 0;
    }
    if (*cert) {
      const Tower tower = build_tower(level - 1, tower_options(cache, quiet));
      const Certificate c = displacement_certificate(tower, level, samples, seed);
      std::cout << to_json(c).dump(2) << '\n';
      return c.ok() ? 0 : 1;
    }
    if (*render) {
      std::string svg;
      if (what == "tree") {
        svg = render_tree(level);
      } else {
        const Tower tower = build_tower(level, tower_options(cache, quiet));
        svg = what == "gamma" ? render_gamma(tower.at(level).gamma)
                              : render_maps(level, tower.at(level).f, tower.at(level).g);
      }
      write_file(output, svg);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
