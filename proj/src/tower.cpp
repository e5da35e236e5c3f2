#include "treelike/tower.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "treelike/serialize.hpp"

namespace treelike {

namespace fs = std::filesystem;

const TowerLevel& Tower::at(int n) const {
  if (n < 0 || n > height())
    throw std::out_of_range("level " + std::to_string(n) + " not built (height " + std::to_string(height()) + ")");
  return levels[static_cast<std::size_t>(n)];
}

fs::path default_cache_dir() {
  if (const char* env = std::getenv("TREELIKE_CACHE_DIR"); env != nullptr && *env != '\0') return fs::path(env);
  return fs::path(".treelike-cache");
}

fs::path level_file(const fs::path& dir, int n) { return dir / ("level_" + std::to_string(n) + ".json"); }

void write_level(const fs::path& dir, const TowerLevel& level) {
  fs::create_directories(dir);
  const nlohmann::json j{{"n", level.n}, {"gamma", to_json(level.gamma)}, {"f", to_json(level.f)},
                         {"g", to_json(level.g)}, {"verified", true}};
  // write then rename so a crash never leaves a truncated cache file
  const fs::path target = level_file(dir, level.n);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << dump(j);
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::optional<TowerLevel> read_level(const fs::path& dir, int n) {
  const fs::path file = level_file(dir, n);
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(file.string() + ": " + e.what());
  }
  try {
    if (j.at("n").get<int>() != n) throw FormatError(file.string() + ": wrong level");
    if (!j.at("verified").get<bool>()) throw FormatError(file.string() + ": level was never verified");
    return TowerLevel{n, gamma_from_json(j.at("gamma"), n), map_from_json(j.at("f"), n + 1, n),
                      map_from_json(j.at("g"), n + 1, n)};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(file.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(file.string() + ": " + e.what());
  }
}

namespace {

void require(const CheckReport& report, int n, const std::string& what) {
  if (const CheckEntry* bad = report.first_failure())
    throw ConstructionError("level " + std::to_string(n) + ": " + what + " failed at " + bad->name + ": " + bad->detail);
}

}  // namespace

Tower build_tower(int N, const TowerOptions& options) {
  if (N < 0) throw DomainError("tower height must be non-negative");
  auto log = [&options](const std::string& msg) {
    if (options.log) options.log(msg);
  };
  const bool cacheable = options.cache_dir.has_value() && !options.build.mutation &&
                         options.build.parameterization == Parameterization::FirstCoordinate;
  Tower tower;
  for (int n = 0; n <= N; ++n) {
    if (cacheable) {
      if (auto cached = read_level(*options.cache_dir, n)) {
        log("level " + std::to_string(n) + ": loaded from " + level_file(*options.cache_dir, n).string());
        tower.levels.push_back(std::move(*cached));
        continue;
      }
    }
    log("level " + std::to_string(n) + ": building");
    GammaSet gamma;
    if (n == 0) {
      gamma = build_gamma0();
    } else {
      const TowerLevel& prev = tower.levels.back();
      gamma = next_gamma(n - 1, prev.f, prev.g);
      require(verify_containment(gamma, prev.f, prev.g), n, "containment in [g, f]");
    }
    require(verify_gamma(gamma, n), n, "Γ conditions");
    MapPair maps = build_maps(n, gamma, options.build);
    tower.levels.push_back(TowerLevel{n, std::move(gamma), std::move(maps.f), std::move(maps.g)});
    log("level " + std::to_string(n) + ": verified");
    if (cacheable) write_level(*options.cache_dir, tower.levels.back());
  }
  return tower;
}

}  // namespace treelike
