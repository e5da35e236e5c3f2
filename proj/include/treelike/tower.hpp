#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "treelike/construction.hpp"

namespace treelike {

struct TowerLevel {
  int n = 0;
  GammaSet gamma;  ///< Γ_n
  PLMap f, g;      ///< f_n, g_n : T_{n+1} → T_n
};

struct TowerOptions {
  /// Where level_<n>.json files live; empty disables caching.  Caching is
  /// also skipped whenever the build options differ from the defaults.
  std::optional<std::filesystem::path> cache_dir;
  BuildOptions build;
  /// Progress messages (level started, cache hit, checks passed).
  std::function<void(const std::string&)> log;
};

/// Levels 0..N of the recursion.  Each level is checked before it is kept:
/// Γ_n against (C1)-(C6), and for n ≥ 1 the containment Γ_n ⊂ [g_{n-1}, f_{n-1}].
/// Any failure is rethrown as ConstructionError with the level in the message.
struct Tower {
  std::vector<TowerLevel> levels;

  int height() const { return static_cast<int>(levels.size()) - 1; }
  const TowerLevel& at(int n) const;
};

Tower build_tower(int N, const TowerOptions& options = {});

/// $TREELIKE_CACHE_DIR if set, else ".treelike-cache" in the working directory.
std::filesystem::path default_cache_dir();

std::filesystem::path level_file(const std::filesystem::path& dir, int n);
void write_level(const std::filesystem::path& dir, const TowerLevel& level);
/// Reads a cached level; nullopt when the file is absent.  A malformed or
/// unverified file throws FormatError.
std::optional<TowerLevel> read_level(const std::filesystem::path& dir, int n);

}  // namespace treelike
