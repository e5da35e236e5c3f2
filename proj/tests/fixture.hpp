#pragma once

#include <cstdlib>

#include "treelike/tower.hpp"

namespace fixture {

/// Tower shared by the unit tests, built on first use.  Levels are cached
/// only when TREELIKE_CACHE_DIR is set (ctest sets it).
inline const treelike::Tower& tower(int height) {
  static treelike::Tower t;
  if (t.height() < height) {
    treelike::TowerOptions opts;
    if (std::getenv("TREELIKE_CACHE_DIR") != nullptr) opts.cache_dir = treelike::default_cache_dir();
    t = treelike::build_tower(height, opts);
  }
  return t;
}

}  // namespace fixture
