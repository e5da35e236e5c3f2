#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "json.hpp"
#include "treelike/tower.hpp"

namespace treelike {

/// (x_0, ..., x_N) with x_n ∈ T_n and f_n(x_{n+1}) = x_n.
struct Thread {
  std::vector<TreePoint> points;

  int top() const { return static_cast<int>(points.size()) - 1; }
  friend bool operator==(const Thread&, const Thread&) = default;
};

/// The thread ending at `top` ∈ T_N, filled in with the bonding maps.
Thread extend_down(const Tower& tower, int N, const TreePoint& top);

/// Checks membership x_n ∈ T_n and the bonding relation at every level.
bool is_thread(const Tower& tower, const Thread& t);

/// (g_0(x_1), ..., g_{N-1}(x_N)); one level shorter than the input.
Thread induced_step(const Tower& tower, const Thread& t);

/// Σ 2^{-n} d_n(x_n, y_n).
Rational thread_distance(const Thread& a, const Thread& b);

/// Uniform edge of the level, then a parameter k/D along it with k uniform
/// in [0, D] and D = 9·2^20.
TreePoint random_point(const TreeLevel& level, std::mt19937_64& rng);

struct Certificate {
  Rational delta0;       ///< min over T_1 of d(f_0(x), g_0(x))
  TreePoint witness;     ///< a point of T_1 attaining delta0
  int level = 0;         ///< N, the height of the sampled threads
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  Rational min_sampled;  ///< least first-coordinate displacement seen
  std::size_t violations = 0;
  bool ok() const { return delta0.sign() > 0 && violations == 0; }
};

/// Lower bound δ_0 on how far the induced map moves the first coordinate,
/// confirmed on `samples` random threads of height N.  Sample i draws from
/// its own generator seeded with (seed, i), so results do not depend on the
/// thread count.
Certificate displacement_certificate(const Tower& tower, int N, std::size_t samples, std::uint64_t seed);

nlohmann::json to_json(const Certificate& c);

}  // namespace treelike
