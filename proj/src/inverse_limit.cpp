#include "treelike/inverse_limit.hpp"

#include "treelike/parallel.hpp"

namespace treelike {

Thread extend_down(const Tower& tower, int N, const TreePoint& top) {
  if (N < 0) throw DomainError("thread height must be non-negative");
  if (N > 0 && N - 1 > tower.height())
    throw DomainError("tower too short for threads of height " + std::to_string(N));
  const TreeLevel& level = *tree_level(N);
  if (!level.contains(top)) throw InvalidPointError("point " + top.str() + " is not in T_" + std::to_string(N));
  Thread t;
  t.points.resize(static_cast<std::size_t>(N) + 1);
  t.points.back() = top;
  for (int n = N - 1; n >= 0; --n)
    t.points[static_cast<std::size_t>(n)] = tower.at(n).f.eval(t.points[static_cast<std::size_t>(n) + 1]);
  return t;
}

bool is_thread(const Tower& tower, const Thread& t) {
  for (std::size_t n = 0; n < t.points.size(); ++n)
    if (!tree_level(static_cast<int>(n))->contains(t.points[n])) return false;
  for (std::size_t n = 0; n + 1 < t.points.size(); ++n)
    if (tower.at(static_cast<int>(n)).f.eval(t.points[n + 1]) != t.points[n]) return false;
  return true;
}

Thread induced_step(const Tower& tower, const Thread& t) {
  if (t.points.size() < 2) throw DomainError("induced_step needs a thread with at least two coordinates");
  Thread out;
  out.points.reserve(t.points.size() - 1);
  for (std::size_t n = 0; n + 1 < t.points.size(); ++n)
    out.points.push_back(tower.at(static_cast<int>(n)).g.eval(t.points[n + 1]));
  return out;
}

Rational thread_distance(const Thread& a, const Thread& b) {
  if (a.points.size() != b.points.size()) throw DomainError("threads have different lengths");
  Rational total(0);
  for (std::size_t n = 0; n < a.points.size(); ++n)
    total += pow2(-static_cast<int>(n)) * distance(a.points[n], b.points[n], *tree_level(static_cast<int>(n)));
  return total;
}

TreePoint random_point(const TreeLevel& level, std::mt19937_64& rng) {
  constexpr long kDen = 9L << 20;
  std::uniform_int_distribution<std::size_t> pick_edge(0, level.edge_count() - 1);
  std::uniform_int_distribution<long> pick_k(0, kDen);
  const std::size_t e = pick_edge(rng);
  const Edge& edge = level.edge(e);
  return level.point_on_edge(e, edge.lo + (edge.hi - edge.lo) * Rational(pick_k(rng), kDen));
}

Certificate displacement_certificate(const Tower& tower, int N, std::size_t samples, std::uint64_t seed) {
  const TowerLevel& base = tower.at(0);
  const MapDistance md = min_map_distance(base.f, base.g);
  Certificate c{md.value, md.witness, N, samples, seed, md.value, 0};
  if (N < 1) throw DomainError("certificate needs threads of height at least 1");
  const TreeLevel& top = *tree_level(N);
  const TreeLevel& t0 = *tree_level(0);

  std::vector<Rational> moved(samples);
  std::vector<char> valid(samples, 0);
  parallel_for(samples, [&](std::size_t i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
    std::mt19937_64 rng(seq);
    const Thread t = extend_down(tower, N, random_point(top, rng));
    const Thread image = induced_step(tower, t);
    valid[i] = is_thread(tower, image);
    moved[i] = distance(t.points[0], image.points[0], t0);
  });
  for (std::size_t i = 0; i < samples; ++i) {
    if (i == 0 || moved[i] < c.min_sampled) c.min_sampled = moved[i];
    if (moved[i] < c.delta0 || !valid[i]) ++c.violations;
  }
  return c;
}

nlohmann::json to_json(const Certificate& c) {
  return nlohmann::json{{"delta0", c.delta0.str()},   {"witness", c.witness.str()},
                        {"level", c.level},           {"samples", c.samples},
                        {"min_sampled", c.min_sampled.str()}, {"seed", c.seed},
                        {"violations", c.violations}, {"pass", c.ok()}};
}

}  // namespace treelike
