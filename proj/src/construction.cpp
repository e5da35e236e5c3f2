#include "treelike/construction.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "treelike/parallel.hpp"
#include "treelike/tent.hpp"

namespace treelike {

namespace {

const Rational kZero(0);
const Rational kOne(1);
const Rational kHalf(1, 2);
const Rational kTwoThirds(2, 3);

const std::vector<Rational>& triod_roots() {
  static const std::vector<Rational> v{Rational(1, 3), Rational(1)};
  return v;
}
const std::vector<Rational>& detour_roots() {
  static const std::vector<Rational> v{Rational(1, 9), Rational(5, 9), Rational(7, 9)};
  return v;
}

TreePoint S(const Rational& s) { return TreePoint::spine(s); }
TreePoint L(const Rational& p, int i, const Rational& t) { return TreePoint::on_leg(p, ((i % 3) + 3) % 3, t); }

std::string level_tag(int n) { return "level " + std::to_string(n) + ": "; }

std::string pair_str(const ProductPoint& x) { return "(" + x.first.str() + ", " + x.second.str() + ")"; }

std::string instance_label(Condition c, int piece, const Rational& p, int leg) {
  const std::string name = "C" + std::to_string(static_cast<int>(c));
  switch (c) {
    case Condition::C1:
      return name + "[" + std::to_string(piece) + "]";
    case Condition::C2:
      return name + "[p=" + p.str() + "]";
    case Condition::C3:
      if (p == kTwoThirds) return name + "[p=" + p.str() + ",i=" + std::to_string(leg) + (piece == 0 ? ",+]" : ",-]");
      return name + "[p=" + p.str() + ",i=" + std::to_string(leg) + "]";
    default:
      return name + "[p=" + p.str() + ",i=" + std::to_string(leg) + "]";
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// labels, regions, instances

std::string GammaArc::label() const { return instance_label(condition, piece, p, leg); }
std::string ConditionInstance::label() const { return instance_label(condition, piece, p, leg); }

std::size_t GammaSet::point_count() const {
  std::size_t total = 0;
  for (const auto& a : arcs) total += a.arc.points.size();
  return total;
}

bool Region::contains(const TreePoint& x) const {
  switch (kind) {
    case Spine:
      return x.is_spine();
    case Leg:
      return x.base == p && (x.is_spine() || x.leg == leg);
    case Point:
      return x.is_spine() && x.base == p;
  }
  return false;
}

char row_letter(RuledRow row) { return static_cast<char>('a' + static_cast<int>(row)); }

std::vector<ConditionInstance> condition_instances(int n) {
  const Rational eps = epsilon(n);
  const Region spine{Region::Spine, {}, -1};
  auto leg = [](const Rational& p, int i) { return Region{Region::Leg, p, ((i % 3) + 3) % 3}; };
  std::vector<ConditionInstance> out;
  auto add = [&out](Condition c, int piece, Rational p, int i, ProductPoint a, ProductPoint b, Region r1, Region r2) {
    out.push_back(ConditionInstance{c, piece, std::move(p), i, std::move(a), std::move(b), std::move(r1), std::move(r2)});
  };
  add(Condition::C1, 0, {}, -1, {S(kZero), S(eps)}, {S(kHalf), S(kOne)}, spine, spine);
  add(Condition::C1, 1, {}, -1, {S(kHalf), S(kOne)}, {S(kTwoThirds), S(kTwoThirds + eps)}, spine, spine);
  add(Condition::C1, 2, {}, -1, {S(kTwoThirds), S(kTwoThirds - eps)}, {S(kOne), S(kZero)}, spine, spine);
  for (int i = 0; i < 3; ++i)
    add(Condition::C3, 0, kZero, i, {S(kZero), S(eps)}, {L(kZero, i, kHalf), S(kZero)}, leg(kZero, i), spine);
  for (int i = 0; i < 3; ++i) {
    add(Condition::C3, 0, kTwoThirds, i, {S(kTwoThirds), S(kTwoThirds + eps)}, {L(kTwoThirds, i, kHalf), S(kTwoThirds)},
        leg(kTwoThirds, i), spine);
    add(Condition::C3, 1, kTwoThirds, i, {S(kTwoThirds), S(kTwoThirds - eps)}, {L(kTwoThirds, i, kHalf), S(kTwoThirds)},
        leg(kTwoThirds, i), spine);
  }
  for (const Rational& p : {kZero, kTwoThirds})
    for (int i = 0; i < 3; ++i)
      add(Condition::C4, 0, p, i, {L(p, i, kHalf), S(p)}, {L(p, i, kOne), L(p, i + 1, kOne)}, leg(p, i), leg(p, i + 1));
  for (const auto& p : tent2_preimage_union(triod_roots(), 0, n - 1)) {
    const Rational q = tent(2, p);
    for (int i = 0; i < 3; ++i)
      add(Condition::C5, 0, p, i, {S(p), S(q)}, {L(p, i, kOne), L(q, i, kOne)}, leg(p, i), leg(q, i));
  }
  for (const auto& p : tent2_preimages(triod_roots(), n)) {
    const Rational q = tent(2, p);
    for (int i = 0; i < 3; ++i)
      add(Condition::C6, 0, p, i, {S(p), S(q)}, {S(p), L(q, i, kOne)}, Region{Region::Point, p, -1}, leg(q, i));
  }
  return out;
}

std::vector<ProductPoint> mandated_points(int n) {
  std::vector<ProductPoint> out;
  for (const auto& p : tent2_preimage_union(triod_roots(), 0, n)) out.push_back({S(p), S(tent(2, p))});
  return out;
}

// ---------------------------------------------------------------------------
// j and Γ_0

int j_index(const Rational& x) {
  static const std::vector<Rational> cycle{Rational(2, 9), Rational(4, 9), Rational(8, 9)};
  for (int k = 0; k < 3; ++k)
    if (x == cycle[static_cast<std::size_t>(k)]) return k;
  if (x < kZero || x > kOne) throw DomainError("j is undefined at " + x.str());
  const int m = tent2_depth(x, detour_roots());
  if (m < 0) throw DomainError("j is undefined at " + x.str());
  return j_index(tent2_iterate(x, m + 1));
}

GammaSet build_gamma0() {
  const TreeLevel& level = *tree_level(0);
  const auto mandated = mandated_points(0);
  GammaSet gamma{0, {}};
  for (const auto& inst : condition_instances(0)) {
    ProductArc arc{{inst.start}};
    if (inst.condition == Condition::C1) {
      std::vector<ProductPoint> inner;
      for (const auto& m : mandated)
        if (inst.start.first.base < m.first.base && m.first.base < inst.end.first.base) inner.push_back(m);
      std::sort(inner.begin(), inner.end());
      arc.points.insert(arc.points.end(), inner.begin(), inner.end());
    }
    arc.points.push_back(inst.end);
    gamma.arcs.push_back(GammaArc{inst.condition, inst.piece, inst.p, inst.leg, simplify_arc(arc, level)});
  }
  return gamma;
}

// ---------------------------------------------------------------------------
// ruled set and values

long RuledSet::find(const TreePoint& x) const {
  auto it = std::lower_bound(points.begin(), points.end(), x,
                             [](const RuledPoint& a, const TreePoint& b) { return a.point < b; });
  if (it == points.end() || it->point != x) return -1;
  return it - points.begin();
}

namespace {

// Parameter of x along edge e (x must lie on the closed edge).
Rational param_on_edge(const TreePoint& x, const Edge& edge) {
  if (edge.leg < 0) return x.base;
  return x.is_spine() ? kZero : x.t;
}

}  // namespace

RuledSet ruled_set(int n) {
  if (n < 0) throw DomainError("ruled set needs n >= 0");
  const TreeLevel& dom = *tree_level(n + 1);
  const Rational eps = epsilon(n + 1);
  RuledSet r{n, {}, {}, {}};
  auto add = [&r](TreePoint pt, RuledRow row, int part) { r.points.push_back(RuledPoint{std::move(pt), row, part}); };
  add(S(kZero), RuledRow::A, 1);
  add(S(kTwoThirds), RuledRow::A, 1);
  add(S(eps), RuledRow::B, 1);
  add(S(kTwoThirds - eps), RuledRow::B, 1);
  add(S(kTwoThirds + eps), RuledRow::B, 1);
  for (int m = 0; m <= n + 1; ++m)
    for (const auto& x : tent2_preimages(triod_roots(), m)) add(S(x), RuledRow::C, m <= n ? 1 : 2);
  for (const auto& x : {Rational(2, 9), Rational(4, 9), Rational(8, 9)}) add(S(x), RuledRow::D, 1);
  for (int m = 0; m <= n; ++m)
    for (const auto& x : tent2_preimages(detour_roots(), m)) add(S(x), RuledRow::E, m <= n - 1 ? 1 : 2);
  for (const Rational& p : {kZero, kTwoThirds})
    for (int i = 0; i < 3; ++i) {
      add(L(p, i, kHalf), RuledRow::F, 1);
      add(L(p, i, kOne), RuledRow::F, 2);
    }
  for (int m = 0; m <= n; ++m)
    for (const auto& p : tent2_preimages(triod_roots(), m))
      for (int i = 0; i < 3; ++i) add(L(p, i, kOne), RuledRow::G, m <= n - 1 ? 1 : 2);

  std::sort(r.points.begin(), r.points.end(), [](const RuledPoint& a, const RuledPoint& b) { return a.point < b.point; });
  for (std::size_t k = 0; k + 1 < r.points.size(); ++k)
    if (r.points[k].point == r.points[k + 1].point)
      throw ConstructionError(level_tag(n) + "ruled point " + r.points[k].point.str() + " listed twice");

  // adjacency: sort the ruled points of each closed domain edge by parameter
  std::vector<std::vector<std::pair<Rational, std::size_t>>> per_edge(dom.edge_count());
  for (std::size_t k = 0; k < r.points.size(); ++k) {
    const TreePoint& x = r.points[k].point;
    if (x.is_spine()) {
      const std::size_t e = dom.spine_edge_at(x.base);
      per_edge[e].push_back({x.base, k});
      if (e > 0 && dom.edge(e).lo == x.base) per_edge[e - 1].push_back({x.base, k});
      const int a = dom.attachment_index(x.base);
      if (a >= 0)
        for (int i = 0; i < 3; ++i) per_edge[dom.leg_edge(a, i)].push_back({kZero, k});
    } else {
      per_edge[dom.locate(x).first].push_back({x.t, k});
    }
  }
  for (std::size_t e = 0; e < per_edge.size(); ++e) {
    auto& list = per_edge[e];
    std::sort(list.begin(), list.end());
    const Edge& edge = dom.edge(e);
    if (list.empty() || list.front().first != edge.lo || list.back().first != edge.hi)
      throw ConstructionError(level_tag(n) + "a vertex of T_" + std::to_string(n + 1) + " is missing from R");
    for (std::size_t k = 0; k + 1 < list.size(); ++k) {
      r.adjacency.push_back({list[k].second, list[k + 1].second});
      r.adjacency_edge.push_back(e);
    }
  }
  return r;
}

namespace {

const GammaArc& find_arc(const GammaSet& gamma, Condition c, int piece) {
  for (const auto& a : gamma.arcs)
    if (a.condition == c && a.piece == piece) return a;
  throw ConstructionError(level_tag(gamma.n) + "Γ has no arc " + instance_label(c, piece, {}, -1));
}

// Points of the C1 arcs (spine × spine) whose chosen coordinate equals `value`.
std::vector<ProductPoint> c1_line_hits(const GammaSet& gamma, const std::vector<int>& pieces, bool vertical,
                                       const Rational& value, const std::string& context) {
  const TreeLevel& level = *tree_level(gamma.n);
  std::vector<ProductPoint> hits;
  for (int piece : pieces) {
    const auto& pts = find_arc(gamma, Condition::C1, piece).arc.points;
    auto coord = [vertical](const ProductPoint& x) -> const Rational& { return vertical ? x.first.base : x.second.base; };
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      const Rational& a = coord(pts[k]);
      const Rational& b = coord(pts[k + 1]);
      if (value < min(a, b) || value > max(a, b)) continue;
      if (a == b) {
        throw ConstructionError(level_tag(gamma.n) + context + ": C1 arc " + std::to_string(piece) +
                                " runs along the line through " + value.str() + " between " + pair_str(pts[k]) +
                                " and " + pair_str(pts[k + 1]));
      }
      hits.push_back(product_segment_point(pts[k], pts[k + 1], (value - a) / (b - a), level));
    }
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  return hits;
}

ProductPoint ruled_value_unchecked(int n, const RuledPoint& x, const GammaSet& gamma) {
  const Rational eps = epsilon(n);
  const std::string where = "row (" + std::string(1, row_letter(x.row)) + ") at " + x.point.str();
  switch (x.row) {
    case RuledRow::A:
      return {S(kZero), S(eps)};
    case RuledRow::B: {
      const auto hits = c1_line_hits(gamma, {0}, true, eps, where);
      if (hits.size() != 1)
        throw ConstructionError(level_tag(n) + where + ": expected one point of the first C1 arc over " + eps.str() +
                                ", found " + std::to_string(hits.size()));
      const Rational& t = hits[0].second.base;
      if (!(eps < t && t < kHalf))
        throw ConstructionError(level_tag(n) + where + ": intersection height " + t.str() + " outside (eps_n, 1/2)");
      return hits[0];
    }
    case RuledRow::C: {
      const Rational& s = x.point.base;
      if (x.part == 1) return {S(tent(3, s)), S(tent(6, s))};
      const Rational height = tent(6, s);
      const bool left = tent(3, s) < kHalf;
      std::vector<ProductPoint> side;
      for (auto& h : c1_line_hits(gamma, {0, 1, 2}, false, height, where))
        if ((h.first.base < kHalf) == left) side.push_back(std::move(h));
      if (side.size() != 1)
        throw ConstructionError(level_tag(n) + where + ": expected one C1 point at height " + height.str() +
                                (left ? " left" : " right") + " of 1/2, found " + std::to_string(side.size()));
      return side[0];
    }
    case RuledRow::D: {
      const int j = j_index(x.point.base);
      return {L(kTwoThirds, j, kOne), L(kTwoThirds, j + 1, kOne)};
    }
    case RuledRow::E: {
      const Rational& s = x.point.base;
      const int j = j_index(s);
      if (x.part == 1) return {L(tent(3, s), j, kOne), L(tent(6, s), j, kOne)};
      return {S(tent(3, s)), L(tent(6, s), j, kOne)};
    }
    case RuledRow::F:
      if (x.part == 1) return {L(kZero, x.point.leg, kHalf), S(kZero)};
      return {L(kZero, x.point.leg, kOne), L(kZero, x.point.leg + 1, kOne)};
    case RuledRow::G: {
      const Rational& p = x.point.base;
      const int i = x.point.leg;
      if (x.part == 1) return {L(tent(3, p), i, kOne), L(tent(6, p), i, kOne)};
      return {S(tent(3, p)), L(tent(6, p), i, kOne)};
    }
  }
  throw ConstructionError("unknown ruled row");
}

}  // namespace

ProductPoint ruled_value(int n, const RuledPoint& x, const GammaSet& gamma) {
  ProductPoint v = ruled_value_unchecked(n, x, gamma);
  if (!gamma_contains(gamma, v))
    throw ConstructionError(level_tag(n) + "value " + pair_str(v) + " of ruled point " + x.point.str() + " (row " +
                            row_letter(x.row) + ") is not on Γ_" + std::to_string(n));
  return v;
}

bool gamma_contains(const GammaSet& gamma, const ProductPoint& x) {
  const TreeLevel& level = *tree_level(gamma.n);
  for (const auto& a : gamma.arcs)
    if (arc_contains(a.arc, x, level)) return true;
  return false;
}

std::vector<std::string> mutation_names() { return {"swap-d", "leg-g", "leg-e", "collapse-b"}; }

std::optional<ValueMutation> named_mutation(const std::string& name, int at_level) {
  if (name == "swap-d")
    return ValueMutation([at_level](int n, const RuledPoint& x, const ProductPoint& v) {
      if (n != at_level || x.row != RuledRow::D) return v;
      return ProductPoint{v.second, v.first};
    });
  if (name == "leg-g")
    return ValueMutation([at_level](int n, const RuledPoint& x, const ProductPoint& v) {
      if (n != at_level || x.row != RuledRow::G || x.part != 1) return v;
      return ProductPoint{v.first, L(v.second.base, v.second.leg + 1, v.second.t)};
    });
  if (name == "leg-e")
    return ValueMutation([at_level](int n, const RuledPoint& x, const ProductPoint& v) {
      if (n != at_level || x.row != RuledRow::E || x.part != 1) return v;
      return ProductPoint{L(v.first.base, v.first.leg + 1, v.first.t), v.second};
    });
  if (name == "collapse-b")
    return ValueMutation([at_level](int n, const RuledPoint& x, const ProductPoint& v) {
      if (n != at_level || x.row != RuledRow::B) return v;
      return ProductPoint{S(kZero), S(epsilon(n))};
    });
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Γ as a graph: arcs split at every junction, searched for monotone paths

namespace {

class GammaGraph {
 public:
  GammaGraph(const GammaSet& gamma, const std::vector<ProductPoint>& extra) : level_(*tree_level(gamma.n)) {
    struct Segment {
      const ProductPoint* a;
      const ProductPoint* b;
    };
    std::vector<Segment> segs;
    std::vector<ProductPoint> junctions = extra;
    for (const auto& arc : gamma.arcs) {
      const auto& pts = arc.arc.points;
      for (std::size_t k = 0; k + 1 < pts.size(); ++k) segs.push_back({&pts[k], &pts[k + 1]});
      junctions.insert(junctions.end(), pts.begin(), pts.end());
    }
    std::sort(junctions.begin(), junctions.end());
    junctions.erase(std::unique(junctions.begin(), junctions.end()), junctions.end());

    // bucket grid over (r(first), r(second))
    grid_ = std::clamp(static_cast<long>(std::sqrt(static_cast<double>(segs.size()))) * 2, 8L, 1024L);
    std::vector<std::vector<std::size_t>> cells(static_cast<std::size_t>(grid_ * grid_));
    for (std::size_t s = 0; s < segs.size(); ++s) {
      const long x0 = cell(min(segs[s].a->first.base, segs[s].b->first.base));
      const long x1 = cell(max(segs[s].a->first.base, segs[s].b->first.base));
      const long y0 = cell(min(segs[s].a->second.base, segs[s].b->second.base));
      const long y1 = cell(max(segs[s].a->second.base, segs[s].b->second.base));
      for (long x = x0; x <= x1; ++x)
        for (long y = y0; y <= y1; ++y) cells[static_cast<std::size_t>(x * grid_ + y)].push_back(s);
    }
    std::vector<std::vector<std::pair<Rational, const ProductPoint*>>> splits(segs.size());
    parallel_for(junctions.size(), [&](std::size_t j) {
      const ProductPoint& x = junctions[j];
      for (std::size_t s : cells[static_cast<std::size_t>(cell(x.first.base) * grid_ + cell(x.second.base))]) {
        Rational lambda;
        if (*segs[s].a != x && *segs[s].b != x && product_segment_locate(*segs[s].a, *segs[s].b, x, level_, &lambda)) {
#pragma omp critical(gamma_graph_split)
          splits[s].push_back({lambda, &x});
        }
      }
    });
    for (const auto& x : junctions) node(x);
    std::map<std::pair<std::size_t, std::size_t>, bool> seen;
    for (std::size_t s = 0; s < segs.size(); ++s) {
      auto& cuts = splits[s];
      std::sort(cuts.begin(), cuts.end(), [](const auto& u, const auto& v) { return u.first < v.first; });
      std::vector<const ProductPoint*> chain{segs[s].a};
      for (const auto& c : cuts) chain.push_back(c.second);
      chain.push_back(segs[s].b);
      for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
        const std::size_t u = node(*chain[k]);
        const std::size_t v = node(*chain[k + 1]);
        if (u == v || !seen.emplace(std::minmax(u, v), true).second) continue;
        Rational l1 = distance(chain[k]->first, chain[k + 1]->first, level_);
        Rational l2 = distance(chain[k]->second, chain[k + 1]->second, level_);
        adj_[u].push_back(Link{v, l1, l2});
        adj_[v].push_back(Link{u, std::move(l1), std::move(l2)});
      }
    }
  }

  std::optional<std::size_t> find(const ProductPoint& x) const {
    // ruled values are inserted as junctions; one that no arc reaches is off Γ
    auto it = ids_.find(x);
    if (it == ids_.end() || adj_[it->second].empty()) return std::nullopt;
    return it->second;
  }
  const ProductPoint& point(std::size_t id) const { return nodes_[id]; }

  /// Node sequence of the unique monotone path; throws on none or several.
  std::vector<std::size_t> monotone_path(std::size_t from, std::size_t to, const std::string& context) const {
    if (from == to) return {from};
    const ProductPoint& P = nodes_[from];
    const ProductPoint& Q = nodes_[to];
    const Rational D1 = distance(P.first, Q.first, level_);
    const Rational D2 = distance(P.second, Q.second, level_);
    std::unordered_map<std::size_t, int> count;
    std::unordered_map<std::size_t, std::size_t> next;
    // admissible nodes stay on the geodesics P→Q in both coordinates
    auto on_way = [&](std::size_t v, Rational* a1, Rational* a2) {
      const ProductPoint& X = nodes_[v];
      *a1 = distance(P.first, X.first, level_);
      *a2 = distance(P.second, X.second, level_);
      return *a1 + distance(X.first, Q.first, level_) == D1 && *a2 + distance(X.second, Q.second, level_) == D2;
    };
    std::function<int(std::size_t, const Rational&, const Rational&)> reach =
        [&](std::size_t u, const Rational& u1, const Rational& u2) -> int {
      if (u == to) return 1;
      auto it = count.find(u);
      if (it != count.end()) return it->second;
      int total = 0;
      for (const auto& link : adj_[u]) {
        Rational v1, v2;
        if (!on_way(link.to, &v1, &v2)) continue;
        if (v1 != u1 + link.len1 || v2 != u2 + link.len2) continue;
        const int c = reach(link.to, v1, v2);
        if (c > 0) {
          total += c;
          next[u] = link.to;
        }
        if (total >= 2) break;
      }
      count[u] = std::min(total, 2);
      return count[u];
    };
    const int found = reach(from, kZero, kZero);
    if (found == 0)
      throw ConstructionError(context + ": no monotone arc of Γ from " + pair_str(P) + " to " + pair_str(Q));
    if (found > 1)
      throw ConstructionError(context + ": several monotone arcs of Γ from " + pair_str(P) + " to " + pair_str(Q));
    std::vector<std::size_t> path{from};
    while (path.back() != to) path.push_back(next.at(path.back()));
    return path;
  }

 private:
  struct Link {
    std::size_t to;
    Rational len1, len2;
  };

  long cell(const Rational& r) const { return std::clamp(floor_long(r * Rational(grid_)), 0L, grid_ - 1); }

  std::size_t node(const ProductPoint& x) {
    auto [it, inserted] = ids_.emplace(x, nodes_.size());
    if (inserted) {
      nodes_.push_back(x);
      adj_.emplace_back();
    }
    return it->second;
  }

  const TreeLevel& level_;
  long grid_ = 8;
  std::vector<ProductPoint> nodes_;
  std::map<ProductPoint, std::size_t> ids_;
  std::vector<std::vector<Link>> adj_;
};

}  // namespace

MapPair build_maps(int n, const GammaSet& gamma, const BuildOptions& options) {
  if (gamma.n != n) throw ConstructionError(level_tag(n) + "Γ belongs to level " + std::to_string(gamma.n));
  const auto dom = tree_level(n + 1);
  const auto cod = tree_level(n);
  const RuledSet ruled = ruled_set(n);

  std::vector<ProductPoint> values(ruled.points.size());
  parallel_for(values.size(), [&](std::size_t k) {
    values[k] = ruled_value_unchecked(n, ruled.points[k], gamma);
    if (options.mutation) values[k] = options.mutation(n, ruled.points[k], values[k]);
  });

  const GammaGraph graph(gamma, values);
  std::vector<std::optional<std::size_t>> ids(values.size());
  std::vector<std::string> off_gamma;
  for (std::size_t k = 0; k < values.size(); ++k) {
    ids[k] = graph.find(values[k]);
    if (ids[k]) continue;
    const std::string msg = level_tag(n) + "value " + pair_str(values[k]) + " of ruled point " +
                            ruled.points[k].point.str() + " (row " + row_letter(ruled.points[k].row) +
                            ") is not on Γ_" + std::to_string(n);
    if (options.strict) throw ConstructionError(msg);
    off_gamma.push_back(msg);
  }

  // an empty path marks a gap bridged by the straight product segment
  std::vector<std::vector<std::size_t>> paths(ruled.adjacency.size());
  std::vector<std::string> bridge_reason(paths.size());
  parallel_for(paths.size(), [&](std::size_t a) {
    const auto [i, j] = ruled.adjacency[a];
    const std::string where =
        level_tag(n) + "between ruled points " + ruled.points[i].point.str() + " and " + ruled.points[j].point.str();
    if (!ids[i] || !ids[j]) {
      bridge_reason[a] = where + ": an end value is off Γ";
      return;
    }
    try {
      paths[a] = graph.monotone_path(*ids[i], *ids[j], where);
    } catch (const ConstructionError& e) {
      if (options.strict) throw;
      bridge_reason[a] = e.what();
    }
  });
  for (const auto& r : bridge_reason)
    if (!r.empty()) off_gamma.push_back(r);

  std::vector<std::vector<Breakpoint>> ftab(dom->edge_count()), gtab(dom->edge_count());
  for (std::size_t a = 0; a < paths.size(); ++a) {
    const std::size_t e = ruled.adjacency_edge[a];
    const Edge& edge = dom->edge(e);
    const Rational s0 = param_on_edge(ruled.points[ruled.adjacency[a].first].point, edge);
    const Rational s1 = param_on_edge(ruled.points[ruled.adjacency[a].second].point, edge);
    const auto& path = paths[a];
    auto& ft = ftab[e];
    auto& gt = gtab[e];
    auto emit = [&](const Rational& s, const ProductPoint& u) {
      if (!ft.empty() && ft.back().s == s) return;
      ft.push_back(Breakpoint{s, u.first});
      gt.push_back(Breakpoint{s, u.second});
    };
    if (path.empty()) {
      emit(s0, values[ruled.adjacency[a].first]);
      emit(s1, values[ruled.adjacency[a].second]);
      continue;
    }
    emit(s0, graph.point(path.front()));
    if (path.size() == 1) {
      // both maps constant between these ruled points
      emit(s1, graph.point(path.front()));
      continue;
    }
    const bool uniform = options.parameterization == Parameterization::ProductArclength;
    std::vector<Rational> weight{kZero}, len1, len2;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      const ProductPoint& u = graph.point(path[k]);
      const ProductPoint& v = graph.point(path[k + 1]);
      len1.push_back(distance(u.first, v.first, *cod));
      len2.push_back(distance(u.second, v.second, *cod));
      weight.push_back(weight.back() + (uniform ? len1.back() + len2.back() : len1.back().is_zero() ? len2.back() : len1.back()));
    }
    const Rational span = s1 - s0;
    const Rational& total = weight.back();
    if (uniform) {
      for (std::size_t k = 1; k + 1 < path.size(); ++k) emit(s0 + span * weight[k] / total, graph.point(path[k]));
      emit(s1, graph.point(path.back()));
      continue;
    }
    // speeds (weight per unit parameter) slow = 2^k <= total/span < fast = 2 slow
    const Rational ratio = total / span;
    int k2 = static_cast<int>(std::floor(std::log2(ratio.to_double())));
    while (pow2(k2) > ratio) --k2;
    while (pow2(k2 + 1) <= ratio) ++k2;
    const Rational slow = pow2(k2);
    const Rational fast = slow * Rational(2);
    // fast for parameter length h, slow for the rest
    const Rational h = (total - slow * span) / slow;
    const Rational kink = fast * h;
    auto param_of = [&](const Rational& w) { return w <= kink ? s0 + w / fast : s0 + h + (w - kink) / slow; };
    for (std::size_t k = 1; k < path.size(); ++k) {
      if (weight[k - 1] < kink && kink < weight[k]) {
        const ProductPoint& u = graph.point(path[k - 1]);
        const ProductPoint& v = graph.point(path[k]);
        const Rational frac = (kink - weight[k - 1]) / (weight[k] - weight[k - 1]);
        emit(s0 + h, ProductPoint{point_along(u.first, v.first, frac * len1[k - 1], *cod),
                                  point_along(u.second, v.second, frac * len2[k - 1], *cod)});
      }
      emit(k + 1 == path.size() ? s1 : param_of(weight[k]), graph.point(path[k]));
    }
  }
  try {
    return MapPair{PLMap(dom, cod, std::move(ftab)).simplified(), PLMap(dom, cod, std::move(gtab)).simplified(),
                   std::move(off_gamma)};
  } catch (const std::invalid_argument& e) {
    throw ConstructionError(level_tag(n) + "assembled maps are inconsistent: " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Γ_{n+1}

GammaSet next_gamma(int n, const PLMap& f, const PLMap& g) {
  const int level_n = n + 1;
  if (f.domain().n() != level_n || g.domain().n() != level_n || f.codomain().n() != n || g.codomain().n() != n)
    throw ConstructionError(level_tag(n) + "next_gamma needs f_n, g_n : T_" + std::to_string(level_n) + " → T_" +
                            std::to_string(n));
  const TreeLevel& dom = *tree_level(level_n);
  const auto instances = condition_instances(level_n);
  const Rational eps = epsilon(level_n);

  auto check_pair = [&](const ProductPoint& x, const std::string& label) {
    const TreePoint gx = g.eval(x.first);
    const TreePoint fy = f.eval(x.second);
    if (gx != fy)
      throw ConstructionError(level_tag(level_n) + label + ": g_" + std::to_string(n) + pair_str(x).substr(0, 0) + "(" +
                              x.first.str() + ") = " + gx.str() + " but f_" + std::to_string(n) + "(" + x.second.str() +
                              ") = " + fy.str());
  };
  auto trace = [&](const ProductPoint& a, const ProductPoint& b, const std::string& label) {
    check_pair(a, label);
    check_pair(b, label);
    try {
      return trace_coincidence_arc(restrict_map(g, a.first, b.first), restrict_map(f, a.second, b.second));
    } catch (const PreconditionError& e) {
      throw ConstructionError(level_tag(level_n) + label + ": " + e.what());
    }
  };

  // C1 anchors: (x, tau_2(x)) for spine ruled points, with the pulled-away
  // pairs at 0 and 2/3 replacing the points that sit next to them
  std::vector<Rational> xs;
  for (const auto& r : ruled_set(n).points)
    if (r.point.is_spine()) xs.push_back(r.point.base);
  std::vector<std::vector<ProductPoint>> anchors(3);
  anchors[0].push_back({S(kZero), S(eps)});
  for (const auto& x : xs) {
    const ProductPoint a{S(x), S(tent(2, x))};
    if (eps < x && x <= kHalf) anchors[0].push_back(a);
    if (kHalf <= x && x < kTwoThirds - eps) anchors[1].push_back(a);
    if (kTwoThirds + eps < x) anchors[2].push_back(a);
  }
  anchors[1].push_back({S(kTwoThirds), S(kTwoThirds + eps)});
  anchors[2].insert(anchors[2].begin(), ProductPoint{S(kTwoThirds), S(kTwoThirds - eps)});

  std::vector<GammaArc> arcs(instances.size());
  parallel_for(instances.size(), [&](std::size_t k) {
    const auto& inst = instances[k];
    ProductArc arc;
    if (inst.condition == Condition::C1) {
      const auto& chain = anchors[static_cast<std::size_t>(inst.piece)];
      for (std::size_t a = 0; a + 1 < chain.size(); ++a) {
        const ProductArc part =
            trace(chain[a], chain[a + 1], inst.label() + " between anchors " + pair_str(chain[a]) + " and " +
                                              pair_str(chain[a + 1]));
        arc.points.insert(arc.points.end(), part.points.begin() + (arc.points.empty() ? 0 : 1), part.points.end());
      }
    } else {
      arc = trace(inst.start, inst.end, inst.label());
    }
    arcs[k] = GammaArc{inst.condition, inst.piece, inst.p, inst.leg, simplify_arc(arc, dom)};
  });
  return GammaSet{level_n, std::move(arcs)};
}

// ---------------------------------------------------------------------------
// verification

bool CheckReport::ok() const { return failures() == 0; }

std::size_t CheckReport::failures() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const CheckEntry& e) { return !e.pass; }));
}

const CheckEntry* CheckReport::first_failure() const {
  for (const auto& e : entries)
    if (!e.pass) return &e;
  return nullptr;
}

void CheckReport::add(std::string name, bool pass, std::string detail) {
  entries.push_back(CheckEntry{std::move(name), pass, std::move(detail)});
}

namespace {

// First point of the arc on the diagonal, if any.
std::optional<ProductPoint> diagonal_witness(const ProductArc& arc, const TreeLevel& level) {
  for (const auto& x : arc.points)
    if (x.first == x.second) return x;
  for (std::size_t k = 0; k + 1 < arc.points.size(); ++k) {
    const auto& a = arc.points[k];
    const auto& b = arc.points[k + 1];
    const SegmentMinimum sm = min_pair_distance(a.first, b.first, a.second, b.second, level);
    if (sm.value.is_zero()) return product_segment_point(a, b, sm.lambda, level);
  }
  return std::nullopt;
}

std::string check_arc(const GammaArc& arc, const ConditionInstance& inst, const TreeLevel& level) {
  const auto& pts = arc.arc.points;
  if (pts.size() < 2) return "degenerate arc";
  if (pts.front() != inst.start) return "starts at " + pair_str(pts.front()) + ", expected " + pair_str(inst.start);
  if (pts.back() != inst.end) return "ends at " + pair_str(pts.back()) + ", expected " + pair_str(inst.end);
  for (const auto& x : pts)
    if (!inst.first.contains(x.first) || !inst.second.contains(x.second))
      return "leaves its region at " + pair_str(x);
  if (!arc_is_monotone(arc.arc, level)) return "not monotone";
  if (inst.condition == Condition::C6 && pts.size() != 2) return "vertical arc is not straight";
  if (auto w = diagonal_witness(arc.arc, level)) return "meets the diagonal at " + pair_str(*w);
  return {};
}

}  // namespace

CheckReport verify_gamma(const GammaSet& gamma, int n) {
  CheckReport report;
  if (gamma.n != n) {
    report.add("level", false, "Γ belongs to level " + std::to_string(gamma.n));
    return report;
  }
  const TreeLevel& level = *tree_level(n);
  const auto instances = condition_instances(n);
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t a = 0; a < gamma.arcs.size(); ++a) by_label[gamma.arcs[a].label()].push_back(a);

  std::vector<std::string> problems(instances.size());
  parallel_for(instances.size(), [&](std::size_t k) {
    auto it = by_label.find(instances[k].label());
    if (it == by_label.end()) {
      problems[k] = "missing";
      return;
    }
    if (it->second.size() != 1) {
      problems[k] = "present " + std::to_string(it->second.size()) + " times";
      return;
    }
    problems[k] = check_arc(gamma.arcs[it->second.front()], instances[k], level);
  });
  std::size_t matched = 0;
  for (std::size_t k = 0; k < instances.size(); ++k) {
    report.add(instances[k].label(), problems[k].empty(), problems[k]);
    if (by_label.count(instances[k].label())) ++matched;
  }
  for (const auto& [label, idx] : by_label) {
    const bool known = std::any_of(instances.begin(), instances.end(),
                                   [&](const ConditionInstance& inst) { return inst.label() == label; });
    if (!known) report.add(label, false, "arc matches no condition instance");
  }

  std::vector<const ProductArc*> c1;
  for (const auto& a : gamma.arcs)
    if (a.condition == Condition::C1) c1.push_back(&a.arc);
  for (const auto& m : mandated_points(n)) {
    const bool hit = std::any_of(c1.begin(), c1.end(), [&](const ProductArc* arc) { return arc_contains(*arc, m, level); });
    report.add("C2[p=" + m.first.base.str() + "]", hit, hit ? std::string() : "A misses " + pair_str(m));
  }
  return report;
}

CheckReport verify_containment(const GammaSet& next, const PLMap& f, const PLMap& g, int samples_per_arc) {
  CheckReport report;
  const TreeLevel& level = *tree_level(next.n);
  if (f.domain().n() != next.n || g.domain().n() != next.n) {
    report.add("levels", false, "maps do not act on T_" + std::to_string(next.n));
    return report;
  }
  std::vector<std::string> problems(next.arcs.size());
  parallel_for(next.arcs.size(), [&](std::size_t a) {
    const auto& pts = next.arcs[a].arc.points;
    auto bad = [&](const ProductPoint& x) { return g.eval(x.first) != f.eval(x.second); };
    for (const auto& x : pts)
      if (bad(x)) {
        problems[a] = "breakpoint " + pair_str(x) + " has g(x) != f(y)";
        return;
      }
    std::vector<Rational> lengths{kZero};
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      const auto& p = pts[k];
      const auto& q = pts[k + 1];
      const Rational d1 = distance(p.first, q.first, level);
      const Rational d2 = distance(p.second, q.second, level);
      lengths.push_back(lengths.back() + d1 + d2);
      // both sides are geodesic-linear between the breakpoints they meet on this segment
      std::vector<Rational> lambdas;
      if (!d1.is_zero())
        for (const auto& s : restrict_map(g, p.first, q.first).samples) lambdas.push_back(s.len / d1);
      if (!d2.is_zero())
        for (const auto& s : restrict_map(f, p.second, q.second).samples) lambdas.push_back(s.len / d2);
      std::sort(lambdas.begin(), lambdas.end());
      lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
      for (const auto& l : lambdas) {
        const ProductPoint x = product_segment_point(p, q, l, level);
        if (bad(x)) {
          problems[a] = "segment point " + pair_str(x) + " has g(x) != f(y)";
          return;
        }
      }
    }
    // evenly spaced interior samples by product arc length
    const Rational total = lengths.back();
    std::size_t seg = 0;
    for (int k = 1; k <= samples_per_arc && !total.is_zero(); ++k) {
      const Rational at = total * Rational(k, samples_per_arc + 1);
      while (seg + 2 < lengths.size() && lengths[seg + 1] < at) ++seg;
      const Rational span = lengths[seg + 1] - lengths[seg];
      const ProductPoint x = product_segment_point(pts[seg], pts[seg + 1], (at - lengths[seg]) / span, level);
      if (bad(x)) {
        problems[a] = "sample " + pair_str(x) + " has g(x) != f(y)";
        return;
      }
    }
  });
  for (std::size_t a = 0; a < next.arcs.size(); ++a)
    report.add(next.arcs[a].label(), problems[a].empty(), problems[a]);
  return report;
}

}  // namespace treelike
