#include "treelike/pl_map.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

namespace treelike {

namespace {

std::vector<Breakpoint> simplify_table(const std::vector<Breakpoint>& t, const TreeLevel& cod) {
  if (t.size() <= 2) return t;
  std::vector<Breakpoint> out{t.front()};
  for (std::size_t k = 1; k + 1 < t.size(); ++k) {
    const Breakpoint& a = out.back();
    const Breakpoint& b = t[k];
    const Breakpoint& c = t[k + 1];
    const Rational d1 = distance(a.value, b.value, cod);
    const Rational d2 = distance(b.value, c.value, cod);
    if (d1 + d2 == distance(a.value, c.value, cod) && d1 * (c.s - b.s) == d2 * (b.s - a.s)) continue;
    out.push_back(b);
  }
  out.push_back(t.back());
  return out;
}

// Parameter of `pt` along leg (p, i) when pt lies on that leg or at p itself.
Rational leg_param(const TreePoint& pt) { return pt.is_spine() ? Rational(0) : pt.t; }

// Solves x0 + (x1-x0)u == y0 + (y1-y0)u for u strictly inside (0,1).
bool crossing(const Rational& x0, const Rational& x1, const Rational& y0, const Rational& y1, Rational* u) {
  const Rational diff0 = x0 - y0;
  const Rational diff1 = x1 - y1;
  if (diff0.sign() * diff1.sign() >= 0) return false;
  *u = diff0 / (diff0 - diff1);
  return true;
}

}  // namespace

PLMap::PLMap(std::shared_ptr<const TreeLevel> domain, std::shared_ptr<const TreeLevel> codomain,
             std::vector<std::vector<Breakpoint>> tables)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), tables_(std::move(tables)) {
  if (tables_.size() != domain_->edge_count())
    throw std::invalid_argument("PLMap needs one table per domain edge");
  for (std::size_t e = 0; e < tables_.size(); ++e) {
    const auto& t = tables_[e];
    const Edge& edge = domain_->edge(e);
    if (t.size() < 2 || t.front().s != edge.lo || t.back().s != edge.hi)
      throw std::invalid_argument("PLMap table " + std::to_string(e) + " does not span its edge");
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (k > 0 && !(t[k - 1].s < t[k].s))
        throw std::invalid_argument("PLMap table " + std::to_string(e) + " parameters not increasing");
      if (!codomain_->contains(t[k].value))
        throw InvalidPointError("PLMap value " + t[k].value.str() + " not in T_" + std::to_string(codomain_->n()));
    }
  }
  const auto& verts = domain_->spine_vertices();
  for (std::size_t k = 0; k < verts.size(); ++k) {
    const TreePoint* ref = nullptr;
    auto check = [&](const TreePoint& v) {
      if (ref == nullptr) ref = &v;
      else if (*ref != v)
        throw std::invalid_argument("PLMap discontinuous at spine vertex " + verts[k].str());
    };
    if (k > 0) check(tables_[k - 1].back().value);
    if (k + 1 < verts.size()) check(tables_[k].front().value);
    const int a = domain_->attachment_index(verts[k]);
    if (a >= 0)
      for (int i = 0; i < 3; ++i) check(tables_[domain_->leg_edge(a, i)].front().value);
  }
}

PLMap PLMap::identity(std::shared_ptr<const TreeLevel> level) {
  std::vector<std::vector<Breakpoint>> tables;
  tables.reserve(level->edge_count());
  for (std::size_t e = 0; e < level->edge_count(); ++e) {
    const Edge& edge = level->edge(e);
    tables.push_back({Breakpoint{edge.lo, level->point_on_edge(e, edge.lo)},
                      Breakpoint{edge.hi, level->point_on_edge(e, edge.hi)}});
  }
  auto copy = level;
  return PLMap(std::move(level), std::move(copy), std::move(tables));
}

std::size_t PLMap::breakpoint_count() const {
  std::size_t total = 0;
  for (const auto& t : tables_) total += t.size();
  return total;
}

TreePoint PLMap::eval_on_edge(std::size_t e, const Rational& s) const {
  const auto& t = tables_[e];
  auto it = std::lower_bound(t.begin(), t.end(), s, [](const Breakpoint& b, const Rational& v) { return b.s < v; });
  if (it == t.end()) throw InvalidPointError("parameter " + s.str() + " beyond edge");
  if (it->s == s) return it->value;
  if (it == t.begin()) throw InvalidPointError("parameter " + s.str() + " before edge");
  const Breakpoint& b0 = *(it - 1);
  const Breakpoint& b1 = *it;
  const Rational frac = (s - b0.s) / (b1.s - b0.s);
  return point_along(b0.value, b1.value, frac * distance(b0.value, b1.value, *codomain_), *codomain_);
}

TreePoint PLMap::eval(const TreePoint& x) const {
  if (!domain_->contains(x)) throw InvalidPointError("point " + x.str() + " not in T_" + std::to_string(domain_->n()));
  const auto [e, s] = domain_->locate(x);
  return eval_on_edge(e, s);
}

PLMap PLMap::simplified() const {
  std::vector<std::vector<Breakpoint>> out;
  out.reserve(tables_.size());
  for (const auto& t : tables_) out.push_back(simplify_table(t, *codomain_));
  return PLMap(domain_, codomain_, std::move(out));
}

PLMap PLMap::refined(std::size_t e, const Rational& s) const {
  auto tables = tables_;
  auto& t = tables[e];
  auto it = std::lower_bound(t.begin(), t.end(), s, [](const Breakpoint& b, const Rational& v) { return b.s < v; });
  if (it != t.end() && it->s == s) return *this;
  const TreePoint v = eval_on_edge(e, s);
  t.insert(it, Breakpoint{s, v});
  return PLMap(domain_, codomain_, std::move(tables));
}

TreePoint eval(const PLMap& m, const TreePoint& x) { return m.eval(x); }

RestrictedMap restrict_map(const PLMap& m, const TreePoint& from, const TreePoint& to) {
  const TreeLevel& dom = m.domain();
  RestrictedMap r{m.domain_ptr(), m.codomain_ptr(), from, to, {}};
  auto emit = [&r](Rational len, TreePoint pt, TreePoint val) {
    if (!r.samples.empty() && r.samples.back().len == len) return;
    r.samples.push_back(RestrictedSample{std::move(len), std::move(pt), std::move(val)});
  };
  emit(Rational(0), from, m.eval(from));
  Rational acc(0);
  for (const auto& piece : geodesic_pieces(from, to, dom)) {
    const bool ascending = piece.from < piece.to;
    const Rational& lo = ascending ? piece.from : piece.to;
    const Rational& hi = ascending ? piece.to : piece.from;
    std::vector<Breakpoint> inner;
    auto take = [&](const std::vector<Breakpoint>& t) {
      auto it = std::upper_bound(t.begin(), t.end(), lo, [](const Rational& v, const Breakpoint& b) { return v < b.s; });
      for (; it != t.end() && it->s < hi; ++it)
        if (inner.empty() || inner.back().s != it->s) inner.push_back(*it);
    };
    if (piece.leg < 0) {
      for (std::size_t e = dom.spine_edge_at(lo); e < dom.spine_edge_count() && dom.edge(e).lo < hi; ++e) take(m.table(e));
    } else {
      take(m.table(dom.leg_edge(dom.attachment_index(piece.p), piece.leg)));
    }
    if (!ascending) std::reverse(inner.begin(), inner.end());
    const Rational scale = piece.length / (hi - lo);
    for (auto& b : inner) emit(acc + abs(b.s - piece.from) * scale, piece_point(piece, b.s), std::move(b.value));
    acc += piece.length;
    const TreePoint end = piece_point(piece, piece.to);
    emit(acc, end, m.eval(end));
  }
  emit(acc, to, m.eval(to));
  return r;
}

PLMap compose(const PLMap& outer, const PLMap& inner) {
  if (inner.codomain().n() != outer.domain().n())
    throw CompositionError("cannot compose: inner codomain T_" + std::to_string(inner.codomain().n()) +
                           " is not outer domain T_" + std::to_string(outer.domain().n()));
  const TreeLevel& mid = inner.codomain();
  std::vector<std::vector<Breakpoint>> tables(inner.domain().edge_count());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t e = 0; e < tables.size(); ++e) {
    const auto& t = inner.table(e);
    auto& out = tables[e];
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
      const Breakpoint& b0 = t[k];
      const Breakpoint& b1 = t[k + 1];
      const Rational d = distance(b0.value, b1.value, mid);
      if (d.is_zero()) {
        const TreePoint v = outer.eval(b0.value);
        if (out.empty()) out.push_back(Breakpoint{b0.s, v});
        out.push_back(Breakpoint{b1.s, v});
        continue;
      }
      const RestrictedMap r = restrict_map(outer, b0.value, b1.value);
      const Rational ds = b1.s - b0.s;
      for (std::size_t j = (out.empty() ? 0 : 1); j < r.samples.size(); ++j)
        out.push_back(Breakpoint{b0.s + ds * r.samples[j].len / d, r.samples[j].value});
    }
  }
  return PLMap(inner.domain_ptr(), outer.codomain_ptr(), std::move(tables)).simplified();
}

namespace {

// Smallest common-refinement parameter on edge e where a and b differ.
std::optional<Rational> edge_difference(const PLMap& a, const PLMap& b, std::size_t e) {
  std::vector<Rational> params;
  for (const auto& bp : a.table(e)) params.push_back(bp.s);
  for (const auto& bp : b.table(e)) params.push_back(bp.s);
  std::sort(params.begin(), params.end());
  params.erase(std::unique(params.begin(), params.end()), params.end());
  for (const auto& s : params)
    if (a.eval_on_edge(e, s) != b.eval_on_edge(e, s)) return s;
  return std::nullopt;
}

}  // namespace

std::optional<TreePoint> first_difference(const PLMap& a, const PLMap& b) {
  if (a.domain().n() != b.domain().n() || a.codomain().n() != b.codomain().n())
    throw PreconditionError("maps have different domain or codomain levels");
  const std::size_t edges = a.domain().edge_count();
  std::vector<std::optional<Rational>> diff(edges);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t e = 0; e < edges; ++e) diff[e] = edge_difference(a, b, e);
  for (std::size_t e = 0; e < edges; ++e)
    if (diff[e]) return a.domain().point_on_edge(e, *diff[e]);
  return std::nullopt;
}

bool equal(const PLMap& a, const PLMap& b) {
  if (a.domain().n() != b.domain().n() || a.codomain().n() != b.codomain().n()) return false;
  return !first_difference(a, b).has_value();
}

SegmentMinimum min_pair_distance(const TreePoint& a0, const TreePoint& a1, const TreePoint& b0, const TreePoint& b1,
                                 const TreeLevel& level) {
  const Rational da = distance(a0, a1, level);
  const Rational db = distance(b0, b1, level);
  std::vector<Rational> breaks{Rational(0), Rational(1)};
  auto add_breaks = [&breaks, &level](const TreePoint& p, const TreePoint& q, const Rational& total) {
    if (total.is_zero()) return;
    Rational acc(0);
    for (const auto& piece : geodesic_pieces(p, q, level)) {
      acc += piece.length;
      if (acc < total) breaks.push_back(acc / total);
    }
  };
  add_breaks(a0, a1, da);
  add_breaks(b0, b1, db);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto at_a = [&](const Rational& l) { return point_along(a0, a1, l * da, level); };
  auto at_b = [&](const Rational& l) { return point_along(b0, b1, l * db, level); };

  SegmentMinimum best{distance(a0, b0, level), Rational(0)};
  auto consider = [&](const Rational& l, const TreePoint& pa, const TreePoint& pb) {
    Rational d = distance(pa, pb, level);
    if (d < best.value || (d == best.value && l < best.lambda)) best = SegmentMinimum{std::move(d), l};
  };
  TreePoint pa0 = at_a(breaks[0]);
  TreePoint pb0 = at_b(breaks[0]);
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const Rational& l0 = breaks[k];
    const Rational& l1 = breaks[k + 1];
    TreePoint pa1 = at_a(l1);
    TreePoint pb1 = at_b(l1);
    consider(l1, pa1, pb1);
    const Rational mid = (l0 + l1) / Rational(2);
    const TreePoint am = at_a(mid);
    const TreePoint bm = at_b(mid);
    Rational u;
    bool cross;
    if (!am.is_spine() && !bm.is_spine() && am.base == bm.base && am.leg == bm.leg)
      cross = crossing(leg_param(pa0), leg_param(pa1), leg_param(pb0), leg_param(pb1), &u);
    else
      cross = crossing(retract(pa0), retract(pa1), retract(pb0), retract(pb1), &u);
    if (cross) {
      const Rational l = l0 + (l1 - l0) * u;
      consider(l, at_a(l), at_b(l));
    }
    pa0 = std::move(pa1);
    pb0 = std::move(pb1);
  }
  return best;
}

namespace {

struct EdgeMinimum {
  Rational value;
  Rational s;
  bool valid = false;
};

EdgeMinimum edge_min_distance(const PLMap& a, const PLMap& b, std::size_t e) {
  std::vector<Rational> params;
  for (const auto& bp : a.table(e)) params.push_back(bp.s);
  for (const auto& bp : b.table(e)) params.push_back(bp.s);
  std::sort(params.begin(), params.end());
  params.erase(std::unique(params.begin(), params.end()), params.end());
  EdgeMinimum best;
  TreePoint a0 = a.eval_on_edge(e, params[0]);
  TreePoint b0 = b.eval_on_edge(e, params[0]);
  for (std::size_t k = 0; k + 1 < params.size(); ++k) {
    TreePoint a1 = a.eval_on_edge(e, params[k + 1]);
    TreePoint b1 = b.eval_on_edge(e, params[k + 1]);
    const SegmentMinimum sm = min_pair_distance(a0, a1, b0, b1, a.codomain());
    if (!best.valid || sm.value < best.value) {
      best.value = sm.value;
      best.s = params[k] + (params[k + 1] - params[k]) * sm.lambda;
      best.valid = true;
    }
    a0 = std::move(a1);
    b0 = std::move(b1);
  }
  return best;
}

void check_same_levels(const PLMap& a, const PLMap& b) {
  if (a.domain().n() != b.domain().n() || a.codomain().n() != b.codomain().n())
    throw PreconditionError("maps have different domain or codomain levels");
}

MapDistance reduce_edges(const PLMap& a, const std::vector<EdgeMinimum>& per_edge) {
  std::size_t best = 0;
  for (std::size_t e = 1; e < per_edge.size(); ++e)
    if (per_edge[e].value < per_edge[best].value) best = e;
  return MapDistance{per_edge[best].value, a.domain().point_on_edge(best, per_edge[best].s)};
}

}  // namespace

MapDistance min_map_distance_serial(const PLMap& a, const PLMap& b) {
  check_same_levels(a, b);
  std::vector<EdgeMinimum> per_edge(a.domain().edge_count());
  for (std::size_t e = 0; e < per_edge.size(); ++e) per_edge[e] = edge_min_distance(a, b, e);
  return reduce_edges(a, per_edge);
}

MapDistance min_map_distance(const PLMap& a, const PLMap& b) {
  check_same_levels(a, b);
  std::vector<EdgeMinimum> per_edge(a.domain().edge_count());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t e = 0; e < per_edge.size(); ++e) per_edge[e] = edge_min_distance(a, b, e);
  return reduce_edges(a, per_edge);
}

ProductPoint product_segment_point(const ProductPoint& p, const ProductPoint& q, const Rational& lambda,
                                   const TreeLevel& level) {
  return ProductPoint{point_along(p.first, q.first, lambda * distance(p.first, q.first, level), level),
                      point_along(p.second, q.second, lambda * distance(p.second, q.second, level), level)};
}

bool product_segment_locate(const ProductPoint& p, const ProductPoint& q, const ProductPoint& x,
                            const TreeLevel& level, Rational* lambda) {
  const Rational d1 = distance(p.first, q.first, level);
  const Rational d2 = distance(p.second, q.second, level);
  Rational l;
  if (!d1.is_zero()) {
    const Rational a = distance(p.first, x.first, level);
    if (a + distance(x.first, q.first, level) != d1) return false;
    l = a / d1;
    if (point_along(p.second, q.second, l * d2, level) != x.second) return false;
  } else {
    if (x.first != p.first) return false;
    if (d2.is_zero()) {
      if (x.second != p.second) return false;
      l = Rational(0);
    } else {
      const Rational b = distance(p.second, x.second, level);
      if (b + distance(x.second, q.second, level) != d2) return false;
      l = b / d2;
    }
  }
  if (lambda != nullptr) *lambda = l;
  return true;
}

bool arc_contains(const ProductArc& arc, const ProductPoint& x, const TreeLevel& level) {
  const auto& pts = arc.points;
  if (pts.empty()) return false;
  if (pts.size() == 1) return pts[0] == x;
  // Along a monotone arc the distances from the start grow in both
  // coordinates, so the pair is lexicographically sorted.
  const ProductPoint& start = pts.front();
  const std::pair<Rational, Rational> target{distance(start.first, x.first, level),
                                             distance(start.second, x.second, level)};
  std::size_t lo = 0, hi = pts.size() - 1;  // key(lo) <= target is kept when possible
  while (lo + 1 < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const std::pair<Rational, Rational> key{distance(start.first, pts[mid].first, level),
                                            distance(start.second, pts[mid].second, level)};
    if (key <= target) lo = mid;
    else hi = mid;
  }
  const std::size_t first = lo > 0 ? lo - 1 : 0;
  for (std::size_t k = first; k <= lo + 1 && k + 1 < pts.size(); ++k)
    if (product_segment_locate(pts[k], pts[k + 1], x, level, nullptr)) return true;
  return false;
}

ProductArc simplify_arc(const ProductArc& arc, const TreeLevel& level) {
  std::vector<ProductPoint> pts;
  for (const auto& p : arc.points)
    if (pts.empty() || pts.back() != p) pts.push_back(p);
  if (pts.size() <= 2) return ProductArc{pts};
  std::vector<ProductPoint> out{pts.front()};
  for (std::size_t k = 1; k + 1 < pts.size(); ++k) {
    const ProductPoint& a = out.back();
    const ProductPoint& b = pts[k];
    const ProductPoint& c = pts[k + 1];
    const Rational a1 = distance(a.first, b.first, level), a2 = distance(b.first, c.first, level);
    const Rational b1 = distance(a.second, b.second, level), b2 = distance(b.second, c.second, level);
    const bool straight_first = a1 + a2 == distance(a.first, c.first, level);
    const bool straight_second = b1 + b2 == distance(a.second, c.second, level);
    // b sits at the same fraction of a→c in both coordinates
    const bool same_pace = a1 * (b1 + b2) == b1 * (a1 + a2) || (a1 + a2).is_zero() || (b1 + b2).is_zero();
    if (straight_first && straight_second && same_pace) continue;
    out.push_back(b);
  }
  out.push_back(pts.back());
  return ProductArc{std::move(out)};
}

bool arc_is_monotone(const ProductArc& arc, const TreeLevel& level) {
  if (arc.points.empty()) return false;
  Rational l1(0), l2(0);
  for (std::size_t k = 0; k + 1 < arc.points.size(); ++k) {
    const Rational s1 = distance(arc.points[k].first, arc.points[k + 1].first, level);
    const Rational s2 = distance(arc.points[k].second, arc.points[k + 1].second, level);
    if (s1.is_zero() && s2.is_zero()) return false;
    l1 += s1;
    l2 += s2;
  }
  return l1 == distance(arc.points.front().first, arc.points.back().first, level) &&
         l2 == distance(arc.points.front().second, arc.points.back().second, level);
}

namespace {

struct Positioned {
  Rational pos;  // distance from the common start value
  Rational len;  // arc length along the domain arc
};

std::vector<Positioned> positions_along(const RestrictedMap& r, const TreePoint& v0, const TreePoint& v1,
                                        const Rational& total, const char* which) {
  const TreeLevel& cod = *r.codomain;
  std::vector<Positioned> out;
  out.reserve(r.samples.size());
  for (const auto& s : r.samples) {
    Rational pos = distance(v0, s.value, cod);
    if (pos + distance(s.value, v1, cod) != total || (!out.empty() && pos < out.back().pos))
      throw PreconditionError(std::string("trace_coincidence_arc: ") + which + " is not monotone onto [" + v0.str() +
                              ", " + v1.str() + "] at " + s.point.str());
    out.push_back(Positioned{std::move(pos), s.len});
  }
  return out;
}

// Arc-length range [lo, hi] of the samples whose value sits at position q.
std::pair<Rational, Rational> level_set(const std::vector<Positioned>& v, std::size_t& cursor, const Rational& q) {
  while (cursor + 1 < v.size() && v[cursor + 1].pos < q) ++cursor;
  if (v[cursor].pos == q || (cursor + 1 < v.size() && v[cursor + 1].pos == q)) {
    std::size_t k = v[cursor].pos == q ? cursor : cursor + 1;
    const Rational lo = v[k].len;
    while (k + 1 < v.size() && v[k + 1].pos == q) ++k;
    return {lo, v[k].len};
  }
  const Positioned& a = v[cursor];
  const Positioned& b = v[cursor + 1];
  const Rational len = a.len + (b.len - a.len) * (q - a.pos) / (b.pos - a.pos);
  return {len, len};
}

}  // namespace

ProductArc trace_coincidence_arc(const RestrictedMap& g, const RestrictedMap& f) {
  if (g.codomain->n() != f.codomain->n() || g.domain->n() != f.domain->n())
    throw PreconditionError("trace_coincidence_arc: restrictions live on different levels");
  if (g.samples.empty() || f.samples.empty()) throw PreconditionError("trace_coincidence_arc: empty restriction");
  const TreeLevel& cod = *g.codomain;
  const TreeLevel& dom = *g.domain;
  const TreePoint& v0 = g.samples.front().value;
  const TreePoint& v1 = g.samples.back().value;
  if (f.samples.front().value != v0 || f.samples.back().value != v1)
    throw PreconditionError("trace_coincidence_arc: end values disagree (g: " + v0.str() + " → " + v1.str() +
                            ", f: " + f.samples.front().value.str() + " → " + f.samples.back().value.str() + ")");
  const Rational total = distance(v0, v1, cod);
  const auto gp = positions_along(g, v0, v1, total, "g");
  const auto fp = positions_along(f, v0, v1, total, "f");

  std::vector<Rational> qs;
  qs.reserve(gp.size() + fp.size());
  for (const auto& x : gp) qs.push_back(x.pos);
  for (const auto& x : fp) qs.push_back(x.pos);
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());

  ProductArc arc;
  std::size_t gc = 0, fc = 0;
  auto push = [&](const Rational& x_len, const Rational& y_len) {
    ProductPoint pt{point_along(g.from, g.to, x_len, dom), point_along(f.from, f.to, y_len, dom)};
    if (arc.points.empty() || arc.points.back() != pt) arc.points.push_back(std::move(pt));
  };
  for (const auto& q : qs) {
    const auto [xlo, xhi] = level_set(gp, gc, q);
    const auto [ylo, yhi] = level_set(fp, fc, q);
    push(xlo, ylo);
    push(xhi, ylo);
    push(xhi, yhi);
  }
  return arc;
}

PreimageResult preimage_components(const PLMap& m, const TreePoint& y) {
  const TreeLevel& dom = m.domain();
  const TreeLevel& cod = m.codomain();
  std::map<TreePoint, std::size_t> node_id;
  std::vector<std::size_t> parent;
  std::vector<bool> has_link;
  auto node = [&](const TreePoint& p) {
    auto [it, inserted] = node_id.emplace(p, parent.size());
    if (inserted) {
      parent.push_back(parent.size());
      has_link.push_back(false);
    }
    return it->second;
  };
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  PreimageResult result;
  for (std::size_t e = 0; e < dom.edge_count(); ++e) {
    const auto& t = m.table(e);
    for (const auto& b : t)
      if (b.value == y) node(dom.point_on_edge(e, b.s));
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
      const TreePoint& v0 = t[k].value;
      const TreePoint& v1 = t[k + 1].value;
      if (v0 == y && v1 == y) {
        const std::size_t a = find(node(dom.point_on_edge(e, t[k].s)));
        const std::size_t b = find(node(dom.point_on_edge(e, t[k + 1].s)));
        parent[b] = a;
        has_link[a] = true;
      } else if (v0 != y && v1 != y && v0 != v1 && on_geodesic(y, v0, v1, cod)) {
        const Rational frac = distance(v0, y, cod) / distance(v0, v1, cod);
        result.components.push_back(
            PreimageComponent{dom.point_on_edge(e, t[k].s + (t[k + 1].s - t[k].s) * frac), false});
      }
    }
  }
  std::map<std::size_t, PreimageComponent> groups;
  for (const auto& [pt, id] : node_id) {
    const std::size_t root = find(id);
    auto it = groups.find(root);
    if (it == groups.end()) groups.emplace(root, PreimageComponent{pt, false});
  }
  for (std::size_t id = 0; id < parent.size(); ++id)
    if (has_link[id]) groups[find(id)].interval = true;
  for (auto& [root, comp] : groups) result.components.push_back(comp);
  std::sort(result.components.begin(), result.components.end(),
            [](const PreimageComponent& a, const PreimageComponent& b) { return a.representative < b.representative; });
  result.count = static_cast<int>(result.components.size());
  return result;
}

namespace {
// Candidate order: the whole spine by coordinate, then each leg by (p, leg, t).
bool spine_first(const TreePoint& a, const TreePoint& b) {
  if (a.is_spine() != b.is_spine()) return a.is_spine();
  return a < b;
}
}  // namespace

std::vector<TreePoint> valence_candidates(const PLMap& m) {
  const TreeLevel& cod = m.codomain();
  std::vector<TreePoint> crit;
  for (const auto& t : m.tables())
    for (const auto& b : t) crit.push_back(b.value);
  for (const auto& v : cod.spine_vertices()) crit.push_back(TreePoint::spine(v));
  for (const auto& p : cod.attachments())
    for (int i = 0; i < 3; ++i) crit.push_back(TreePoint::on_leg(p, i, Rational(1)));
  std::sort(crit.begin(), crit.end(), spine_first);
  crit.erase(std::unique(crit.begin(), crit.end()), crit.end());

  std::vector<TreePoint> out = crit;
  const Rational half(1, 2);
  std::size_t k = 0;
  std::vector<Rational> spine;
  while (k < crit.size() && crit[k].is_spine()) spine.push_back(crit[k++].base);
  for (std::size_t j = 0; j + 1 < spine.size(); ++j) out.push_back(TreePoint::spine((spine[j] + spine[j + 1]) * half));
  while (k < crit.size()) {
    const Rational p = crit[k].base;
    const int leg = crit[k].leg;
    Rational prev(0);
    for (; k < crit.size() && crit[k].base == p && crit[k].leg == leg; ++k) {
      out.push_back(TreePoint::on_leg(p, leg, (prev + crit[k].t) * half));
      prev = crit[k].t;
    }
  }
  std::sort(out.begin(), out.end(), spine_first);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Valence valence_serial(const PLMap& m) {
  Valence best{-1, TreePoint{}};
  for (const auto& y : valence_candidates(m)) {
    const int c = preimage_components(m, y).count;
    if (c > best.count) best = Valence{c, y};
  }
  return best;
}

Valence valence(const PLMap& m) {
  const TreeLevel& dom = m.domain();
  const TreeLevel& cod = m.codomain();
  const std::vector<TreePoint> cands = valence_candidates(m);
  const std::size_t n = cands.size();
  // cands comes back in spine_first order
  std::size_t spine_end = 0;
  while (spine_end < n && cands[spine_end].is_spine()) ++spine_end;
  std::map<std::pair<int, int>, std::pair<std::size_t, std::size_t>> leg_block;
  for (std::size_t k = spine_end; k < n;) {
    std::size_t j = k;
    while (j < n && cands[j].base == cands[k].base && cands[j].leg == cands[k].leg) ++j;
    leg_block[{cod.attachment_index(cands[k].base), cands[k].leg}] = {k, j};
    k = j;
  }
  auto index_of = [&](const TreePoint& y) -> std::size_t {
    auto it = std::lower_bound(cands.begin(), cands.end(), y, spine_first);
    return static_cast<std::size_t>(it - cands.begin());
  };
  // candidate indices strictly inside the open parameter range of a piece
  auto open_range = [&](const GeodesicPiece& piece) -> std::pair<std::size_t, std::size_t> {
    const Rational& lo = min(piece.from, piece.to);
    const Rational& hi = max(piece.from, piece.to);
    std::size_t b = 0, e = 0;
    if (piece.leg < 0) {
      b = 0;
      e = spine_end;
    } else {
      auto it = leg_block.find({cod.attachment_index(piece.p), piece.leg});
      if (it == leg_block.end()) return {0, 0};
      std::tie(b, e) = it->second;
    }
    auto key = [&](std::size_t k) -> const Rational& { return piece.leg < 0 ? cands[k].base : cands[k].t; };
    std::size_t first = b, last = e;
    {
      std::size_t l = b, r = e;
      while (l < r) {
        const std::size_t mid = (l + r) / 2;
        if (key(mid) <= lo) l = mid + 1; else r = mid;
      }
      first = l;
    }
    {
      std::size_t l = first, r = e;
      while (l < r) {
        const std::size_t mid = (l + r) / 2;
        if (key(mid) < hi) l = mid + 1; else r = mid;
      }
      last = l;
    }
    return {first, last};
  };

  struct Link {
    std::size_t e, k;
  };
  std::vector<Link> links;
  for (std::size_t e = 0; e < dom.edge_count(); ++e)
    for (std::size_t k = 0; k + 1 < m.table(e).size(); ++k) links.push_back(Link{e, k});

  std::vector<long> total(n + 1, 0);
#pragma omp parallel
  {
    std::vector<long> local(n + 1, 0);
#pragma omp for schedule(dynamic, 64) nowait
    for (std::size_t li = 0; li < links.size(); ++li) {
      const auto& t = m.table(links[li].e);
      const std::size_t k = links[li].k;
      const TreePoint& v0 = t[k].value;
      const TreePoint& v1 = t[k + 1].value;
      if (v0 == v1) {
        // a constant link joins its two end nodes into one component
        const std::size_t c = index_of(v0);
        local[c] -= 1;
        local[c + 1] += 1;
        continue;
      }
      const auto pieces = geodesic_pieces(v0, v1, cod);
      for (std::size_t j = 0; j < pieces.size(); ++j) {
        const auto [a, b] = open_range(pieces[j]);
        if (a < b) {
          local[a] += 1;
          local[b] -= 1;
        }
        if (j + 1 < pieces.size()) {
          const std::size_t c = index_of(piece_point(pieces[j], pieces[j].to));
          local[c] += 1;
          local[c + 1] -= 1;
        }
      }
    }
    // distinct domain nodes: skip the shared first breakpoint of later spine edges and of legs
#pragma omp for schedule(static) nowait
    for (std::size_t e = 0; e < dom.edge_count(); ++e) {
      const auto& t = m.table(e);
      const std::size_t start = (e == 0) ? 0 : 1;
      for (std::size_t k = start; k < t.size(); ++k) {
        const std::size_t c = index_of(t[k].value);
        local[c] += 1;
        local[c + 1] -= 1;
      }
    }
#pragma omp critical
    for (std::size_t k = 0; k <= n; ++k) total[k] += local[k];
  }
  Valence best{-1, TreePoint{}};
  long running = 0;
  for (std::size_t k = 0; k < n; ++k) {
    running += total[k];
    if (running > best.count) best = Valence{static_cast<int>(running), cands[k]};
  }
  return best;
}

}  // namespace treelike
