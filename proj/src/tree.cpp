#include "treelike/tree.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "treelike/tent.hpp"

namespace treelike {

namespace {

const std::vector<Rational>& base_targets() {
  static const std::vector<Rational> targets{Rational(1, 3), Rational(1)};
  return targets;
}

}  // namespace

TreePoint TreePoint::on_leg(Rational p, int i, Rational t) {
  if (t.is_zero()) return spine(std::move(p));
  return TreePoint{std::move(p), i, std::move(t)};
}

std::string TreePoint::str() const {
  if (is_spine()) return "S:" + base.str();
  return "L:" + base.str() + ":" + std::to_string(leg) + ":" + t.str();
}

TreePoint TreePoint::parse(std::string_view text) {
  auto fail = [&] { return InvalidPointError("malformed tree point '" + std::string(text) + "'"); };
  if (text.size() < 3 || text[1] != ':') throw fail();
  try {
    if (text[0] == 'S') return spine(Rational::parse(text.substr(2)));
    if (text[0] != 'L') throw fail();
    std::string_view rest = text.substr(2);
    const auto c1 = rest.find(':');
    if (c1 == std::string_view::npos) throw fail();
    const auto c2 = rest.find(':', c1 + 1);
    if (c2 == std::string_view::npos || c2 != c1 + 2) throw fail();
    const char leg = rest[c1 + 1];
    if (leg < '0' || leg > '2') throw fail();
    return raw_leg(Rational::parse(rest.substr(0, c1)), leg - '0', Rational::parse(rest.substr(c2 + 1)));
  } catch (const DomainError&) {
    throw fail();
  }
}

Rational TreeLevel::leg_length_rule(const Rational& p) {
  if (p == Rational(0) || p == Rational(2, 3)) return Rational(1);
  const int m = tent2_depth(p, base_targets());
  if (m < 0) throw InvalidPointError("no triod is ever attached at " + p.str());
  return pow2(-(m + 1));
}

TreeLevel::TreeLevel(int n) : n_(n) {
  if (n < 0) throw DomainError("tree level must be non-negative");
  attachments_ = attachment_points(n);
  leg_lengths_.reserve(attachments_.size());
  for (const auto& p : attachments_) leg_lengths_.push_back(leg_length_rule(p));
  vertices_ = attachments_;
  vertices_.push_back(Rational(0));
  vertices_.push_back(Rational(1));
  std::sort(vertices_.begin(), vertices_.end());
  vertices_.erase(std::unique(vertices_.begin(), vertices_.end()), vertices_.end());
  for (std::size_t k = 0; k + 1 < vertices_.size(); ++k)
    edges_.push_back(Edge{-1, Rational(0), vertices_[k], vertices_[k + 1], vertices_[k + 1] - vertices_[k]});
  for (std::size_t a = 0; a < attachments_.size(); ++a)
    for (int i = 0; i < 3; ++i) edges_.push_back(Edge{i, attachments_[a], Rational(0), Rational(1), leg_lengths_[a]});
}

int TreeLevel::attachment_index(const Rational& p) const {
  auto it = std::lower_bound(attachments_.begin(), attachments_.end(), p);
  if (it == attachments_.end() || *it != p) return -1;
  return static_cast<int>(it - attachments_.begin());
}

const Rational& TreeLevel::leg_length(const Rational& p) const {
  const int idx = attachment_index(p);
  if (idx < 0) throw InvalidPointError("no triod at " + p.str() + " in T_" + std::to_string(n_));
  return leg_lengths_[static_cast<std::size_t>(idx)];
}

std::size_t TreeLevel::spine_edge_at(const Rational& s) const {
  auto it = std::upper_bound(vertices_.begin(), vertices_.end(), s);
  std::size_t k = static_cast<std::size_t>(it - vertices_.begin());
  if (k == 0) return 0;
  --k;
  return std::min(k, spine_edge_count() - 1);
}

std::pair<std::size_t, Rational> TreeLevel::locate(const TreePoint& x) const {
  if (x.is_spine()) return {spine_edge_at(x.base), x.base};
  const int idx = attachment_index(x.base);
  if (idx < 0) throw InvalidPointError("point " + x.str() + " is not in T_" + std::to_string(n_));
  return {leg_edge(idx, x.leg), x.t};
}

TreePoint TreeLevel::point_on_edge(std::size_t e, const Rational& s) const {
  const Edge& edge = edges_[e];
  if (edge.leg < 0) return TreePoint::spine(s);
  return TreePoint::on_leg(edge.p, edge.leg, s);
}

bool TreeLevel::contains(const TreePoint& x) const {
  if (x.is_spine()) return x.base >= Rational(0) && x.base <= Rational(1);
  return x.leg >= 0 && x.leg <= 2 && has_attachment(x.base) && x.t > Rational(0) && x.t <= Rational(1);
}

std::shared_ptr<const TreeLevel> tree_level(int n) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const TreeLevel>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const TreeLevel>(n);
  return slot;
}

std::vector<Rational> attachment_points(int n) {
  if (n < 0) throw DomainError("tree level must be non-negative");
  std::vector<Rational> pts = tent2_preimage_union(base_targets(), 0, n - 1);
  pts.push_back(Rational(0));
  pts.push_back(Rational(2, 3));
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::size_t triod_count(int n) { return attachment_points(n).size(); }

TreePoint canonicalize(const TreePoint& raw, const TreeLevel& level) {
  if (raw.is_spine()) {
    if (raw.base < Rational(0) || raw.base > Rational(1))
      throw InvalidPointError("spine coordinate " + raw.base.str() + " outside [0,1]");
    return TreePoint::spine(raw.base);
  }
  if (raw.leg > 2) throw InvalidPointError("leg index out of range in " + raw.str());
  if (!level.has_attachment(raw.base))
    throw InvalidPointError(raw.base.str() + " is not an attachment point of T_" + std::to_string(level.n()));
  if (raw.t < Rational(0) || raw.t > Rational(1)) throw InvalidPointError("leg parameter outside [0,1] in " + raw.str());
  return TreePoint::on_leg(raw.base, raw.leg, raw.t);
}

namespace {

void push_piece(std::vector<GeodesicPiece>& out, int leg, const Rational& p, const Rational& from,
                const Rational& to, const Rational& scale) {
  if (from == to) return;
  out.push_back(GeodesicPiece{leg, p, from, to, abs(to - from) * scale});
}

}  // namespace

std::vector<GeodesicPiece> geodesic_pieces(const TreePoint& a, const TreePoint& b, const TreeLevel& level) {
  std::vector<GeodesicPiece> out;
  const Rational one(1), zero(0);
  if (a.is_spine() && b.is_spine()) {
    push_piece(out, -1, zero, a.base, b.base, one);
    return out;
  }
  if (!a.is_spine() && !b.is_spine() && a.base == b.base && a.leg == b.leg) {
    push_piece(out, a.leg, a.base, a.t, b.t, level.leg_length(a.base));
    return out;
  }
  if (!a.is_spine()) push_piece(out, a.leg, a.base, a.t, zero, level.leg_length(a.base));
  push_piece(out, -1, zero, a.base, b.base, one);
  if (!b.is_spine()) push_piece(out, b.leg, b.base, zero, b.t, level.leg_length(b.base));
  return out;
}

TreePoint piece_point(const GeodesicPiece& piece, const Rational& param) {
  if (piece.leg < 0) return TreePoint::spine(param);
  return TreePoint::on_leg(piece.p, piece.leg, param);
}

std::vector<TreePoint> geodesic(const TreePoint& a, const TreePoint& b, const TreeLevel& level) {
  std::vector<TreePoint> out{a};
  for (const auto& piece : geodesic_pieces(a, b, level)) {
    TreePoint end = piece_point(piece, piece.to);
    if (end != out.back()) out.push_back(std::move(end));
  }
  return out;
}

Rational distance(const TreePoint& a, const TreePoint& b, const TreeLevel& level) {
  if (a.is_spine() && b.is_spine()) return abs(a.base - b.base);
  if (!a.is_spine() && !b.is_spine() && a.base == b.base && a.leg == b.leg)
    return abs(a.t - b.t) * level.leg_length(a.base);
  Rational d = abs(a.base - b.base);
  if (!a.is_spine()) d += a.t * level.leg_length(a.base);
  if (!b.is_spine()) d += b.t * level.leg_length(b.base);
  return d;
}

TreePoint point_along(const TreePoint& a, const TreePoint& b, const Rational& len, const TreeLevel& level) {
  if (len.sign() <= 0) return a;
  Rational remaining = len;
  const auto pieces = geodesic_pieces(a, b, level);
  for (const auto& piece : pieces) {
    if (remaining < piece.length) {
      const Rational frac = remaining / piece.length;
      return piece_point(piece, piece.from + (piece.to - piece.from) * frac);
    }
    remaining -= piece.length;
  }
  return b;
}

bool on_geodesic(const TreePoint& x, const TreePoint& a, const TreePoint& b, const TreeLevel& level) {
  return distance(a, x, level) + distance(x, b, level) == distance(a, b, level);
}

}  // namespace treelike
