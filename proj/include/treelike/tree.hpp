#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "treelike/rational.hpp"

namespace treelike {

class InvalidPointError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point of a tree T_n: either a spine coordinate in [0,1], or a point at
/// parameter t in (0,1] on leg i of the triod attached at spine point p.
///
/// Leg points with t == 0 are the attachment point itself; the `on_leg`
/// factory folds them onto the spine so structural equality is point equality.
struct TreePoint {
  Rational base;  ///< spine coordinate, or the attachment point p for legs
  int leg = -1;   ///< -1 on the spine, otherwise 0, 1 or 2
  Rational t;     ///< leg parameter; zero on the spine

  static TreePoint spine(Rational s) { return TreePoint{std::move(s), -1, Rational(0)}; }
  static TreePoint on_leg(Rational p, int i, Rational t);
  /// Leg point without folding t == 0; only `canonicalize` should see these.
  static TreePoint raw_leg(Rational p, int i, Rational t) { return TreePoint{std::move(p), i, std::move(t)}; }

  bool is_spine() const { return leg < 0; }

  /// "S:p/q" or "L:p/q:i:t/u".
  std::string str() const;
  static TreePoint parse(std::string_view text);

  friend bool operator==(const TreePoint&, const TreePoint&) = default;
  friend auto operator<=>(const TreePoint&, const TreePoint&) = default;
};

/// One edge of a tree level: a spine segment between consecutive spine
/// vertices, or a whole leg. Edge parameters are the spine coordinate or the
/// leg parameter respectively.
struct Edge {
  int leg = -1;     ///< -1 for spine edges
  Rational p;       ///< attachment point (legs only)
  Rational lo, hi;  ///< parameter range; [0,1] for legs
  Rational length;  ///< metric length of the whole edge
};

/// The tree T_n: the spine [0,1] with a triod attached at every point of
///   {0, 2/3} ∪ ⋃_{m<n} tau_2^{-m}{1/3, 1}.
///
/// Metric: the spine carries its coordinate length. Legs at 0 and 2/3 have
/// length 1; legs at a point of tau_2^{-m}{1/3,1} have length 2^{-(m+1)}.
/// Any positive leg lengths would do; swap `leg_length_rule` to change them.
class TreeLevel {
 public:
  explicit TreeLevel(int n);

  int n() const { return n_; }
  const std::vector<Rational>& attachments() const { return attachments_; }
  /// Index into attachments(), or -1.
  int attachment_index(const Rational& p) const;
  bool has_attachment(const Rational& p) const { return attachment_index(p) >= 0; }
  const Rational& leg_length(const Rational& p) const;
  const Rational& leg_length_at(int attachment_idx) const { return leg_lengths_[static_cast<std::size_t>(attachment_idx)]; }

  /// Sorted {0, 1} ∪ attachments.
  const std::vector<Rational>& spine_vertices() const { return vertices_; }

  std::size_t edge_count() const { return edges_.size(); }
  std::size_t spine_edge_count() const { return vertices_.size() - 1; }
  const Edge& edge(std::size_t e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t leg_edge(int attachment_idx, int i) const {
    return spine_edge_count() + 3 * static_cast<std::size_t>(attachment_idx) + static_cast<std::size_t>(i);
  }
  /// Spine edge containing s; vertices resolve to the edge on their right
  /// (the last edge for s == 1).
  std::size_t spine_edge_at(const Rational& s) const;

  /// Edge and edge parameter of a canonical point. Spine vertices resolve as
  /// in spine_edge_at; attachment points never resolve to a leg.
  std::pair<std::size_t, Rational> locate(const TreePoint& x) const;
  /// The point at parameter s on edge e (canonical).
  TreePoint point_on_edge(std::size_t e, const Rational& s) const;

  bool contains(const TreePoint& x) const;

  static Rational leg_length_rule(const Rational& p);

 private:
  int n_;
  std::vector<Rational> attachments_;
  std::vector<Rational> leg_lengths_;
  std::vector<Rational> vertices_;
  std::vector<Edge> edges_;
};

/// Shared, memoized tree level (thread-safe).
std::shared_ptr<const TreeLevel> tree_level(int n);

/// Exact attachment set of T_n.
std::vector<Rational> attachment_points(int n);
/// Number of triods of T_n.
std::size_t triod_count(int n);

/// Validates a raw point against a level and folds Leg(p,i,0) onto Spine(p).
/// Throws InvalidPointError for points not in the level.
TreePoint canonicalize(const TreePoint& raw, const TreeLevel& level);

/// One straight piece of a geodesic: a spine run, or a run along one leg.
struct GeodesicPiece {
  int leg = -1;    ///< -1 for a spine run
  Rational p;      ///< attachment point for leg runs
  Rational from;   ///< start parameter (spine coordinate or leg t)
  Rational to;     ///< end parameter
  Rational length;
};

/// Pieces of the unique arc from a to b, in travel order; zero-length pieces
/// are omitted, so a == b yields an empty list.
std::vector<GeodesicPiece> geodesic_pieces(const TreePoint& a, const TreePoint& b, const TreeLevel& level);

/// Corner waypoints of the arc from a to b (a, branch entries/exits, b).
std::vector<TreePoint> geodesic(const TreePoint& a, const TreePoint& b, const TreeLevel& level);

Rational distance(const TreePoint& a, const TreePoint& b, const TreeLevel& level);

/// The point at arc length `len` from a towards b; 0 <= len <= distance(a,b).
TreePoint point_along(const TreePoint& a, const TreePoint& b, const Rational& len, const TreeLevel& level);

/// Point at parameter `param` of a piece.
TreePoint piece_point(const GeodesicPiece& piece, const Rational& param);

/// True iff x lies on the arc [a,b].
bool on_geodesic(const TreePoint& x, const TreePoint& a, const TreePoint& b, const TreeLevel& level);

/// The retraction r onto the spine: legs collapse to their attachment point.
inline Rational retract(const TreePoint& x) { return x.base; }

}  // namespace treelike
