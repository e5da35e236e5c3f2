#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "treelike/rational.hpp"
#include "treelike/tree.hpp"

namespace treelike {

class CompositionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Breakpoint {
  Rational s;       ///< edge parameter
  TreePoint value;  ///< image in the codomain
  friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// A piecewise-geodesic map between tree levels.
///
/// Each domain edge carries a breakpoint table. Between consecutive
/// breakpoints the image runs along the codomain geodesic at constant speed
/// in the edge parameter. Tables are validated on construction: parameters
/// strictly increase and span the edge, values lie in the codomain, and edges
/// meeting at a vertex agree there.
class PLMap {
 public:
  PLMap(std::shared_ptr<const TreeLevel> domain, std::shared_ptr<const TreeLevel> codomain,
        std::vector<std::vector<Breakpoint>> tables);

  /// Inclusion of T_n into itself.
  static PLMap identity(std::shared_ptr<const TreeLevel> level);

  const TreeLevel& domain() const { return *domain_; }
  const TreeLevel& codomain() const { return *codomain_; }
  const std::shared_ptr<const TreeLevel>& domain_ptr() const { return domain_; }
  const std::shared_ptr<const TreeLevel>& codomain_ptr() const { return codomain_; }

  const std::vector<Breakpoint>& table(std::size_t e) const { return tables_[e]; }
  const std::vector<std::vector<Breakpoint>>& tables() const { return tables_; }
  std::size_t breakpoint_count() const;

  TreePoint eval(const TreePoint& x) const;
  TreePoint eval_on_edge(std::size_t e, const Rational& s) const;

  /// Same map with every redundant breakpoint removed. Two maps are equal iff
  /// their simplified tables are identical.
  PLMap simplified() const;
  /// Same map with an extra breakpoint at parameter s of edge e.
  PLMap refined(std::size_t e, const Rational& s) const;

 private:
  std::shared_ptr<const TreeLevel> domain_;
  std::shared_ptr<const TreeLevel> codomain_;
  std::vector<std::vector<Breakpoint>> tables_;
};

/// Value of m at x; throws InvalidPointError if x is not in the domain.
TreePoint eval(const PLMap& m, const TreePoint& x);

/// outer ∘ inner. Throws CompositionError on a level mismatch.
PLMap compose(const PLMap& outer, const PLMap& inner);

/// Exact equality by common refinement.
bool equal(const PLMap& a, const PLMap& b);
/// A domain point where a and b differ (the first breakpoint of the common
/// refinement, in edge order), or nullopt if they are equal.  Throws
/// PreconditionError on a level mismatch.
std::optional<TreePoint> first_difference(const PLMap& a, const PLMap& b);

/// Minimum of d(a(x), b(x)) over a closed product segment
/// λ ↦ (a0→a1, b0→b1) at constant speed, with an attaining λ in [0,1].
struct SegmentMinimum {
  Rational value;
  Rational lambda;
};
SegmentMinimum min_pair_distance(const TreePoint& a0, const TreePoint& a1, const TreePoint& b0, const TreePoint& b1,
                                 const TreeLevel& level);

struct MapDistance {
  Rational value;
  TreePoint witness;
};

/// Exact min over the domain of d(a(x), b(x)) with an attaining point.
/// The default entry point runs the OpenMP kernel; the serial reference is
/// kept for cross-checking.
MapDistance min_map_distance(const PLMap& a, const PLMap& b);
MapDistance min_map_distance_serial(const PLMap& a, const PLMap& b);

/// A map restricted to the domain arc [from, to]: every breakpoint met along
/// the arc, with its arc length from `from`.
struct RestrictedSample {
  Rational len;
  TreePoint point;
  TreePoint value;
};
struct RestrictedMap {
  std::shared_ptr<const TreeLevel> domain;
  std::shared_ptr<const TreeLevel> codomain;
  TreePoint from, to;
  std::vector<RestrictedSample> samples;  ///< includes both ends
};
RestrictedMap restrict_map(const PLMap& m, const TreePoint& from, const TreePoint& to);

/// A point of T × T.
struct ProductPoint {
  TreePoint first, second;
  friend bool operator==(const ProductPoint&, const ProductPoint&) = default;
  friend auto operator<=>(const ProductPoint&, const ProductPoint&) = default;
};

/// Polyline in T × T; both coordinates move along geodesics at constant speed
/// between consecutive points.
struct ProductArc {
  std::vector<ProductPoint> points;
};

/// The point at fraction λ of the product segment p → q.
ProductPoint product_segment_point(const ProductPoint& p, const ProductPoint& q, const Rational& lambda,
                                   const TreeLevel& level);
/// Fraction λ at which the segment p → q passes through x, if it does.
bool product_segment_locate(const ProductPoint& p, const ProductPoint& q, const ProductPoint& x,
                            const TreeLevel& level, Rational* lambda);
/// Point-on-arc test by bisection; the arc must be monotone.
bool arc_contains(const ProductArc& arc, const ProductPoint& x, const TreeLevel& level);
/// Drops repeated points and merges collinear constant-speed segments.
ProductArc simplify_arc(const ProductArc& arc, const TreeLevel& level);
/// Sum of coordinate path lengths equals the coordinate distances.
bool arc_is_monotone(const ProductArc& arc, const TreeLevel& level);

/// Monotone arc inside {(x,y) : g(x) = f(y)} from (g.from, f.from) to
/// (g.to, f.to). Both restrictions must be monotone onto one common codomain
/// geodesic with matching end values, else PreconditionError. When both sides
/// are flat at the same value, the first coordinate advances first.
ProductArc trace_coincidence_arc(const RestrictedMap& g, const RestrictedMap& f);

struct PreimageComponent {
  TreePoint representative;
  bool interval = false;  ///< true when the component is more than a point
};
struct PreimageResult {
  int count = 0;
  std::vector<PreimageComponent> components;
};
PreimageResult preimage_components(const PLMap& m, const TreePoint& y);

struct Valence {
  int count = 0;
  TreePoint witness;
};
/// Maximum number of preimage components, swept over critical values and the
/// midpoints between them. OpenMP kernel; `valence_serial` is the direct
/// per-candidate reference.
Valence valence(const PLMap& m);
Valence valence_serial(const PLMap& m);
/// Candidate values used by both valence routines: spine points by coordinate, then each leg by t.
std::vector<TreePoint> valence_candidates(const PLMap& m);

}  // namespace treelike
