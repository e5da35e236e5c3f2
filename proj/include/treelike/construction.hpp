#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "treelike/pl_map.hpp"
#include "treelike/rational.hpp"
#include "treelike/tree.hpp"

namespace treelike {

/// Raised when the recursive construction cannot proceed; the message names
/// the level and the condition instance or ruled point involved.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Condition { C1 = 1, C2, C3, C4, C5, C6 };

/// One arc of Γ_n together with the condition instance it realizes.
///   C1: piece 0..2 (the three arcs of the spine part, left to right)
///   C3: p ∈ {0, 2/3}, leg i; at 2/3 piece 0 starts above 2/3, piece 1 below
///   C4, C5, C6: attachment/spine point p and leg i
struct GammaArc {
  Condition condition = Condition::C1;
  int piece = 0;
  Rational p;
  int leg = -1;
  ProductArc arc;

  std::string label() const;
};

struct GammaSet {
  int n = 0;
  std::vector<GammaArc> arcs;

  std::size_t point_count() const;
};

/// The leg selector j on {2/9, 4/9, 8/9} ∪ ⋃_m tau_2^{-m}{1/9, 5/9, 7/9}.
/// Throws DomainError outside that set.
int j_index(const Rational& x);

/// Γ_0: every condition arc is the polyline through its mandated points.
GammaSet build_gamma0();

enum class RuledRow { A, B, C, D, E, F, G };
char row_letter(RuledRow row);

struct RuledPoint {
  TreePoint point;
  RuledRow row = RuledRow::A;
  int part = 1;  ///< first or second case of rows (c), (e), (f), (g)
};

/// The finite set R ⊂ T_{n+1} on which f_n, g_n are tabulated.
struct RuledSet {
  int n = 0;
  std::vector<RuledPoint> points;  ///< sorted by point
  /// Consecutive ruled points along each domain edge of T_{n+1}, as indices
  /// into `points`, ordered by edge and then by edge parameter.
  std::vector<std::pair<std::size_t, std::size_t>> adjacency;
  std::vector<std::size_t> adjacency_edge;  ///< domain edge of each adjacent pair

  /// Index of x in points, or -1.
  long find(const TreePoint& x) const;
};

RuledSet ruled_set(int n);

/// Hook for deliberately corrupting table values (regression tripwire tests).
/// Receives the level, the ruled point and the correct value; returns the
/// value to use instead.
using ValueMutation = std::function<ProductPoint(int n, const RuledPoint& x, const ProductPoint& value)>;

/// Named mutations understood by the CLI and the acceptance suite:
///   "swap-d"   row (d): exchange the legs of f and g
///   "leg-g"    row (g) first case: g climbs leg i+1 instead of leg i
///   "leg-e"    row (e) first case: f climbs leg j+1 instead of leg j
///   "collapse-b" row (b): the value becomes (0, ε_n), the value of row (a)
/// Returns std::nullopt for unknown names.
std::optional<ValueMutation> named_mutation(const std::string& name, int at_level);
std::vector<std::string> mutation_names();

/// Where an instance's coordinate is allowed to live.
struct Region {
  enum Kind { Spine, Leg, Point } kind = Spine;
  Rational p;   ///< leg attachment point, or the fixed spine point
  int leg = -1;
  bool contains(const TreePoint& x) const;
};

/// One condition instance of Γ_n with its prescribed endpoints.
struct ConditionInstance {
  Condition condition = Condition::C1;
  int piece = 0;
  Rational p;
  int leg = -1;
  ProductPoint start, end;
  Region first, second;
  std::string label() const;
};

/// Every C1 and C3–C6 instance required of Γ_n, in a fixed order.
std::vector<ConditionInstance> condition_instances(int n);
/// The points (p, tau_2(p)), p ∈ ⋃_{m<=n} tau_2^{-m}{1/3,1}, that A must contain.
std::vector<ProductPoint> mandated_points(int n);

/// (f_n(x), g_n(x)) for a ruled point, per the value tables. Rows (b) and
/// (c, second case) intersect C1 arcs of Γ_n. Throws ConstructionError when
/// an intersection is missing or not unique, or when the value is off Γ_n.
ProductPoint ruled_value(int n, const RuledPoint& x, const GammaSet& gamma);

/// How build_maps spreads the domain parameter along each traversed arc of Γ_n.
enum class Parameterization {
  /// Weight each traversed segment by the first coordinate's arc length (the
  /// second coordinate's where the first is stationary) and cross every gap
  /// between ruled points at two consecutive power-of-two speeds, fast then
  /// slow.  All slopes then stay inside a fixed multiplicative group, so
  /// denominators grow additively from level to level.
  FirstCoordinate,
  /// Parameter proportional to the sum of both coordinates' arc lengths at a
  /// single speed per gap.  Exact but denominators roughly triple in bit
  /// length per level; usable only for shallow towers.
  ProductArclength,
};

struct MapPair {
  PLMap f;
  PLMap g;
  /// Non-strict builds only: gaps that were bridged off Γ, one line each.
  std::vector<std::string> off_gamma;
};

struct BuildOptions {
  Parameterization parameterization = Parameterization::FirstCoordinate;
  ValueMutation mutation;  ///< empty: tables as specified
  /// When false, a ruled value off Γ_n or a gap without a unique monotone arc
  /// is bridged by the straight product segment instead of throwing, so the
  /// downstream checks can report what breaks.
  bool strict = true;
};

/// Builds f_n, g_n : T_{n+1} → T_n so that (f_n, g_n) runs through the unique
/// monotone arc of Γ_n between the values at adjacent ruled points.
MapPair build_maps(int n, const GammaSet& gamma, const BuildOptions& options = {});

/// Γ_{n+1} ⊂ [g_n, f_n]: checks the endpoint equalities of every condition
/// instance and traces the arcs. Throws ConstructionError naming the instance
/// whose endpoints disagree.
GammaSet next_gamma(int n, const PLMap& f, const PLMap& g);

struct CheckEntry {
  std::string name;
  bool pass = true;
  std::string detail;  ///< witness or failure reason
};

struct CheckReport {
  std::vector<CheckEntry> entries;
  bool ok() const;
  std::size_t failures() const;
  const CheckEntry* first_failure() const;
  void add(std::string name, bool pass, std::string detail = {});
};

/// Checks (C1)–(C6) for Γ at level n, every arc's monotonicity and region,
/// and exact disjointness from the diagonal.
CheckReport verify_gamma(const GammaSet& gamma, int n);

/// Checks Γ_{n+1} ⊂ [g_n, f_n]: every arc breakpoint satisfies g(x) = f(y),
/// every segment stays in the coincidence set (exact, via the breakpoints of
/// both maps along it), and `samples_per_arc` interior points per arc.
CheckReport verify_containment(const GammaSet& next, const PLMap& f, const PLMap& g, int samples_per_arc = 100);

/// True iff (x, y) lies on some arc of Γ.
bool gamma_contains(const GammaSet& gamma, const ProductPoint& x);

}  // namespace treelike
