#pragma once

#include <string>
#include <vector>

#include "treelike/construction.hpp"

namespace treelike {

/// The arc decomposition of T_n used by the figures: the spine first, then
/// every leg, larger triods to the left (ties by attachment point, then leg
/// index), laid end to end with a fixed gap.
class FlatLayout {
 public:
  explicit FlatLayout(const TreeLevel& level);

  struct Arc {
    int leg;     ///< -1 for the spine
    Rational p;  ///< attachment point (legs)
    Rational offset, length;
  };
  const std::vector<Arc>& arcs() const { return arcs_; }
  const Rational& width() const { return width_; }
  /// Flat coordinate of a canonical point (a leg's base counts as the spine point).
  Rational coordinate(const TreePoint& x) const;
  /// Flat coordinate of parameter `param` on a geodesic piece.
  Rational coordinate(const GeodesicPiece& piece, const Rational& param) const;

  static Rational gap() { return Rational(1, 16); }
  /// Legs are drawn at this fraction of their metric length so the spine
  /// block stays readable next to the length-1 legs at 0 and 2/3.
  static Rational leg_scale() { return Rational(1, 3); }

 private:
  const TreeLevel* level_;
  std::vector<Arc> arcs_;
  std::vector<std::size_t> leg_arc_;  ///< indexed by 3·attachment + leg
  Rational width_;
};

/// Text used in the map figure for a point of T_n: "0", "1", "ε_n", a
/// fraction, "F^{p}_i" for a leg tip, or "F^{p}_i(t)".
std::string point_label(const TreePoint& y, int n);

struct MapLabel {
  TreePoint x;  ///< ruled point of T_{n+1}
  char row;     ///< a..g
  std::string f, g;
};
/// One entry per point of ruled_set(n), in its order.
std::vector<MapLabel> map_labels(int n, const PLMap& f, const PLMap& g);

/// SVG documents.  Coordinates are exact until emission, then rounded half
/// to even at two decimals, so output is byte-stable.
std::string render_tree(int n);
std::string render_gamma(const GammaSet& gamma);
std::string render_maps(int n, const PLMap& f, const PLMap& g);

}  // namespace treelike
