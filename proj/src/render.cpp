#include "treelike/render.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "treelike/tent.hpp"

namespace treelike {

namespace {

const Rational kCanvas(900);
const Rational kMargin(40);

std::string num(const Rational& r) { return fixed_half_even(r, 2); }

std::string frac(const Rational& r) {
  if (r.denominator() == 1) return r.numerator().get_str();
  return r.str();
}

class Svg {
 public:
  Svg(const Rational& width, const Rational& height) {
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(width) << "\" height=\""
         << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n"
         << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height)
         << "\" fill=\"white\"/>\n";
  }
  void line(const Rational& x0, const Rational& y0, const Rational& x1, const Rational& y1, const char* style) {
    out_ << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y1)
         << "\" " << style << "/>\n";
  }
  void polyline(const std::vector<std::pair<Rational, Rational>>& pts, const char* style) {
    if (pts.size() < 2) return;
    out_ << "<polyline points=\"";
    for (std::size_t k = 0; k < pts.size(); ++k) out_ << (k ? " " : "") << num(pts[k].first) << ',' << num(pts[k].second);
    out_ << "\" fill=\"none\" " << style << "/>\n";
  }
  void circle(const Rational& x, const Rational& y, const char* r, const char* style) {
    out_ << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << r << "\" " << style << "/>\n";
  }
  void text(const Rational& x, const Rational& y, const std::string& s, const char* style, int rotate = 0) {
    out_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" " << style;
    if (rotate != 0) out_ << " transform=\"rotate(" << rotate << ' ' << num(x) << ' ' << num(y) << ")\"";
    out_ << '>' << s << "</text>\n";
  }
  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  std::ostringstream out_;
};

const char* kThin = "stroke=\"#999999\" stroke-width=\"0.5\"";
const char* kLight = "stroke=\"#bbbbbb\" stroke-width=\"1\" stroke-dasharray=\"4 3\"";
const char* kHeavy = "stroke=\"black\" stroke-width=\"2\" stroke-linejoin=\"round\"";
const char* kTree = "stroke=\"black\" stroke-width=\"1.5\"";
const char* kSmall = "font-family=\"serif\" font-size=\"9\"";

// Flat-coordinate polylines of a product segment, split where either
// coordinate changes arc.
void product_segment_runs(const ProductPoint& a, const ProductPoint& b, const TreeLevel& level,
                          const FlatLayout& layout, std::vector<std::vector<std::pair<Rational, Rational>>>& runs) {
  struct Coord {
    std::vector<GeodesicPiece> pieces;
    std::vector<Rational> starts;  // cumulative length before each piece
    Rational total;
  };
  auto prepare = [&](const TreePoint& p, const TreePoint& q) {
    Coord c{geodesic_pieces(p, q, level), {}, Rational(0)};
    for (const auto& piece : c.pieces) {
      c.starts.push_back(c.total);
      c.total += piece.length;
    }
    return c;
  };
  const Coord c1 = prepare(a.first, b.first);
  const Coord c2 = prepare(a.second, b.second);
  std::vector<Rational> lambdas{Rational(0), Rational(1)};
  for (const Coord* c : {&c1, &c2})
    for (std::size_t k = 1; k < c->starts.size(); ++k) lambdas.push_back(c->starts[k] / c->total);
  std::sort(lambdas.begin(), lambdas.end());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());

  // coordinate at λ using the piece active on (l0, l1)
  auto at = [&](const Coord& c, const TreePoint& fixed, const Rational& l, const Rational& mid) {
    if (c.pieces.empty()) return layout.coordinate(fixed);
    const Rational len = mid * c.total;
    std::size_t k = c.pieces.size() - 1;
    while (k > 0 && c.starts[k] > len) --k;
    const GeodesicPiece& piece = c.pieces[k];
    const Rational param = piece.from + (piece.to - piece.from) * (l * c.total - c.starts[k]) / piece.length;
    return layout.coordinate(piece, param);
  };
  for (std::size_t k = 0; k + 1 < lambdas.size(); ++k) {
    const Rational mid = (lambdas[k] + lambdas[k + 1]) / Rational(2);
    std::pair<Rational, Rational> p0{at(c1, a.first, lambdas[k], mid), at(c2, a.second, lambdas[k], mid)};
    std::pair<Rational, Rational> p1{at(c1, a.first, lambdas[k + 1], mid), at(c2, a.second, lambdas[k + 1], mid)};
    if (runs.empty() || runs.back().back() != p0) runs.push_back({p0});
    runs.back().push_back(std::move(p1));
  }
}

}  // namespace

FlatLayout::FlatLayout(const TreeLevel& level) : level_(&level) {
  arcs_.push_back(Arc{-1, Rational(0), Rational(0), Rational(1)});
  std::vector<std::size_t> order(level.attachments().size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return level.leg_length_at(static_cast<int>(x)) > level.leg_length_at(static_cast<int>(y));
  });
  leg_arc_.assign(3 * order.size(), 0);
  Rational cursor = Rational(1) + gap();
  for (std::size_t a : order)
    for (int i = 0; i < 3; ++i) {
      const Rational len = level.leg_length_at(static_cast<int>(a)) * leg_scale();
      leg_arc_[3 * a + static_cast<std::size_t>(i)] = arcs_.size();
      arcs_.push_back(Arc{i, level.attachments()[a], cursor, len});
      cursor += len + gap();
    }
  width_ = cursor - gap();
}

Rational FlatLayout::coordinate(const TreePoint& x) const {
  if (x.is_spine()) return x.base;
  const int a = level_->attachment_index(x.base);
  const Arc& arc = arcs_[leg_arc_[3 * static_cast<std::size_t>(a) + static_cast<std::size_t>(x.leg)]];
  return arc.offset + x.t * arc.length;
}

Rational FlatLayout::coordinate(const GeodesicPiece& piece, const Rational& param) const {
  if (piece.leg < 0) return param;
  const int a = level_->attachment_index(piece.p);
  const Arc& arc = arcs_[leg_arc_[3 * static_cast<std::size_t>(a) + static_cast<std::size_t>(piece.leg)]];
  return arc.offset + param * arc.length;
}

std::string point_label(const TreePoint& y, int n) {
  if (y.is_spine()) {
    if (y.base == epsilon(n)) return "ε_" + std::to_string(n);
    return frac(y.base);
  }
  std::string s = "F^{" + frac(y.base) + "}_" + std::to_string(y.leg);
  if (y.t != Rational(1)) s += "(" + frac(y.t) + ")";
  return s;
}

std::vector<MapLabel> map_labels(int n, const PLMap& f, const PLMap& g) {
  std::vector<MapLabel> out;
  for (const auto& r : ruled_set(n).points)
    out.push_back(MapLabel{r.point, row_letter(r.row), point_label(f.eval(r.point), n), point_label(g.eval(r.point), n)});
  return out;
}

std::string render_tree(int n) {
  const TreeLevel& level = *tree_level(n);
  const FlatLayout layout(level);
  // spatial panel: legs drawn along rational unit directions
  const Rational shrink = FlatLayout::leg_scale();
  const std::pair<Rational, Rational> dirs[3] = {
      {Rational(-3, 5), Rational(4, 5)}, {Rational(0), Rational(1)}, {Rational(3, 5), Rational(4, 5)}};
  const Rational left = Rational(-1, 5), right = Rational(6, 5), top = shrink + Rational(1, 30);
  const Rational scale = kCanvas / (right - left);
  const Rational panel_h = top * scale;
  const Rational flat_scale = kCanvas / layout.width();
  const Rational flat_y = kMargin * Rational(2) + panel_h + Rational(20);
  const Rational height = flat_y + kMargin * Rational(2);
  Svg svg(kCanvas + kMargin * Rational(2), height);
  auto sx = [&](const Rational& x) { return kMargin + (x - left) * scale; };
  auto sy = [&](const Rational& y) { return kMargin + (top - y) * scale; };
  svg.line(sx(Rational(0)), sy(Rational(0)), sx(Rational(1)), sy(Rational(0)), kTree);
  for (std::size_t a = 0; a < level.attachments().size(); ++a) {
    const Rational& p = level.attachments()[a];
    const Rational len = level.leg_length_at(static_cast<int>(a)) * shrink;
    for (const auto& [dx, dy] : dirs) svg.line(sx(p), sy(Rational(0)), sx(p + dx * len), sy(dy * len), kTree);
    svg.circle(sx(p), sy(Rational(0)), "2", "fill=\"black\"");
  }
  svg.text(kMargin, kMargin - Rational(10), "T_" + std::to_string(n) + ": " + std::to_string(level.attachments().size()) + " triods", kSmall);
  // flattened panel
  for (const auto& arc : layout.arcs()) {
    const Rational x0 = kMargin + arc.offset * flat_scale;
    const Rational x1 = kMargin + (arc.offset + arc.length) * flat_scale;
    svg.line(x0, flat_y, x1, flat_y, kTree);
    svg.circle(x0, flat_y, "1.5", "fill=\"black\"");
    svg.circle(x1, flat_y, "1.5", "fill=\"white\" stroke=\"black\" stroke-width=\"0.5\"");
  }
  return svg.finish();
}

std::string render_gamma(const GammaSet& gamma) {
  const TreeLevel& level = *tree_level(gamma.n);
  const FlatLayout layout(level);
  const Rational scale = kCanvas / layout.width();
  const Rational size = kCanvas + kMargin * Rational(2);
  Svg svg(size, size);
  auto px = [&](const Rational& u) { return kMargin + u * scale; };
  auto py = [&](const Rational& v) { return kMargin + (layout.width() - v) * scale; };
  for (const auto& arc : layout.arcs()) {
    for (const Rational& u : {arc.offset, arc.offset + arc.length}) {
      svg.line(px(u), py(Rational(0)), px(u), py(layout.width()), kThin);
      svg.line(px(Rational(0)), py(u), px(layout.width()), py(u), kThin);
    }
    svg.line(px(arc.offset), py(arc.offset), px(arc.offset + arc.length), py(arc.offset + arc.length), kLight);
  }
  for (const auto& a : gamma.arcs) {
    std::vector<std::vector<std::pair<Rational, Rational>>> runs;
    const auto& pts = a.arc.points;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) product_segment_runs(pts[k], pts[k + 1], level, layout, runs);
    for (auto& run : runs) {
      for (auto& [u, v] : run) {
        u = px(u);
        v = py(v);
      }
      svg.polyline(run, kHeavy);
    }
  }
  svg.text(kMargin, kMargin - Rational(10), "Γ_" + std::to_string(gamma.n) + " in T_" + std::to_string(gamma.n) + " × T_" + std::to_string(gamma.n), kSmall);
  return svg.finish();
}

std::string render_maps(int n, const PLMap& f, const PLMap& g) {
  // The spine gets a row of its own; the legs share a second row, in the
  // flattened order.
  const TreeLevel& dom = *tree_level(n + 1);
  const FlatLayout layout(dom);
  const Rational span = kCanvas * Rational(2);
  const Rational width = span + kMargin * Rational(2);
  const Rational spine_y(200), legs_y(480);
  const Rational legs_from = Rational(1) + FlatLayout::gap();
  const Rational legs_scale = span / (layout.width() - legs_from);
  auto place = [&](const TreePoint& x) -> std::pair<Rational, Rational> {
    if (x.is_spine()) return {kMargin + x.base * span, spine_y};
    return {kMargin + (layout.coordinate(x) - legs_from) * legs_scale, legs_y};
  };
  Svg svg(width, Rational(620));
  svg.line(kMargin, spine_y, kMargin + span, spine_y, kTree);
  for (const auto& arc : layout.arcs())
    if (arc.leg >= 0)
      svg.line(kMargin + (arc.offset - legs_from) * legs_scale, legs_y,
               kMargin + (arc.offset + arc.length - legs_from) * legs_scale, legs_y, kTree);
  for (const auto& label : map_labels(n, f, g)) {
    const auto [x, y] = place(label.x);
    svg.circle(x, y, "1.5", "fill=\"black\"");
    svg.text(x, y - Rational(6), label.f, kSmall, -90);
    svg.text(x, y + Rational(6), label.g, "font-family=\"serif\" font-size=\"9\" text-anchor=\"end\"", -90);
  }
  svg.text(kMargin, Rational(20), "f_" + std::to_string(n) + " (above) and g_" + std::to_string(n) + " (below) on T_" + std::to_string(n + 1), kSmall);
  return svg.finish();
}

}  // namespace treelike
