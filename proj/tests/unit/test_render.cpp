#include <doctest.h>

#include <cmath>
#include <regex>

#include "fixture.hpp"
#include "treelike/construction.hpp"
#include "treelike/render.hpp"

using namespace treelike;

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t at = hay.find(needle); at != std::string::npos; at = hay.find(needle, at + 1)) ++n;
  return n;
}

const MapLabel& label_at(const std::vector<MapLabel>& labels, const TreePoint& x) {
  for (const auto& l : labels)
    if (l.x == x) return l;
  FAIL("no label at " << x.str());
  return labels.front();
}

// Emitted coordinates are rounded to 0.01 px, which moves a vertex by at
// most 0.005·√2 px across the diagonal.  Γ_n comes within δ_n of the diagonal
// (under half a pixel at n >= 1), so stroke widths cannot be the yardstick.
constexpr double kDiagonalTolerancePx = 0.01;
constexpr double kCanvas = 900, kMargin = 40;

/// Smallest pixel distance from a heavy polyline vertex to the diagonal
/// guide of the block it sits in; negative when a segment crosses a guide.
double heavy_diagonal_clearance(const std::string& svg, const FlatLayout& layout) {
  const double width = layout.width().to_double();
  const double scale = kCanvas / width;
  auto block = [&](double u) {
    for (std::size_t k = 0; k < layout.arcs().size(); ++k) {
      const double lo = layout.arcs()[k].offset.to_double(), hi = lo + layout.arcs()[k].length.to_double();
      if (u >= lo - 1e-9 && u <= hi + 1e-9) return static_cast<long>(k);
    }
    return -1L;
  };
  const std::regex poly("<polyline points=\"([^\"]*)\"[^>]*stroke-width=\"2\"");
  const std::regex pair("(-?[0-9.]+),(-?[0-9.]+)");
  double best = 1e9;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), poly); it != std::sregex_iterator(); ++it) {
    const std::string pts = (*it)[1];
    std::vector<std::pair<double, double>> uv;
    for (auto p = std::sregex_iterator(pts.begin(), pts.end(), pair); p != std::sregex_iterator(); ++p)
      uv.emplace_back((std::stod((*p)[1]) - kMargin) / scale, width - (std::stod((*p)[2]) - kMargin) / scale);
    for (std::size_t k = 0; k + 1 < uv.size(); ++k) {
      const auto [u0, v0] = uv[k];
      const auto [u1, v1] = uv[k + 1];
      const long b = block(u0);
      if (b < 0 || block(u1) != b || block(v0) != b || block(v1) != b) continue;
      const double d0 = (u0 - v0) * scale / std::sqrt(2.0), d1 = (u1 - v1) * scale / std::sqrt(2.0);
      if ((d0 > 0) != (d1 > 0)) return -1;
      best = std::min({best, std::abs(d0), std::abs(d1)});
    }
  }
  return best;
}

}  // namespace

TEST_SUITE("render_cli") {
  TEST_CASE("tree figure") {
    const std::string t2 = render_tree(2);
    CHECK(count(t2, "r=\"2\"") == 7);
    CHECK(t2.find("7 triods") != std::string::npos);
    CHECK(render_tree(2) == t2);
    CHECK(count(render_tree(0), "r=\"2\"") == 2);
    CHECK(t2.rfind("</svg>\n") == t2.size() - 7);
  }

  TEST_CASE("flattened layout puts larger triods first") {
    const TreeLevel& t3 = *tree_level(3);
    const FlatLayout layout(t3);
    REQUIRE(layout.arcs().size() == 1 + 3 * t3.attachments().size());
    CHECK(layout.arcs().front().leg == -1);
    for (std::size_t k = 2; k < layout.arcs().size(); ++k) CHECK(layout.arcs()[k - 1].length >= layout.arcs()[k].length);
    CHECK(layout.coordinate(TreePoint::spine(Rational(1, 2))) == Rational(1, 2));
  }

  TEST_CASE("point labels") {
    CHECK(point_label(TreePoint::spine(Rational(1, 18)), 1) == "ε_1");
    CHECK(point_label(TreePoint::spine(Rational(0)), 1) == "0");
    CHECK(point_label(TreePoint::spine(Rational(1)), 1) == "1");
    CHECK(point_label(TreePoint::spine(Rational(5, 6)), 1) == "5/6");
    CHECK(point_label(TreePoint::on_leg(Rational(2, 3), 2, Rational(1)), 1) == "F^{2/3}_2");
    CHECK(point_label(TreePoint::on_leg(Rational(0), 1, Rational(1, 2)), 1) == "F^{0}_1(1/2)");
  }

  TEST_CASE("map labels at level 1") {
    const Tower& t = fixture::tower(1);
    const auto labels = map_labels(1, t.at(1).f, t.at(1).g);
    CHECK(labels.size() == ruled_set(1).points.size());
    const MapLabel& l89 = label_at(labels, TreePoint::spine(Rational(8, 9)));
    CHECK(l89.f == "F^{2/3}_2");
    CHECK(l89.g == "F^{2/3}_0");
    const MapLabel& l0 = label_at(labels, TreePoint::spine(Rational(0)));
    CHECK(l0.f == "0");
    CHECK(l0.g == "ε_1");
    const std::string svg = render_maps(1, t.at(1).f, t.at(1).g);
    CHECK(count(svg, "<text") == labels.size() * 2 + 1);
    CHECK(render_maps(1, t.at(1).f, t.at(1).g) == svg);
  }

  TEST_CASE("gamma figures stay off the diagonal") {
    const Tower& t = fixture::tower(2);
    for (int n = 0; n <= 2; ++n) {
      const std::string svg = render_gamma(t.at(n).gamma);
      CHECK(svg == render_gamma(t.at(n).gamma));
      const double clearance = heavy_diagonal_clearance(svg, FlatLayout(*tree_level(n)));
      INFO("n = " << n << ", clearance " << clearance << " px");
      CHECK(clearance >= kDiagonalTolerancePx);
    }
  }
}
