#include "treelike/serialize.hpp"

namespace treelike {

using nlohmann::json;

namespace {

TreePoint point_from(const json& j) {
  if (!j.is_string()) throw FormatError("tree point must be a string");
  try {
    return TreePoint::parse(j.get<std::string>());
  } catch (const std::logic_error& e) {
    throw FormatError(e.what());
  }
}

// Runs a reader and reports missing keys or wrong JSON types as FormatError.
template <class F>
auto reading(const char* what, F&& body) {
  try {
    return body();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed ") + what + ": " + e.what());
  }
}

Rational rational_from(const json& j) {
  if (!j.is_string()) throw FormatError("rational must be a \"p/q\" string");
  try {
    return Rational::parse(j.get<std::string>());
  } catch (const DomainError& e) {
    throw FormatError(e.what());
  }
}

}  // namespace

json to_json(const TreeLevel& level) {
  json attachments = json::array();
  json lengths = json::object();
  for (std::size_t a = 0; a < level.attachments().size(); ++a) {
    const std::string p = level.attachments()[a].str();
    attachments.push_back(p);
    lengths[p] = level.leg_length_at(static_cast<int>(a)).str();
  }
  return json{{"n", level.n()}, {"attachments", std::move(attachments)}, {"leg_lengths", std::move(lengths)}};
}

json to_json(const PLMap& m) {
  json edges = json::array();
  for (const auto& table : m.tables()) {
    json rows = json::array();
    for (const auto& b : table) rows.push_back(json::array({b.s.str(), b.value.str()}));
    edges.push_back(std::move(rows));
  }
  return json{{"domain", m.domain().n()}, {"codomain", m.codomain().n()}, {"edges", std::move(edges)}};
}

PLMap map_from_json(const json& j, int domain_level, int codomain_level) {
  return reading("map", [&] {
    if (j.at("domain").get<int>() != domain_level || j.at("codomain").get<int>() != codomain_level)
      throw FormatError("map levels do not match T_" + std::to_string(domain_level) + " → T_" +
                        std::to_string(codomain_level));
    std::vector<std::vector<Breakpoint>> tables;
    for (const auto& rows : j.at("edges")) {
      auto& table = tables.emplace_back();
      table.reserve(rows.size());
      for (const auto& row : rows) {
        if (!row.is_array() || row.size() != 2) throw FormatError("breakpoint must be a [param, point] pair");
        table.push_back(Breakpoint{rational_from(row[0]), point_from(row[1])});
      }
    }
    try {
      return PLMap(tree_level(domain_level), tree_level(codomain_level), std::move(tables));
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("invalid map: ") + e.what());
    }
  });
}

json to_json(const ProductPoint& x) { return json::array({x.first.str(), x.second.str()}); }

ProductPoint product_point_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw FormatError("product point must be a pair");
  return ProductPoint{point_from(j[0]), point_from(j[1])};
}

json to_json(const GammaSet& gamma) {
  json arcs = json::array();
  for (const auto& a : gamma.arcs) {
    json pts = json::array();
    for (const auto& x : a.arc.points) pts.push_back(to_json(x));
    arcs.push_back(json{{"condition", static_cast<int>(a.condition)},
                        {"piece", a.piece},
                        {"p", a.p.str()},
                        {"leg", a.leg},
                        {"label", a.label()},
                        {"points", std::move(pts)}});
  }
  return arcs;
}

GammaSet gamma_from_json(const json& j, int n) {
  return reading("Γ", [&] {
    GammaSet gamma{n, {}};
    for (const auto& a : j) {
      const int c = a.at("condition").get<int>();
      if (c < 1 || c > 6) throw FormatError("condition out of range");
      GammaArc arc{static_cast<Condition>(c), a.at("piece").get<int>(), rational_from(a.at("p")), a.at("leg").get<int>(),
                   {}};
      for (const auto& x : a.at("points")) arc.arc.points.push_back(product_point_from_json(x));
      gamma.arcs.push_back(std::move(arc));
    }
    return gamma;
  });
}

json to_json(const CheckReport& report) {
  json failures = json::array();
  for (const auto& e : report.entries)
    if (!e.pass) failures.push_back(json{{"name", e.name}, {"detail", e.detail}});
  return json{{"pass", report.ok()}, {"checked", report.entries.size()}, {"failures", std::move(failures)}};
}

std::string dump(const json& j) { return j.dump() + "\n"; }

}  // namespace treelike
