#include "treelike/verify.hpp"

#include <random>

#include "treelike/inverse_limit.hpp"
#include "treelike/serialize.hpp"

namespace treelike {

std::vector<CheckKind> parse_checks(const std::string& name) {
  if (name == "all") return {CheckKind::Commute, CheckKind::Coincidence, CheckKind::Gamma, CheckKind::Valence};
  if (name == "commute") return {CheckKind::Commute};
  if (name == "coincidence") return {CheckKind::Coincidence};
  if (name == "gamma") return {CheckKind::Gamma};
  if (name == "valence") return {CheckKind::Valence};
  throw std::invalid_argument("unknown check '" + name + "'");
}

std::string check_name(CheckKind kind) {
  switch (kind) {
    case CheckKind::Commute:
      return "commute";
    case CheckKind::Coincidence:
      return "coincidence";
    case CheckKind::Gamma:
      return "gamma";
    case CheckKind::Valence:
      return "valence";
  }
  return "?";
}

namespace {

std::string at_level(const char* what, int n) { return std::string(what) + " n=" + std::to_string(n); }

void merge(CheckReport& into, const CheckReport& from, const std::string& prefix) {
  for (const auto& e : from.entries) into.add(prefix.empty() ? e.name : prefix + " " + e.name, e.pass, e.detail);
}

}  // namespace

CheckReport check_commute(const Tower& tower, int n) {
  CheckReport r;
  const TowerLevel& lo = tower.at(n - 1);
  const TowerLevel& hi = tower.at(n);
  const PLMap left = compose(lo.f, hi.g);
  const PLMap right = compose(lo.g, hi.f);
  if (auto x = first_difference(left, right))
    r.add(at_level("commute", n), false,
          "f_" + std::to_string(n - 1) + "(g_" + std::to_string(n) + "(" + x->str() + ")) = " + left.eval(*x).str() +
              " but g_" + std::to_string(n - 1) + "(f_" + std::to_string(n) + "(" + x->str() + ")) = " +
              right.eval(*x).str());
  else
    r.add(at_level("commute", n), true, std::to_string(left.breakpoint_count()) + " breakpoints");
  return r;
}

CheckReport check_coincidence(const Tower& tower, int n) {
  CheckReport r;
  const TowerLevel& l = tower.at(n);
  const MapDistance d = min_map_distance(l.f, l.g);
  r.add(at_level("coincidence", n), d.value.sign() > 0, "delta=" + d.value.str() + " at " + d.witness.str());
  return r;
}

CheckReport check_gamma(const Tower& tower, int n, int pair_samples) {
  CheckReport r;
  const TowerLevel& l = tower.at(n);
  merge(r, verify_gamma(l.gamma, n), at_level("gamma", n));
  if (n >= 1) {
    const TowerLevel& prev = tower.at(n - 1);
    merge(r, verify_containment(l.gamma, prev.f, prev.g), at_level("containment", n));
  }
  // (f_n(x), g_n(x)) stays on Γ_n
  std::mt19937_64 rng(0x5eed0000u + static_cast<unsigned>(n));
  const TreeLevel& dom = l.f.domain();
  std::string bad;
  for (int k = 0; k < pair_samples && bad.empty(); ++k) {
    const TreePoint x = random_point(dom, rng);
    const ProductPoint v{l.f.eval(x), l.g.eval(x)};
    if (!gamma_contains(l.gamma, v)) bad = "(f, g)(" + x.str() + ") = (" + v.first.str() + ", " + v.second.str() + ") is off Γ";
  }
  // ruled points as well, where mutations land
  if (bad.empty())
    for (const auto& p : ruled_set(n).points) {
      const ProductPoint v{l.f.eval(p.point), l.g.eval(p.point)};
      if (!gamma_contains(l.gamma, v)) {
        bad = "(f, g)(" + p.point.str() + ") = (" + v.first.str() + ", " + v.second.str() + ") is off Γ";
        break;
      }
    }
  r.add(at_level("pairs", n), bad.empty(), bad);
  return r;
}

CheckReport check_valence(const Tower& tower, int n) {
  CheckReport r;
  const TowerLevel& l = tower.at(n);
  const Valence vf = valence(l.f);
  const Valence vg = valence(l.g);
  r.add(at_level("valence f", n), vf.count == 6, std::to_string(vf.count) + " components over " + vf.witness.str());
  r.add(at_level("valence g", n), vg.count == 12, std::to_string(vg.count) + " components over " + vg.witness.str());
  return r;
}

VerifyOutcome run_verify(const VerifyOptions& options) {
  VerifyOutcome out;
  CheckReport& report = out.report;
  Tower tower;
  if (options.mutation.empty()) {
    try {
      tower = build_tower(options.level, options.tower);
    } catch (const std::exception& e) {
      report.add("construction", false, e.what());
    }
  } else {
    auto mutation = named_mutation(options.mutation, options.mutation_level);
    if (!mutation) throw std::invalid_argument("unknown mutation '" + options.mutation + "'");
    BuildOptions build = options.tower.build;
    build.mutation = *mutation;
    build.strict = false;
    for (int n = 0; n <= options.level; ++n) {
      try {
        GammaSet gamma = n == 0 ? build_gamma0() : next_gamma(n - 1, tower.levels.back().f, tower.levels.back().g);
        MapPair maps = build_maps(n, gamma, build);
        for (const auto& msg : maps.off_gamma) report.add(at_level("construction", n), false, msg);
        tower.levels.push_back(TowerLevel{n, std::move(gamma), std::move(maps.f), std::move(maps.g)});
      } catch (const std::exception& e) {
        // Γ_n could not be traced from the previous maps: the Γ recursion fails here
        report.add(at_level("gamma", n), false, e.what());
        break;
      }
    }
  }
  const int built = tower.height();
  for (CheckKind kind : options.checks)
    for (int n = 0; n <= built; ++n) {
      switch (kind) {
        case CheckKind::Commute:
          if (n >= 1) merge(report, check_commute(tower, n), "");
          break;
        case CheckKind::Coincidence:
          merge(report, check_coincidence(tower, n), "");
          break;
        case CheckKind::Gamma:
          merge(report, check_gamma(tower, n, options.pair_samples), "");
          break;
        case CheckKind::Valence:
          merge(report, check_valence(tower, n), "");
          break;
      }
    }
  if (built < options.level && report.ok()) report.add("construction", false, "tower stopped early");

  nlohmann::json checks = nlohmann::json::array();
  for (CheckKind kind : options.checks) checks.push_back(check_name(kind));
  nlohmann::json results = nlohmann::json::array();
  for (const auto& e : report.entries)
    if (!e.pass || e.name.find('[') == std::string::npos)
      results.push_back(nlohmann::json{{"name", e.name}, {"pass", e.pass}, {"detail", e.detail}});
  out.json = nlohmann::json{{"level", options.level},
                            {"built", built},
                            {"checks", std::move(checks)},
                            {"mutation", options.mutation.empty() ? nlohmann::json(nullptr) : nlohmann::json(options.mutation)},
                            {"checked", report.entries.size()},
                            {"failures", report.failures()},
                            {"pass", report.ok()},
                            {"results", std::move(results)}};
  return out;
}

}  // namespace treelike
