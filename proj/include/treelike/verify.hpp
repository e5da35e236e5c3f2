#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "treelike/tower.hpp"

namespace treelike {

enum class CheckKind { Commute, Coincidence, Gamma, Valence };

/// "commute", "coincidence", "gamma", "valence"; "all" expands to every kind.
std::vector<CheckKind> parse_checks(const std::string& name);
std::string check_name(CheckKind kind);

struct VerifyOptions {
  int level = 0;
  std::vector<CheckKind> checks{CheckKind::Commute, CheckKind::Coincidence, CheckKind::Gamma, CheckKind::Valence};
  TowerOptions tower;
  /// Name from mutation_names(); empty for none.  A mutated tower is built
  /// non-strictly and never cached.
  std::string mutation;
  int mutation_level = 1;
  /// Random domain points per level for the (f_n(x), g_n(x)) ∈ Γ_n check.
  int pair_samples = 200;
};

/// Per-level checks on a built tower.  Entry names carry the level, e.g.
/// "commute n=3" or "gamma n=2 C5[p=1/3,i=0]".
CheckReport check_commute(const Tower& tower, int n);
CheckReport check_coincidence(const Tower& tower, int n);
CheckReport check_gamma(const Tower& tower, int n, int pair_samples = 200);
CheckReport check_valence(const Tower& tower, int n);

struct VerifyOutcome {
  CheckReport report;
  nlohmann::json json;  ///< {"level", "checks", "mutation", "pass", "failures", "results"}
  bool ok() const { return report.ok(); }
};

/// Builds (or loads) the tower to `level` and runs the selected checks on
/// every level.  A construction failure becomes a failed "construction n=k"
/// entry; checks then run on the levels that were built.
VerifyOutcome run_verify(const VerifyOptions& options);

}  // namespace treelike
