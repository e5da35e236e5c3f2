#pragma once

// JSON encodings of levels, maps and Γ sets.  Every encoder emits keys and
// arrays in a fixed order, so a dump is byte-identical across runs.

#include "json.hpp"

#include "treelike/construction.hpp"
#include "treelike/pl_map.hpp"
#include "treelike/tree.hpp"

namespace treelike {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const TreeLevel& level);

nlohmann::json to_json(const PLMap& m);
/// Rebuilds a map T_{domain} → T_{codomain}; validation is the PLMap constructor's.
PLMap map_from_json(const nlohmann::json& j, int domain_level, int codomain_level);

nlohmann::json to_json(const ProductPoint& x);
ProductPoint product_point_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GammaSet& gamma);
GammaSet gamma_from_json(const nlohmann::json& j, int n);

nlohmann::json to_json(const CheckReport& report);

/// Canonical text form used for files: compact, one trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace treelike
