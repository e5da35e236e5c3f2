#pragma once

#include <vector>

#include "treelike/rational.hpp"

namespace treelike {

/// The k-fold tent map on [0,1]: rises on [i/k,(i+1)/k] for even i and falls
/// for odd i. Only k in {2,3,6} is used by the construction, but any k >= 1
/// is accepted. Throws DomainError when x is outside [0,1].
Rational tent(int k, const Rational& x);

/// tau_2 applied `times` times.
Rational tent2_iterate(const Rational& x, int times);

/// The set tau_2^{-m}(S), sorted ascending without duplicates. m == 0 returns
/// S itself (sorted, deduplicated).
std::vector<Rational> tent2_preimages(std::vector<Rational> set, int m);

/// epsilon_n = 1 / (9 * 2^n).
Rational epsilon(int n);

/// Sorted union of tau_2^{-m}(S) over m = lo..hi (empty when hi < lo).
std::vector<Rational> tent2_preimage_union(const std::vector<Rational>& set, int lo, int hi);

/// Smallest m >= 0 with tau_2^m(x) in `targets`, or -1 if the orbit reaches a
/// fixed point of tau_2 (0 or 2/3) first, or after `limit` steps.
int tent2_depth(const Rational& x, const std::vector<Rational>& targets, int limit = 256);

}  // namespace treelike
