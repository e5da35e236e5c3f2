#include "treelike/tent.hpp"

#include <algorithm>

namespace treelike {

namespace {

void sort_unique(std::vector<Rational>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

Rational tent(int k, const Rational& x) {
  if (k < 1) throw DomainError("tent map needs k >= 1");
  if (x < Rational(0) || x > Rational(1)) throw DomainError("tent map argument " + x.str() + " outside [0,1]");
  const Rational kx = Rational(k) * x;
  long i = floor_long(kx);
  if (i == k) i = k - 1;  // x == 1 belongs to the last piece
  const Rational local = kx - Rational(i);
  return (i % 2 == 0) ? local : Rational(1) - local;
}

Rational tent2_iterate(const Rational& x, int times) {
  Rational y = x;
  for (int k = 0; k < times; ++k) y = tent(2, y);
  return y;
}

std::vector<Rational> tent2_preimages(std::vector<Rational> set, int m) {
  if (m < 0) throw DomainError("negative preimage depth");
  for (const auto& y : set)
    if (y < Rational(0) || y > Rational(1)) throw DomainError("preimage target " + y.str() + " outside [0,1]");
  sort_unique(set);
  const Rational half(1, 2);
  for (int step = 0; step < m; ++step) {
    std::vector<Rational> next;
    next.reserve(set.size() * 2);
    for (const auto& y : set) {
      next.push_back(y * half);
      next.push_back(Rational(1) - y * half);
    }
    sort_unique(next);
    set = std::move(next);
  }
  return set;
}

std::vector<Rational> tent2_preimage_union(const std::vector<Rational>& set, int lo, int hi) {
  std::vector<Rational> out;
  if (hi < lo) return out;
  std::vector<Rational> layer = tent2_preimages(set, std::max(lo, 0));
  for (int m = std::max(lo, 0); m <= hi; ++m) {
    out.insert(out.end(), layer.begin(), layer.end());
    if (m < hi) layer = tent2_preimages(layer, 1);
  }
  sort_unique(out);
  return out;
}

Rational epsilon(int n) {
  if (n < 0) throw DomainError("epsilon needs n >= 0");
  return Rational(1, 9) * pow2(-n);
}

int tent2_depth(const Rational& x, const std::vector<Rational>& targets, int limit) {
  Rational y = x;
  const Rational zero(0), two_thirds(2, 3);
  for (int m = 0; m <= limit; ++m) {
    if (std::find(targets.begin(), targets.end(), y) != targets.end()) return m;
    if (y == zero || y == two_thirds) return -1;
    y = tent(2, y);
  }
  return -1;
}

}  // namespace treelike
