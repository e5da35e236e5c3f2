#pragma once

// Reference computations that avoid the library's own algorithms.  They use
// plain 64-bit fractions or brute-force enumeration and are only meant for
// small inputs.

#include <cstdint>
#include <numeric>
#include <set>
#include <utility>

namespace oracle {

struct Frac {
  std::int64_t p, q;  // q > 0, lowest terms
  Frac(std::int64_t num = 0, std::int64_t den = 1) {
    if (den < 0) num = -num, den = -den;
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    p = num / (g == 0 ? 1 : g);
    q = den / (g == 0 ? 1 : g);
  }
  friend bool operator==(const Frac&, const Frac&) = default;
  friend bool operator<(const Frac& a, const Frac& b) { return (__int128)a.p * b.q < (__int128)b.p * a.q; }
};

/// τ_k(p/q) written out as the sawtooth: kx − i on even pieces, i + 1 − kx on odd ones.
inline Frac tent(int k, Frac x) {
  const std::int64_t kp = k * x.p;
  std::int64_t i = kp / x.q;
  if (i == k) i = k - 1;
  const Frac local(kp - i * x.q, x.q);  // kx − i
  return i % 2 == 0 ? local : Frac(local.q - local.p, local.q);
}

/// Triod count of T_n by scanning every k/(3·2^n) and asking whether some
/// forward τ₂-iterate below n hits 1/3 or 1.
inline std::size_t triod_count(int n) {
  const std::int64_t den = 3LL << (n < 0 ? 0 : n);
  std::set<std::pair<std::int64_t, std::int64_t>> hits;
  for (std::int64_t k = 0; k <= den; ++k) {
    const Frac x0(k, den);
    bool attached = x0 == Frac(0) || x0 == Frac(2, 3);
    Frac x = x0;
    for (int m = 0; m < n && !attached; ++m) {
      if (x == Frac(1, 3) || x == Frac(1)) attached = true;
      x = tent(2, x);
    }
    if (attached) hits.insert({x0.p, x0.q});
  }
  return hits.size();
}

}  // namespace oracle
