// Shared helpers for the unit tests.
#pragma once

#include "nftrack/geometry.hpp"
#include "nftrack/random.hpp"

#include <algorithm>
#include <cmath>

namespace nftrack::test {

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

template <typename M1, typename M2>
double mat_rel_err(const M1& a, const M2& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale > 0.0 ? (a - b).norm() / scale : 0.0;
}

inline Vec3 random_unit(Rng& rng) {
  Vec3 v(rng.normal(), rng.normal(), rng.normal());
  return v.normalized();
}

/// Arbitrary array: antenna 0 at the reference, others scattered within
/// `radius` of it.
inline ArrayGeometry random_array(Rng& rng, int n, double radius) {
  const Vec3 ref(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
  std::vector<Vec3> pos{ref};
  for (int i = 1; i < n; ++i) pos.push_back(ref + radius * rng.uniform() * random_unit(rng));
  return ArrayGeometry(ref, pos);
}

}  // namespace nftrack::test
