#pragma once

#include <optional>
#include <vector>

#include "ectaks/curve.hpp"

namespace ectaks {

// All affine points of y^2 = x^3 + ax + b over F_q, ordered by (x, y);
// the point at infinity is not included.
std::vector<CurvePoint> enumerate_points(u64 q, u64 a, u64 b);

// #E(F_q), including the point at infinity.
u64 count_points(u64 q, u64 a, u64 b);

std::vector<u64> prime_factors(u64 n);

struct CurveSearchOptions {
  u64 min_q = 5;
  u64 max_q = 0;
  // Only subgroup orders inside [min_p, max_p] are emitted.
  u64 min_p = 3;
  u64 max_p = kMaxModulus;
  // Number of nonsingular (a, b) pairs examined per prime q, in
  // lexicographic order; the one with the largest admissible p wins.
  unsigned candidates_per_prime = 16;
};

// Desk-scale fixture discovery. For each prime q, picks a curve and a base
// point generating a prime-order subgroup. Every result passes validate().
std::vector<CurveParams> find_toy_curves(const CurveSearchOptions& options);

inline std::vector<CurveParams> find_toy_curves(u64 max_q) {
  CurveSearchOptions options;
  options.max_q = max_q;
  return find_toy_curves(options);
}

// Base point of order p on the given curve, or nullopt when p does not
// divide the group order. Deterministic: scans points in (x, y) order.
std::optional<CurveParams> curve_with_subgroup(u64 q, u64 a, u64 b, u64 p);

}  // namespace ectaks
