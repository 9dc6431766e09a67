#include "ectaks/curve_search.hpp"

#include <algorithm>
#include <tuple>

namespace ectaks {

namespace md = modular;

namespace {

// Square roots of every residue, indexed by residue; empty for non-squares.
std::vector<std::vector<u64>> sqrt_table(u64 q) {
  std::vector<std::vector<u64>> roots(q);
  for (u64 y = 0; y < q; ++y) roots[md::mul(y, y, q)].push_back(y);
  return roots;
}

u64 rhs(u64 q, u64 a, u64 b, u64 x) {
  return md::add(md::add(md::mul(md::mul(x, x, q), x, q), md::mul(a, x, q), q), b, q);
}

}  // namespace

std::vector<CurvePoint> enumerate_points(u64 q, u64 a, u64 b) {
  const auto roots = sqrt_table(q);
  std::vector<CurvePoint> points;
  for (u64 x = 0; x < q; ++x) {
    for (u64 y : roots[rhs(q, a, b, x)]) points.push_back(CurvePoint::affine(x, y));
  }
  return points;
}

u64 count_points(u64 q, u64 a, u64 b) {
  const auto roots = sqrt_table(q);
  u64 n = 1;
  for (u64 x = 0; x < q; ++x) n += roots[rhs(q, a, b, x)].size();
  return n;
}

std::vector<u64> prime_factors(u64 n) {
  std::vector<u64> out;
  for (u64 d = 2; d * d <= n; ++d) {
    if (n % d != 0) continue;
    out.push_back(d);
    while (n % d == 0) n /= d;
  }
  if (n > 1) out.push_back(n);
  return out;
}

std::optional<CurveParams> curve_with_subgroup(u64 q, u64 a, u64 b, u64 p) {
  if (!is_prime(q) || q <= 3 || !is_nonsingular(q, a, b) || !is_prime(p)) return std::nullopt;
  const u64 order = count_points(q, a, b);
  if (order % p != 0) return std::nullopt;
  const u64 cofactor = order / p;
  for (const auto& pt : enumerate_points(q, a, b)) {
    const CurvePoint g = detail::mul_unchecked(q, a, cofactor, pt);
    if (g.is_identity()) continue;
    CurveParams curve{q, a, b, g, p};
    validate(curve);
    return curve;
  }
  return std::nullopt;
}

std::vector<CurveParams> find_toy_curves(const CurveSearchOptions& options) {
  std::vector<CurveParams> found;
  for (u64 q = std::max<u64>(options.min_q, 5); q <= options.max_q; ++q) {
    if (!is_prime(q)) continue;
    const auto roots = sqrt_table(q);
    std::optional<std::tuple<u64, u64, u64>> best;  // (p, a, b)
    unsigned examined = 0;
    for (u64 a = 0; a < q && examined < options.candidates_per_prime; ++a) {
      for (u64 b = 0; b < q && examined < options.candidates_per_prime; ++b) {
        if (!is_nonsingular(q, a, b)) continue;
        ++examined;
        u64 order = 1;
        for (u64 x = 0; x < q; ++x) order += roots[rhs(q, a, b, x)].size();
        for (u64 p : prime_factors(order)) {
          if (p < options.min_p || p > options.max_p) continue;
          if (!best || p > std::get<0>(*best)) best = std::make_tuple(p, a, b);
        }
      }
    }
    if (!best) continue;
    const auto [p, a, b] = *best;
    if (auto curve = curve_with_subgroup(q, a, b, p)) found.push_back(*curve);
  }
  return found;
}

}  // namespace ectaks
