#include "ectaks/curve.hpp"

#include <string>

namespace ectaks {

namespace md = modular;

std::ostream& operator<<(std::ostream& os, const CurvePoint& p) {
  if (p.infinity) return os << "inf";
  return os << '(' << p.x << ", " << p.y << ')';
}

bool is_nonsingular(u64 q, u64 a, u64 b) {
  // 4a^3 + 27b^2 != 0 (mod q)
  const u64 a3 = md::mul(md::mul(a, a, q), a, q);
  const u64 b2 = md::mul(b, b, q);
  const u64 disc = md::add(md::mul(4 % q, a3, q), md::mul(27 % q, b2, q), q);
  return disc != 0;
}

namespace {

bool on_curve_raw(u64 q, u64 a, u64 b, const CurvePoint& pt) {
  if (pt.infinity) return true;
  if (pt.x >= q || pt.y >= q) return false;
  const u64 lhs = md::mul(pt.y, pt.y, q);
  const u64 x2 = md::mul(pt.x, pt.x, q);
  const u64 rhs = md::add(md::add(md::mul(x2, pt.x, q), md::mul(a, pt.x, q), q), b, q);
  return lhs == rhs;
}

void require_on_curve(const CurveParams& curve, const CurvePoint& pt) {
  if (!on_curve_raw(curve.q, curve.a, curve.b, pt)) {
    throw Error(ErrorCode::InvalidPoint, "point is not on the curve");
  }
}

}  // namespace

bool on_curve(const CurveParams& curve, const CurvePoint& pt) {
  return on_curve_raw(curve.q, curve.a, curve.b, pt);
}

void validate(const CurveParams& curve) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidParameter, why); };
  if (curve.q <= 3 || curve.q >= kMaxModulus || !is_prime(curve.q)) fail("q must be a prime > 3 below 2^61");
  if (curve.a >= curve.q || curve.b >= curve.q) fail("a, b must be reduced modulo q");
  if (!is_nonsingular(curve.q, curve.a, curve.b)) fail("curve is singular (4a^3 + 27b^2 = 0)");
  if (curve.p < 2 || curve.p >= kMaxModulus || !is_prime(curve.p)) fail("p must be prime below 2^61");
  if (curve.g.is_identity()) fail("base point is the identity");
  if (!on_curve(curve, curve.g)) fail("base point is not on the curve");
  // p prime and G != O, so p G = O pins the order of G to exactly p.
  if (!detail::mul_unchecked(curve.q, curve.a, curve.p, curve.g).is_identity()) {
    fail("p G is not the identity");
  }
}

namespace detail {

CurvePoint add_unchecked(u64 q, u64 a, const CurvePoint& lhs, const CurvePoint& rhs) {
  if (lhs.infinity) return rhs;
  if (rhs.infinity) return lhs;
  u64 slope;
  if (lhs.x == rhs.x) {
    if (md::add(lhs.y, rhs.y, q) == 0) return CurvePoint::identity();
    // Tangent: (3x^2 + a) / 2y
    const u64 num = md::add(md::mul(3 % q, md::mul(lhs.x, lhs.x, q), q), a, q);
    slope = md::mul(num, md::inv(md::add(lhs.y, lhs.y, q), q), q);
  } else {
    slope = md::mul(md::sub(rhs.y, lhs.y, q), md::inv(md::sub(rhs.x, lhs.x, q), q), q);
  }
  const u64 x3 = md::sub(md::sub(md::mul(slope, slope, q), lhs.x, q), rhs.x, q);
  const u64 y3 = md::sub(md::mul(slope, md::sub(lhs.x, x3, q), q), lhs.y, q);
  return CurvePoint::affine(x3, y3);
}

CurvePoint mul_unchecked(u64 q, u64 a, u64 m, const CurvePoint& pt) {
  CurvePoint acc = CurvePoint::identity();
  CurvePoint addend = pt;
  while (m != 0) {
    if (m & 1) acc = add_unchecked(q, a, acc, addend);
    m >>= 1;
    if (m != 0) addend = add_unchecked(q, a, addend, addend);
  }
  return acc;
}

}  // namespace detail

CurvePoint negate(const CurveParams& curve, const CurvePoint& pt) {
  require_on_curve(curve, pt);
  if (pt.infinity) return pt;
  return CurvePoint::affine(pt.x, md::neg(pt.y, curve.q));
}

CurvePoint add(const CurveParams& curve, const CurvePoint& lhs, const CurvePoint& rhs) {
  require_on_curve(curve, lhs);
  require_on_curve(curve, rhs);
  return detail::add_unchecked(curve.q, curve.a, lhs, rhs);
}

CurvePoint dbl(const CurveParams& curve, const CurvePoint& pt) { return add(curve, pt, pt); }

CurvePoint scalar_mul(const CurveParams& curve, u64 m, const CurvePoint& pt) {
  require_on_curve(curve, pt);
  return detail::mul_unchecked(curve.q, curve.a, m, pt);
}

CurvePoint scalar_mul_reference(const CurveParams& curve, u64 m, const CurvePoint& pt) {
  require_on_curve(curve, pt);
  CurvePoint acc = CurvePoint::identity();
  for (u64 i = 0; i < m; ++i) acc = detail::add_unchecked(curve.q, curve.a, acc, pt);
  return acc;
}

bool PointVector::all_identity() const {
  for (const auto& pt : points_) {
    if (!pt.is_identity()) return false;
  }
  return true;
}

namespace {

void require_scalar_field(const CurveParams& curve, const FieldVector& k) {
  if (k.modulus() != curve.p) {
    throw Error(ErrorCode::ParameterMismatch, "vector modulus does not match the order of G");
  }
}

}  // namespace

PointVector lift_vector(const CurveParams& curve, const FieldVector& k) {
  require_scalar_field(curve, k);
  std::vector<CurvePoint> out;
  out.reserve(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    out.push_back(detail::mul_unchecked(curve.q, curve.a, k[i], curve.g));
  }
  return PointVector(std::move(out));
}

CurvePoint mixed_dot(const CurveParams& curve, const FieldVector& k, const PointVector& v) {
  require_scalar_field(curve, k);
  if (k.size() != v.size()) throw Error(ErrorCode::ParameterMismatch, "vector lengths differ");
  CurvePoint acc = CurvePoint::identity();
  for (std::size_t i = 0; i < k.size(); ++i) {
    require_on_curve(curve, v[i]);
    acc = detail::add_unchecked(curve.q, curve.a, acc,
                                detail::mul_unchecked(curve.q, curve.a, k[i], v[i]));
  }
  return acc;
}

PointVector scale_points(const CurveParams& curve, u64 s, const PointVector& v) {
  std::vector<CurvePoint> out;
  out.reserve(v.size());
  for (const auto& pt : v.points()) out.push_back(scalar_mul(curve, s, pt));
  return PointVector(std::move(out));
}

u64 ecdl_bruteforce(const CurveParams& curve, const CurvePoint& base, const CurvePoint& target,
                    u64 order) {
  if (order > kEcdlGuard) {
    throw Error(ErrorCode::OracleRefused,
                "subgroup order " + std::to_string(order) + " exceeds the exhaustive-search guard");
  }
  require_on_curve(curve, base);
  require_on_curve(curve, target);
  CurvePoint acc = CurvePoint::identity();
  for (u64 m = 0; m < order; ++m) {
    if (acc == target) return m;
    acc = detail::add_unchecked(curve.q, curve.a, acc, base);
  }
  throw Error(ErrorCode::NotInSubgroup, "target is not a multiple of the base point");
}

}  // namespace ectaks
