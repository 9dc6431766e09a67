#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "ectaks/field.hpp"

namespace ectaks {

// Affine point on y^2 = x^3 + ax + b over F_q, or the point at infinity.
struct CurvePoint {
  bool infinity = true;
  u64 x = 0;
  u64 y = 0;

  static CurvePoint identity() { return {}; }
  static CurvePoint affine(u64 x, u64 y) { return {false, x, y}; }
  bool is_identity() const { return infinity; }

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

std::ostream& operator<<(std::ostream& os, const CurvePoint& p);

// Short Weierstrass curve with a base point G of prime order p.
struct CurveParams {
  u64 q = 0;
  u64 a = 0;
  u64 b = 0;
  CurvePoint g;
  u64 p = 0;

  friend bool operator==(const CurveParams&, const CurveParams&) = default;
};

// Throws InvalidParameter unless every CurveParams invariant holds.
void validate(const CurveParams& curve);

bool is_nonsingular(u64 q, u64 a, u64 b);
bool on_curve(const CurveParams& curve, const CurvePoint& pt);

CurvePoint negate(const CurveParams& curve, const CurvePoint& pt);
CurvePoint add(const CurveParams& curve, const CurvePoint& lhs, const CurvePoint& rhs);
CurvePoint dbl(const CurveParams& curve, const CurvePoint& pt);

// Double-and-add.
CurvePoint scalar_mul(const CurveParams& curve, u64 m, const CurvePoint& pt);
// m-fold repeated addition; O(m), kept as the correctness reference.
CurvePoint scalar_mul_reference(const CurveParams& curve, u64 m, const CurvePoint& pt);

// Unchecked group law on raw (q, a) for hot loops over known-good points.
namespace detail {
CurvePoint add_unchecked(u64 q, u64 a, const CurvePoint& lhs, const CurvePoint& rhs);
CurvePoint mul_unchecked(u64 q, u64 a, u64 m, const CurvePoint& pt);
}  // namespace detail

// A d-tuple of points, e.g. the published topology vector m G.
class PointVector {
 public:
  PointVector() = default;
  explicit PointVector(std::vector<CurvePoint> points) : points_(std::move(points)) {}
  PointVector(std::initializer_list<CurvePoint> points) : points_(points) {}

  std::size_t size() const { return points_.size(); }
  const CurvePoint& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<CurvePoint>& points() const { return points_; }
  bool all_identity() const;

  friend bool operator==(const PointVector&, const PointVector&) = default;

 private:
  std::vector<CurvePoint> points_;
};

// k G = (k_1 G, ..., k_d G).
PointVector lift_vector(const CurveParams& curve, const FieldVector& k);

// k . (V_1, ..., V_d) = k_1 V_1 + ... + k_d V_d.
CurvePoint mixed_dot(const CurveParams& curve, const FieldVector& k, const PointVector& v);

// s (V_1, ..., V_d), componentwise.
PointVector scale_points(const CurveParams& curve, u64 s, const PointVector& v);

// Exhaustive search refuses subgroup orders above this bound.
inline constexpr u64 kEcdlGuard = u64{1} << 24;

// The unique m in [0, order) with m P = Q.
u64 ecdl_bruteforce(const CurveParams& curve, const CurvePoint& base, const CurvePoint& target,
                    u64 order);

}  // namespace ectaks
