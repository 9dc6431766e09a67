#pragma once

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <vector>

#include "ectaks/error.hpp"
#include "ectaks/random.hpp"

namespace ectaks {

using u64 = std::uint64_t;

// Residues are machine words; every modulus must stay below 2^61.
inline constexpr u64 kMaxModulus = u64{1} << 61;

bool is_prime(u64 n);

namespace modular {

inline u64 add(u64 x, u64 y, u64 m) {
  const u64 s = x + y;
  return s >= m ? s - m : s;
}
inline u64 sub(u64 x, u64 y, u64 m) { return x >= y ? x - y : x + m - y; }
inline u64 neg(u64 x, u64 m) { return x == 0 ? 0 : m - x; }
inline u64 mul(u64 x, u64 y, u64 m) {
  return static_cast<u64>(static_cast<unsigned __int128>(x) * y % m);
}
u64 pow(u64 base, u64 exp, u64 m);
// Throws ZeroInverse on x == 0 (mod m).
u64 inv(u64 x, u64 m);

}  // namespace modular

// An element of F_p. The modulus travels with the value so mixed-field
// arithmetic is caught instead of silently producing garbage.
class FieldElement {
 public:
  FieldElement() = default;
  FieldElement(u64 value, u64 modulus) : value_(value % modulus), modulus_(modulus) {}

  u64 value() const { return value_; }
  u64 modulus() const { return modulus_; }
  bool is_zero() const { return value_ == 0; }

  FieldElement inverse() const;
  FieldElement pow(u64 exp) const;

  friend FieldElement operator+(const FieldElement& x, const FieldElement& y);
  friend FieldElement operator-(const FieldElement& x, const FieldElement& y);
  friend FieldElement operator*(const FieldElement& x, const FieldElement& y);
  friend FieldElement operator/(const FieldElement& x, const FieldElement& y);
  friend FieldElement operator-(const FieldElement& x);

  FieldElement& operator+=(const FieldElement& y) { return *this = *this + y; }
  FieldElement& operator-=(const FieldElement& y) { return *this = *this - y; }
  FieldElement& operator*=(const FieldElement& y) { return *this = *this * y; }

  friend bool operator==(const FieldElement&, const FieldElement&) = default;

 private:
  u64 value_ = 0;
  u64 modulus_ = 1;
};

std::ostream& operator<<(std::ostream& os, const FieldElement& x);

// A vector in (F_p)^d. The scheme layer fixes d = 2.
class FieldVector {
 public:
  FieldVector() = default;
  FieldVector(u64 modulus, std::vector<u64> coords);
  FieldVector(u64 modulus, std::initializer_list<u64> coords)
      : FieldVector(modulus, std::vector<u64>(coords)) {}

  static FieldVector zero(u64 modulus, std::size_t dim = 2);

  u64 modulus() const { return modulus_; }
  std::size_t size() const { return coords_.size(); }
  u64 operator[](std::size_t i) const { return coords_[i]; }
  FieldElement at(std::size_t i) const { return {coords_.at(i), modulus_}; }
  const std::vector<u64>& coords() const { return coords_; }
  bool is_zero() const;

  FieldVector scaled(const FieldElement& s) const;

  friend bool operator==(const FieldVector&, const FieldVector&) = default;
  friend auto operator<=>(const FieldVector&, const FieldVector&) = default;

 private:
  u64 modulus_ = 1;
  std::vector<u64> coords_;
};

std::ostream& operator<<(std::ostream& os, const FieldVector& v);

FieldElement dot(const FieldVector& u, const FieldVector& v);

// Uniform over (F_p)^d \ {0}.
FieldVector sample_nonzero_vector(u64 modulus, Rng& rng, std::size_t dim = 2);

inline constexpr int kRetryBound = 64;

// Uniform over the solutions x of a . x = c. When `accept` is given, draws
// failing it are rejected (at most kRetryBound attempts).
template <typename Accept>
FieldVector solve_dot_constraint(const FieldVector& a, const FieldElement& c, Rng& rng,
                                 Accept&& accept);

FieldVector solve_dot_constraint(const FieldVector& a, const FieldElement& c, Rng& rng);

namespace detail {
FieldVector draw_on_line(const FieldVector& a, const FieldElement& c, Rng& rng);
}

template <typename Accept>
FieldVector solve_dot_constraint(const FieldVector& a, const FieldElement& c, Rng& rng,
                                 Accept&& accept) {
  for (int attempt = 0; attempt < kRetryBound; ++attempt) {
    FieldVector x = detail::draw_on_line(a, c, rng);
    if (accept(x)) return x;
  }
  throw Error(ErrorCode::InfeasibleConstraint, "no admissible solution after retry bound");
}

}  // namespace ectaks
