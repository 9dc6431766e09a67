#include "ectaks/field.hpp"

#include <array>

namespace ectaks {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroInverse: return "ZeroInverse";
    case ErrorCode::ParameterMismatch: return "ParameterMismatch";
    case ErrorCode::InvalidPoint: return "InvalidPoint";
    case ErrorCode::DegenerateConstraint: return "DegenerateConstraint";
    case ErrorCode::InfeasibleConstraint: return "InfeasibleConstraint";
    case ErrorCode::NotInSubgroup: return "NotInSubgroup";
    case ErrorCode::OracleRefused: return "OracleRefused";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::AsymmetricArrow: return "AsymmetricArrow";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::IdOutOfRange: return "IdOutOfRange";
    case ErrorCode::RootsMismatch: return "RootsMismatch";
    case ErrorCode::AlreadyProvisioned: return "AlreadyProvisioned";
    case ErrorCode::PrerequisiteMissing: return "PrerequisiteMissing";
    case ErrorCode::ZeroSessionKey: return "ZeroSessionKey";
    case ErrorCode::ClusterConflict: return "ClusterConflict";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::IdCollision: return "IdCollision";
    case ErrorCode::UnknownPeer: return "UnknownPeer";
    case ErrorCode::InvalidShare: return "InvalidShare";
    case ErrorCode::BadTag: return "BadTag";
    case ErrorCode::MalformedMessage: return "MalformedMessage";
    case ErrorCode::ClusterNotFormed: return "ClusterNotFormed";
    case ErrorCode::MalformedFile: return "MalformedFile";
  }
  return "Unknown";
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 small : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % small == 0) return n == small;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // These bases are deterministic for every 64-bit n.
  for (u64 base : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    u64 x = modular::pow(base, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = modular::mul(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace modular {

u64 pow(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1) result = mul(result, base, m);
    base = mul(base, base, m);
    exp >>= 1;
  }
  return result;
}

u64 inv(u64 x, u64 m) {
  x %= m;
  if (x == 0) throw Error(ErrorCode::ZeroInverse, "inverse of zero");
  // Extended Euclid on signed 128-bit to stay clear of overflow.
  __int128 r0 = m, r1 = x, s0 = 0, s1 = 1;
  while (r1 != 0) {
    const __int128 quot = r0 / r1;
    const __int128 r2 = r0 - quot * r1;
    r0 = r1;
    r1 = r2;
    const __int128 s2 = s0 - quot * s1;
    s0 = s1;
    s1 = s2;
  }
  if (r0 != 1) throw Error(ErrorCode::ZeroInverse, "element not invertible");
  if (s0 < 0) s0 += m;
  return static_cast<u64>(s0);
}

}  // namespace modular

namespace {

void require_same(u64 m1, u64 m2) {
  if (m1 != m2) {
    throw Error(ErrorCode::ParameterMismatch,
                "moduli differ: " + std::to_string(m1) + " vs " + std::to_string(m2));
  }
}

}  // namespace

FieldElement FieldElement::inverse() const {
  return {modular::inv(value_, modulus_), modulus_};
}

FieldElement FieldElement::pow(u64 exp) const {
  return {modular::pow(value_, exp, modulus_), modulus_};
}

FieldElement operator+(const FieldElement& x, const FieldElement& y) {
  require_same(x.modulus_, y.modulus_);
  return {modular::add(x.value_, y.value_, x.modulus_), x.modulus_};
}

FieldElement operator-(const FieldElement& x, const FieldElement& y) {
  require_same(x.modulus_, y.modulus_);
  return {modular::sub(x.value_, y.value_, x.modulus_), x.modulus_};
}

FieldElement operator*(const FieldElement& x, const FieldElement& y) {
  require_same(x.modulus_, y.modulus_);
  return {modular::mul(x.value_, y.value_, x.modulus_), x.modulus_};
}

FieldElement operator/(const FieldElement& x, const FieldElement& y) {
  require_same(x.modulus_, y.modulus_);
  return x * y.inverse();
}

FieldElement operator-(const FieldElement& x) {
  return {modular::neg(x.value_, x.modulus_), x.modulus_};
}

std::ostream& operator<<(std::ostream& os, const FieldElement& x) {
  return os << x.value() << " (mod " << x.modulus() << ")";
}

FieldVector::FieldVector(u64 modulus, std::vector<u64> coords)
    : modulus_(modulus), coords_(std::move(coords)) {
  if (modulus_ == 0 || modulus_ >= kMaxModulus) {
    throw Error(ErrorCode::InvalidParameter, "modulus out of range");
  }
  for (auto& c : coords_) c %= modulus_;
}

FieldVector FieldVector::zero(u64 modulus, std::size_t dim) {
  return FieldVector(modulus, std::vector<u64>(dim, 0));
}

bool FieldVector::is_zero() const {
  for (u64 c : coords_) {
    if (c != 0) return false;
  }
  return true;
}

FieldVector FieldVector::scaled(const FieldElement& s) const {
  require_same(modulus_, s.modulus());
  std::vector<u64> out(coords_.size());
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    out[i] = modular::mul(coords_[i], s.value(), modulus_);
  }
  return FieldVector(modulus_, std::move(out));
}

std::ostream& operator<<(std::ostream& os, const FieldVector& v) {
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i];
  }
  return os << ')';
}

FieldElement dot(const FieldVector& u, const FieldVector& v) {
  require_same(u.modulus(), v.modulus());
  if (u.size() != v.size()) {
    throw Error(ErrorCode::ParameterMismatch, "vector lengths differ");
  }
  const u64 m = u.modulus();
  u64 acc = 0;
  for (std::size_t i = 0; i < u.size(); ++i) acc = modular::add(acc, modular::mul(u[i], v[i], m), m);
  return {acc, m};
}

FieldVector sample_nonzero_vector(u64 modulus, Rng& rng, std::size_t dim) {
  if (dim < 2) throw Error(ErrorCode::InvalidParameter, "vector length must be at least 2");
  std::vector<u64> coords(dim);
  for (;;) {
    bool any = false;
    for (auto& c : coords) {
      c = rng.uniform(modulus);
      any = any || c != 0;
    }
    if (any) return FieldVector(modulus, coords);
  }
}

namespace detail {

FieldVector draw_on_line(const FieldVector& a, const FieldElement& c, Rng& rng) {
  require_same(a.modulus(), c.modulus());
  const u64 m = a.modulus();
  std::size_t pivot = a.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != 0) {
      pivot = i;
      break;
    }
  }
  if (pivot == a.size()) throw Error(ErrorCode::DegenerateConstraint, "constraint vector is zero");

  // Free coordinates are uniform; the pivot coordinate is solved for.
  std::vector<u64> x(a.size());
  u64 rest = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i == pivot) continue;
    x[i] = rng.uniform(m);
    rest = modular::add(rest, modular::mul(a[i], x[i], m), m);
  }
  x[pivot] = modular::mul(modular::sub(c.value(), rest, m), modular::inv(a[pivot], m), m);
  return FieldVector(m, std::move(x));
}

}  // namespace detail

FieldVector solve_dot_constraint(const FieldVector& a, const FieldElement& c, Rng& rng) {
  return detail::draw_on_line(a, c, rng);
}

}  // namespace ectaks
