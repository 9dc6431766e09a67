#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "ectaks/curve.hpp"
#include "ectaks/curve_search.hpp"
#include "ectaks/field.hpp"
#include "support.hpp"

using namespace ectaks;

TEST_SUITE("algebra") {

TEST_CASE("field axioms hold exhaustively for small primes") {
  for (u64 p : {2, 3, 5, 7}) {
    CAPTURE(p);
    for (u64 a = 0; a < p; ++a) {
      const FieldElement x(a, p);
      CHECK(x + FieldElement(0, p) == x);
      CHECK(x * FieldElement(1, p) == x);
      CHECK((x + (-x)).is_zero());
      if (a != 0) {
        CHECK((x * x.inverse()).value() == 1);
        CHECK(x.inverse().value() == *oracle::inverse_by_search(a, p));
      }
      for (u64 b = 0; b < p; ++b) {
        const FieldElement y(b, p);
        CHECK(x + y == y + x);
        CHECK(x * y == y * x);
        CHECK((x - y).value() == (a + p - b) % p);
        CHECK((x * y).value() == a * b % p);
        for (u64 c = 0; c < p; ++c) {
          const FieldElement z(c, p);
          CHECK((x + y) + z == x + (y + z));
          CHECK((x * y) * z == x * (y * z));
          CHECK(x * (y + z) == x * y + x * z);
        }
      }
    }
  }
}

TEST_CASE("field arithmetic at the Mersenne prime 2^61 - 1") {
  const u64 p = (u64{1} << 61) - 1;
  REQUIRE(is_prime(p));
  Rng rng(61);
  for (int i = 0; i < 2000; ++i) {
    const u64 a = rng.uniform(p), b = rng.uniform(p);
    CHECK(modular::mul(a, b, p) == oracle::mulmod(a, b, p));
    CHECK(modular::pow(a, b, p) == oracle::powmod(a, b, p));
    if (a != 0) CHECK(oracle::mulmod(modular::inv(a, p), a, p) == 1);
  }
}

TEST_CASE("primality agrees with trial division") {
  for (u64 n = 0; n < 5000; ++n) CHECK(is_prime(n) == oracle::is_prime_trial(n));
  CHECK(is_prime(1000000007));
  CHECK_FALSE(is_prime(u64{1000000007} * 3));
}

TEST_CASE("inverse of zero and mixed moduli are errors") {
  CHECK_THROWS_AS(FieldElement(0, 7).inverse(), Error);
  try {
    modular::inv(14, 7);
    FAIL("expected ZeroInverse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroInverse);
  }
  try {
    (void)(FieldElement(1, 5) + FieldElement(1, 7));
    FAIL("expected ParameterMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParameterMismatch);
  }
  try {
    (void)dot(FieldVector(5, {1, 2}), FieldVector(7, {1, 2}));
    FAIL("expected ParameterMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParameterMismatch);
  }
}

TEST_CASE("dot product examples") {
  CHECK(dot(FieldVector(7, {3, 4}), FieldVector(7, {5, 6})).value() == (15 + 24) % 7);
  CHECK(dot(FieldVector(3, {1, 1}), FieldVector(3, {1, 2})).value() == 0);
  CHECK(FieldElement(3, 7).inverse().value() == 5);
}

TEST_CASE("nonzero vectors are uniform over (F_3)^2 minus zero") {
  Rng rng(1234);
  std::map<std::pair<u64, u64>, int> counts;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const FieldVector v = sample_nonzero_vector(3, rng);
    REQUIRE_FALSE(v.is_zero());
    ++counts[{v[0], v[1]}];
  }
  REQUIRE(counts.size() == 8);
  const double expected = draws / 8.0;
  double chi2 = 0;
  for (const auto& [cell, n] : counts) chi2 += (n - expected) * (n - expected) / expected;
  CHECK(chi2 < oracle::chi_square_critical_99(7));
}

TEST_CASE("constraint solutions satisfy the constraint and cover the line uniformly") {
  Rng rng(99);
  const u64 p = 5;
  const FieldVector a(p, {0, 3});
  const FieldElement c(2, p);
  std::map<std::pair<u64, u64>, int> counts;
  const int draws = 50000;
  for (int i = 0; i < draws; ++i) {
    const FieldVector x = solve_dot_constraint(a, c, rng);
    REQUIRE(oracle::dot2({a[0], a[1]}, {x[0], x[1]}, p) == 2);
    ++counts[{x[0], x[1]}];
  }
  CHECK(counts.size() == p);
  const double expected = static_cast<double>(draws) / p;
  double chi2 = 0;
  for (const auto& [cell, n] : counts) chi2 += (n - expected) * (n - expected) / expected;
  CHECK(chi2 < oracle::chi_square_critical_99(static_cast<int>(p) - 1));

  for (int i = 0; i < 200; ++i) {
    const FieldVector k = sample_nonzero_vector(1009, rng);
    const FieldElement target(rng.uniform(1009), 1009);
    CHECK(dot(k, solve_dot_constraint(k, target, rng)) == target);
  }
}

TEST_CASE("degenerate and infeasible constraints") {
  Rng rng(5);
  try {
    solve_dot_constraint(FieldVector::zero(5), FieldElement(1, 5), rng);
    FAIL("expected DegenerateConstraint");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateConstraint);
  }
  try {
    solve_dot_constraint(FieldVector(5, {1, 0}), FieldElement(1, 5), rng, [](const FieldVector&) { return false; });
    FAIL("expected InfeasibleConstraint");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfeasibleConstraint);
  }
}

TEST_CASE("group law on y^2 = x^3 + x + 1 over F_5 matches the textbook table") {
  const CurveParams c = support::curve("toy_p3");
  const oracle::Curve ref = support::naive(c);
  const auto pts = ref.points();
  REQUIRE(pts.size() == 9);
  CHECK(count_points(5, 1, 1) == 9);
  CHECK(enumerate_points(5, 1, 1).size() == 8);
  for (const auto& p : pts) {
    for (const auto& r : pts) {
      const CurvePoint lp{p.inf, p.x, p.y}, lr{r.inf, r.x, r.y};
      CHECK(support::naive(add(c, lp, lr)) == ref.add(p, r));
    }
    const CurvePoint lp{p.inf, p.x, p.y};
    CHECK(add(c, lp, negate(c, lp)).is_identity());
    CHECK(support::naive(dbl(c, lp)) == ref.add(p, p));
  }
  CHECK(scalar_mul(c, 3, c.g).is_identity());
}

TEST_CASE("off-curve points are rejected") {
  const CurveParams c = support::curve("toy_p3");
  try {
    (void)add(c, CurvePoint::affine(1, 1), c.g);
    FAIL("expected InvalidPoint");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidPoint);
  }
}

TEST_CASE("double-and-add agrees with repeated addition") {
  for (const char* name : {"toy_p3", "toy_p11", "toy_p1009"}) {
    const CurveParams c = support::curve(name);
    const oracle::Curve ref = support::naive(c);
    for (u64 m = 0; m <= std::min<u64>(c.p + 2, 300); ++m) {
      CHECK(scalar_mul(c, m, c.g) == scalar_mul_reference(c, m, c.g));
      CHECK(support::naive(scalar_mul(c, m, c.g)) == ref.mul(m, support::naive(c.g)));
    }
  }
}

TEST_CASE("mixed product law, exhaustive at p = 3") {
  const CurveParams c = support::curve("toy_p3");
  const oracle::Curve ref = support::naive(c);
  for (u64 code = 0; code < 81; ++code) {
    const FieldVector k(3, {code % 3, code / 3 % 3});
    const FieldVector t(3, {code / 9 % 3, code / 27});
    const CurvePoint lhs = scalar_mul(c, dot(k, t).value(), c.g);
    CHECK(lhs == mixed_dot(c, k, lift_vector(c, t)));
    CHECK(support::naive(lhs) == ref.mul(oracle::dot2({k[0], k[1]}, {t[0], t[1]}, 3), support::naive(c.g)));
  }
}

TEST_CASE("mixed product law, random at p = 1009") {
  const CurveParams c = support::curve("toy_p1009");
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const FieldVector k(c.p, {rng.uniform(c.p), rng.uniform(c.p)});
    const FieldVector t(c.p, {rng.uniform(c.p), rng.uniform(c.p)});
    CHECK(scalar_mul(c, dot(k, t).value(), c.g) == mixed_dot(c, k, lift_vector(c, t)));
  }
  CHECK_THROWS_AS(lift_vector(c, FieldVector(11, {1, 2})), Error);
}

TEST_CASE("ECDL oracle inverts scalar multiplication") {
  const CurveParams c = support::curve("toy_p1009");
  for (u64 m = 0; m < c.p; m += 7) CHECK(ecdl_bruteforce(c, c.g, scalar_mul(c, m, c.g), c.p) == m);
  try {
    (void)ecdl_bruteforce(c, c.g, c.g, kEcdlGuard + 1);
    FAIL("expected OracleRefused");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OracleRefused);
  }
}

TEST_CASE("points outside the subgroup have no discrete log") {
  const CurveParams c = support::curve("toy_p3");
  // #E = 9; a point of order 9 is not a multiple of G when E is cyclic.
  const oracle::Curve ref = support::naive(c);
  for (const auto& p : ref.points()) {
    if (ref.mul(3, p).inf) continue;
    try {
      (void)ecdl_bruteforce(c, c.g, CurvePoint::affine(p.x, p.y), c.p);
      FAIL("expected NotInSubgroup");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotInSubgroup);
    }
    break;
  }
}

TEST_CASE("curve search output validates and is reproducible") {
  const auto curves = find_toy_curves(200);
  REQUIRE_FALSE(curves.empty());
  for (const auto& c : curves) {
    CHECK_NOTHROW(validate(c));
    const oracle::Curve ref = support::naive(c);
    CHECK(ref.points().size() % c.p == 0);
    CHECK(ref.mul(c.p, support::naive(c.g)).inf);
    CHECK(oracle::is_prime_trial(c.p));
  }
  CHECK(find_toy_curves(200) == curves);
  CHECK(find_toy_curves(3).empty());
  CHECK(prime_factors(360) == std::vector<u64>{2, 3, 5});
}

TEST_CASE("validate rejects broken parameters") {
  CurveParams c = support::curve("toy_p11");
  c.p = 13;
  CHECK_THROWS_AS(validate(c), Error);
  c = support::curve("toy_p11");
  c.g = CurvePoint::affine(0, 0);
  CHECK_THROWS_AS(validate(c), Error);
  c = support::curve("toy_p11");
  c.q = 9;
  CHECK_THROWS_AS(validate(c), Error);
}


TEST_CASE("small worked values") {
  CHECK((FieldElement(2, 5) + FieldElement(4, 5)).value() == 1);
  CHECK(FieldElement(1, 13).inverse().value() == 1);
  CHECK(FieldElement(3, 7).inverse().value() == *oracle::inverse_by_search(3, 7));
  CHECK((FieldElement(4, 7) / FieldElement(3, 7)).value() == 4 * 5 % 7);
  CHECK(dot(FieldVector(11, {1, 2}), FieldVector(11, {3, 4})).value() == 0);
  CHECK(dot(FieldVector(11, {6, 9}), FieldVector::zero(11)).value() == 0);
  CHECK(dot(FieldVector(7, {2, 3}), FieldVector(7, {4, 5})).value() == 2);
}

TEST_CASE("field axioms on random triples at 2^61 - 1") {
  const u64 p = (u64{1} << 61) - 1;
  Rng rng(10000);
  for (int i = 0; i < 10000; ++i) {
    const FieldElement x(rng.uniform(p), p), y(rng.uniform(p), p), z(rng.uniform(p), p);
    REQUIRE((x + y) + z == x + (y + z));
    REQUIRE((x * y) * z == x * (y * z));
    REQUIRE(x * (y + z) == x * y + x * z);
    REQUIRE((x * y).value() == oracle::mulmod(x.value(), y.value(), p));
    if (!x.is_zero()) REQUIRE((x * x.inverse()).value() == 1);
  }
}

TEST_CASE("seeded sampling is reproducible") {
  Rng a(77), b(77);
  for (int i = 0; i < 100; ++i) CHECK(sample_nonzero_vector(1009, a) == sample_nonzero_vector(1009, b));
}

TEST_CASE("constraint lines in coordinates") {
  Rng rng(13);
  for (int i = 0; i < 100; ++i) CHECK(solve_dot_constraint(FieldVector(11, {1, 0}), FieldElement(5, 11), rng)[0] == 5);
  std::set<std::pair<u64, u64>> hits;
  for (int i = 0; i < 1000; ++i) {
    const FieldVector x = solve_dot_constraint(FieldVector(3, {1, 1}), FieldElement(1, 3), rng);
    hits.insert({x[0], x[1]});
  }
  std::set<std::pair<u64, u64>> line;
  for (u64 a = 0; a < 3; ++a) {
    for (u64 b = 0; b < 3; ++b) {
      if ((a + b) % 3 == 1) line.insert({a, b});
    }
  }
  CHECK(hits == line);
  CHECK(line == std::set<std::pair<u64, u64>>{{0, 1}, {1, 0}, {2, 2}});
}

TEST_CASE("identity, inverse and scalar edge cases on every fixture") {
  for (const char* name : {"toy_p3", "toy_p11", "toy_p1009"}) {
    const CurveParams c = support::curve(name);
    CHECK(add(c, c.g, CurvePoint::identity()) == c.g);
    CHECK(add(c, c.g, negate(c, c.g)).is_identity());
    CHECK(scalar_mul(c, 0, c.g).is_identity());
    CHECK(scalar_mul(c, 1, c.g) == c.g);
    CHECK(scalar_mul(c, c.p, c.g).is_identity());
    for (u64 m = 1; m < c.p; ++m) REQUIRE_FALSE(scalar_mul(c, m, c.g).is_identity());
    CHECK(lift_vector(c, FieldVector::zero(c.p)).all_identity());
    CHECK(lift_vector(c, FieldVector(c.p, {1, 0})) == PointVector{c.g, CurvePoint::identity()});
    CHECK(lift_vector(c, FieldVector(c.p, {2, 3 % c.p})) == PointVector{scalar_mul(c, 2, c.g), scalar_mul(c, 3, c.g)});
    const PointVector pq{c.g, scalar_mul(c, 2, c.g)};
    CHECK(mixed_dot(c, FieldVector(c.p, {1, 0}), pq) == c.g);
    CHECK(mixed_dot(c, FieldVector(c.p, {2, 1}), lift_vector(c, FieldVector::zero(c.p))).is_identity());
    CHECK(ecdl_bruteforce(c, c.g, CurvePoint::identity(), c.p) == 0);
    CHECK(ecdl_bruteforce(c, c.g, c.g, c.p) == 1);
  }
}

TEST_CASE("scalar multiplication is a homomorphism on the small fixtures") {
  for (const char* name : {"toy_p3", "toy_p11"}) {
    const CurveParams c = support::curve(name);
    for (u64 m = 0; m <= c.p; ++m) {
      for (u64 n = 0; n <= c.p; ++n) {
        CHECK(scalar_mul(c, m + n, c.g) == add(c, scalar_mul(c, m, c.g), scalar_mul(c, n, c.g)));
        CHECK(scalar_mul(c, m, scalar_mul(c, n, c.g)) == scalar_mul(c, m * n % c.p, c.g));
      }
    }
  }
}

TEST_CASE("search up to q = 5000 reaches p >= 11 and p >= 1009") {
  const auto curves = find_toy_curves(5000);
  CHECK(std::any_of(curves.begin(), curves.end(), [](const CurveParams& c) { return c.p >= 11; }));
  CHECK(std::any_of(curves.begin(), curves.end(), [](const CurveParams& c) { return c.p >= 1009; }));
}

}
