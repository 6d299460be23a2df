#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cartanforge/scalars.hpp"

using cf::Err;
using cf::Error;
using cf::Poly;
using cf::Scalar;

namespace {

// checks both that it throws and that the error code matches
template <class F>
void expect_err(Err code, F&& fn) {
  bool threw = false;
  try {
    fn();
  } catch (const Error& e) {
    threw = true;
    CHECK(e.code() == code);
  }
  CHECK(threw);
}

Scalar rat(int p, Poly num, Poly den) { return Scalar::rational(p, std::move(num), std::move(den)); }

// random scalar: constants and small rational functions
Scalar random_scalar(std::mt19937& rng, int p, bool allow_param) {
  std::uniform_int_distribution<int> coin(0, 3);
  if (!allow_param || coin(rng) == 0) return Scalar::of_int(p, std::uniform_int_distribution<int>(0, p - 1)(rng));
  auto rand_poly = [&](int maxdeg, bool nonzero) {
    for (;;) {
      Poly poly(std::uniform_int_distribution<int>(0, maxdeg)(rng) + 1);
      for (auto& c : poly) c = uint8_t(std::uniform_int_distribution<int>(0, p - 1)(rng));
      while (!poly.empty() && poly.back() == 0) poly.pop_back();
      if (!nonzero || !poly.empty()) return poly;
    }
  };
  return rat(p, rand_poly(2, false), rand_poly(2, true));
}

}  // namespace

TEST_CASE("invert in GF(p) and GF(p)(a)") {
  CHECK(Scalar::of_int(5, 2).invert() == Scalar::of_int(5, 3));
  // 1/a
  Scalar a2 = Scalar::param(2);
  CHECK(a2.invert() == rat(2, {1}, {0, 1}));
  // (a+1)/a inverts to a/(a+1)
  Scalar s = rat(3, {1, 1}, {0, 1});
  CHECK(s.invert() == rat(3, {0, 1}, {1, 1}));
  CHECK((s * s.invert()).is_one());
  expect_err(Err::DivisionByZero, [] { Scalar::zero(5).invert(); });
  expect_err(Err::DivisionByZero, [] { rat(3, {}, {1}).invert(); });
}

TEST_CASE("specialize") {
  // (a+1)/a at a=1 over GF(2) is 0
  Scalar s = rat(2, {1, 1}, {0, 1});
  CHECK(s.specialize(Scalar::one(2)).is_zero());
  // constants pass through
  CHECK(Scalar::of_int(3, 2).specialize(Scalar::one(3)) == Scalar::of_int(3, 2));
  // pole
  expect_err(Err::PoleAtValue, [] { rat(2, {1}, {1, 1}).specialize(Scalar::one(2)); });
  // evaluation at an extension-field point
  Scalar x = cf::ext_field_elements(2, 2)[2];  // a generator of GF(4)
  CHECK_FALSE(x.is_zero());
  Scalar v = rat(2, {0, 1}, {1, 1}).specialize(x);  // a/(a+1) at x, defined since x != 1
  CHECK((v * (x + Scalar::one(2))) == x);
}

TEST_CASE("canonical form of rational functions") {
  // common factors cancel: (a^2+a)/(a) = a+1 ... over GF(2)
  CHECK(rat(2, {0, 1, 1}, {0, 1}) == rat(2, {1, 1}, {1}));
  // constant rational functions compare equal to GF constants
  CHECK(rat(5, {3}, {1}) == Scalar::of_int(5, 3));
  CHECK(rat(5, {3}, {1}).is_const());
  // denominator made monic: a/(2a+1) = 3a/(a+3) over GF(5)
  CHECK(rat(5, {0, 1}, {1, 2}) == rat(5, {0, 3}, {3, 1}));
  expect_err(Err::DivisionByZero, [] { rat(3, {1}, {}); });
}

TEST_CASE("field axioms on random triples") {
  for (int p : {2, 3, 5}) {
    std::mt19937 rng(12345 + p);
    for (int iter = 0; iter < 10000; ++iter) {
      Scalar x = random_scalar(rng, p, true);
      Scalar y = random_scalar(rng, p, true);
      Scalar z = random_scalar(rng, p, true);
      REQUIRE((x + y) + z == x + (y + z));
      REQUIRE((x * y) * z == x * (y * z));
      REQUIRE(x * (y + z) == x * y + x * z);
      REQUIRE(x + y == y + x);
      REQUIRE(x * y == y * x);
      REQUIRE((x - x).is_zero());
      if (!y.is_zero()) REQUIRE(x / y * y == x);
    }
  }
}

TEST_CASE("specialize is a homomorphism where defined") {
  for (int p : {2, 3, 5}) {
    std::mt19937 rng(777 + p);
    int done = 0;
    while (done < 2000) {
      Scalar x = random_scalar(rng, p, true);
      Scalar y = random_scalar(rng, p, true);
      Scalar v = Scalar::of_int(p, std::uniform_int_distribution<int>(0, p - 1)(rng));
      try {
        Scalar lhs_m = (x * y).specialize(v);
        Scalar rhs_m = x.specialize(v) * y.specialize(v);
        Scalar lhs_a = (x + y).specialize(v);
        Scalar rhs_a = x.specialize(v) + y.specialize(v);
        REQUIRE(lhs_m == rhs_m);
        REQUIRE(lhs_a == rhs_a);
        ++done;
      } catch (const Error& e) {
        REQUIRE(e.code() == Err::PoleAtValue);
      }
    }
  }
}

TEST_CASE("parse and print round trip") {
  CHECK(cf::parse_scalar(5, "2") == Scalar::of_int(5, 2));
  CHECK(cf::parse_scalar(5, "-1") == Scalar::of_int(5, 4));
  CHECK(cf::parse_scalar(2, "a") == Scalar::param(2));
  CHECK(cf::parse_scalar(3, "(a+1)/a") == rat(3, {1, 1}, {0, 1}));
  CHECK(cf::parse_scalar(3, "2*a - 1/(a+1)") == rat(3, {2, 2, 2}, {1, 1}));
  CHECK(cf::parse_scalar(7, "a*a + 3") == rat(7, {3, 0, 1}, {1}));
  CHECK(cf::parse_scalar(2, "-(a)") == Scalar::param(2));
  expect_err(Err::ParseError, [] { cf::parse_scalar(3, "b"); });
  expect_err(Err::ParseError, [] { cf::parse_scalar(3, "1+"); });
  expect_err(Err::ParseError, [] { cf::parse_scalar(3, "(1"); });

  std::mt19937 rng(42);
  for (int p : {2, 3, 5}) {
    for (int iter = 0; iter < 500; ++iter) {
      Scalar x = random_scalar(rng, p, true);
      CHECK(cf::parse_scalar(p, x.str()) == x);
    }
  }
}

TEST_CASE("extension fields GF(p^k)") {
  // GF(4): modulus is x^2+x+1, the first lexicographic irreducible
  CHECK(cf::ext_modulus(2, 2) == Poly{1, 1, 1});
  for (auto [p, k] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 2}, {5, 2}}) {
    auto elems = cf::ext_field_elements(p, k);
    long long want = 1;
    for (int i = 0; i < k; ++i) want *= p;
    REQUIRE(int(elems.size()) == want);
    for (const auto& x : elems) {
      if (x.is_zero()) continue;
      CHECK((x * x.invert()).is_one());
    }
    // the generator is a root of the declared modulus
    Scalar gen = elems[size_t(p)];
    Scalar acc = Scalar::ext(p, k, {});
    const Poly& m = cf::ext_modulus(p, k);
    for (size_t i = m.size(); i-- > 0;) acc = acc * gen + Scalar::of_int(p, m[i]);
    CHECK(acc.is_zero());
  }
}

TEST_CASE("total order and absorbing zero") {
  Scalar z;  // characteristic-less zero
  CHECK(z.is_zero());
  CHECK(z + Scalar::of_int(5, 3) == Scalar::of_int(5, 3));
  CHECK((z * Scalar::param(2)).is_zero());
  CHECK(z == Scalar::zero(7));

  std::mt19937 rng(99);
  std::vector<Scalar> pool;
  for (int iter = 0; iter < 40; ++iter) pool.push_back(random_scalar(rng, 3, true));
  for (const auto& x : pool)
    for (const auto& y : pool) {
      CHECK(x.cmp(y) == -y.cmp(x));
      if (x.cmp(y) == 0) CHECK(x == y);
    }
  for (const auto& x : pool)
    for (const auto& y : pool)
      for (const auto& w : pool)
        if (x.cmp(y) < 0 && y.cmp(w) < 0) CHECK(x.cmp(w) < 0);
}

TEST_CASE("residue extraction") {
  CHECK(Scalar::of_int(7, 12).residue() == 5);
  expect_err(Err::NonIntegerCoefficient, [] { Scalar::param(3).residue(); });
}
