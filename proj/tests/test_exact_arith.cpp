#include "stickel/exact_arith.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace stickel;

TEST(Rational, NormalizesSignAndLowestTerms) {
  Rational x(BigInt(6), BigInt(-4));
  EXPECT_EQ(x.num(), BigInt(-3));
  EXPECT_EQ(x.den(), BigInt(2));
  EXPECT_EQ(x.str(), "-3/2");
  EXPECT_EQ(Rational(4).str(), "4");
}

TEST(Rational, DivisionByZeroThrows) {
  EXPECT_THROW(Rational(BigInt(1), BigInt(0)), ArithmeticError);
  EXPECT_THROW(Rational(1) / Rational(0), ArithmeticError);
  EXPECT_THROW(Rational(0).pow(-1), ArithmeticError);
}

TEST(Rational, ParseRoundTrip) {
  for (const char* s : {"0", "7", "-7", "1/3", "-22/7", "123456789012345678901234567890/11"})
    EXPECT_EQ(Rational::parse(s).str(), s);
  EXPECT_EQ(Rational::parse(" 4/6 ").str(), "2/3");
  EXPECT_EQ(Rational::parse("+5").str(), "5");
  EXPECT_THROW(Rational::parse("1/0"), ParseError);
  EXPECT_THROW(Rational::parse("x"), ParseError);
  EXPECT_THROW(Rational::parse("1.5"), ParseError);
  EXPECT_THROW(Rational::parse("-"), ParseError);
}

TEST(Rational, FieldAxiomsOnRandomValues) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long long> d(-1000000, 1000000);
  auto draw = [&] {
    long long den = d(rng);
    if (den == 0) den = 1;
    return Rational(BigInt(d(rng)), BigInt(den));
  };
  for (int i = 0; i < 300; ++i) {
    Rational a = draw(), b = draw(), c = draw();
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a - a, Rational(0));
    if (!b.is_zero()) EXPECT_EQ((a / b) * b, a);
  }
}

TEST(Rational, PowAndValuation) {
  EXPECT_EQ(Rational(BigInt(2), BigInt(3)).pow(3), Rational(BigInt(8), BigInt(27)));
  EXPECT_EQ(Rational(2).pow(-2), Rational(BigInt(1), BigInt(4)));
  EXPECT_EQ(l_valuation(Rational(BigInt(18), BigInt(5)), 3), 2);
  EXPECT_EQ(l_valuation(Rational(BigInt(1), BigInt(25)), 5), -2);
  EXPECT_THROW(l_valuation(Rational(0), 3), ArithmeticError);
}

TEST(Integers, ModularHelpers) {
  EXPECT_EQ(mod(-7, 5), 3);
  EXPECT_EQ(powmod(3, 200, 1000003), 333986);
  EXPECT_EQ(inverse_mod(7, 40), 23);
  EXPECT_EQ(powmod_signed(2, -1, 9), 5);
  EXPECT_EQ(multiplicative_order(2, 7), 3);
  EXPECT_EQ(euler_phi(36), 12);
  EXPECT_EQ(gcd64(-12, 18), 6);
  EXPECT_EQ(lcm64(4, 6), 12);
  EXPECT_EQ(reduce_mod(Rational(BigInt(1), BigInt(3)), 7), 5);
  EXPECT_THROW(reduce_mod(Rational(BigInt(1), BigInt(3)), 9), ArithmeticError);
}

TEST(Integers, FactorizationMultipliesBack) {
  for (std::int64_t n = 2; n < 3000; ++n) {
    std::int64_t prod = 1;
    for (auto [p, e] : factorize(n)) {
      EXPECT_TRUE(is_prime(p));
      prod *= ipow(p, e);
    }
    EXPECT_EQ(prod, n);
  }
  EXPECT_EQ(divisors(12), (std::vector<std::int64_t>{1, 2, 3, 4, 6, 12}));
  EXPECT_EQ(prime_divisors(360), (std::vector<std::int64_t>{2, 3, 5}));
}

TEST(Bernoulli, KnownValues) {
  EXPECT_EQ(bernoulli(0), Rational(1));
  EXPECT_EQ(bernoulli(1), Rational(BigInt(-1), BigInt(2)));
  EXPECT_EQ(bernoulli(2), Rational(BigInt(1), BigInt(6)));
  EXPECT_EQ(bernoulli(3), Rational(0));
  EXPECT_EQ(bernoulli(4), Rational(BigInt(-1), BigInt(30)));
  EXPECT_EQ(bernoulli(12), Rational(BigInt(-691), BigInt(2730)));
  EXPECT_EQ(bernoulli(20), Rational(BigInt(-174611), BigInt(330)));
}

// Faulhaber: sum_{k<N} k^n = (B_{n+1}(N) - B_{n+1}) / (n+1), checked against direct power sums.
TEST(Bernoulli, PolynomialsMatchPowerSums) {
  for (unsigned n = 0; n <= 8; ++n)
    for (long long N = 1; N <= 12; ++N) {
      BigInt direct = 0;
      for (long long k = 0; k < N; ++k) direct += big_pow(BigInt(k), n);
      Rational viaB = (bernoulli_poly(n + 1, Rational(N)) - bernoulli(n + 1)) / Rational(static_cast<long long>(n + 1));
      EXPECT_EQ(viaB, Rational(direct)) << "n=" << n << " N=" << N;
    }
}

TEST(Bernoulli, ReflectionAndTranslation) {
  for (unsigned n = 1; n <= 10; ++n)
    for (long long a = 1; a < 7; ++a) {
      Rational x(BigInt(a), BigInt(7));
      Rational sign = n % 2 ? Rational(-1) : Rational(1);
      EXPECT_EQ(bernoulli_poly(n, Rational(1) - x), sign * bernoulli_poly(n, x));
      EXPECT_EQ(bernoulli_poly(n, x + Rational(1)) - bernoulli_poly(n, x), Rational(static_cast<long long>(n)) * x.pow(n - 1));
    }
}
