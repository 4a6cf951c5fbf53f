#include "stickel/stickelberger.hpp"
#include "stickel/suites.hpp"

#include <gtest/gtest.h>

using namespace stickel;

namespace {

Rational q(const char* s) { return Rational::parse(s); }

// Theta over G(Q(mu_f)/Q) straight from the definition, coefficient of sigma_c keyed by c.
std::map<std::int64_t, Rational> naive_theta(std::int64_t f, std::int64_t b, int n) {
  std::map<std::int64_t, Rational> out;
  Rational bp = Rational(big_pow(BigInt(b), static_cast<unsigned>(n + 1)));
  for (auto a : unit_group(f)) out[inverse_mod(a, f)] += bp * zeta_q(f, a, n) - zeta_q(f, mod(a * b, f), n);
  return out;
}

void expect_theta(std::int64_t f, std::int64_t b, int n, const std::map<std::int64_t, const char*>& want) {
  auto field = AbelianFieldQ::cyclotomic(f);
  auto t = theta(make_context_q(field, f, b, n));
  for (auto [a, v] : want) EXPECT_EQ(t[field.artin_symbol(a)], q(v)) << "f=" << f << " b=" << b << " n=" << n << " a=" << a;
}

}  // namespace

TEST(Theta, WorkedExample) {
  expect_theta(4, 7, 1, {{1, "2"}, {3, "2"}});
  expect_theta(12, 7, 1, {{1, "-27"}, {5, "23"}, {7, "23"}, {11, "-27"}});
  EXPECT_TRUE(worked_example_check().pass);
}

// values from an independent exact computation with Bernoulli polynomials over fractions
TEST(Theta, FrozenValues) {
  expect_theta(5, 2, 1, {{1, "-1/4"}, {2, "3/4"}, {3, "3/4"}, {4, "-1/4"}});
  expect_theta(5, 3, 2, {{1, "-11"}, {2, "5"}, {3, "-5"}, {4, "11"}});
  expect_theta(7, 2, 1, {{1, "-3/4"}, {2, "5/4"}, {3, "1/4"}, {4, "1/4"}, {5, "5/4"}, {6, "-3/4"}});
  expect_theta(8, 3, 1, {{1, "-7/3"}, {3, "8/3"}, {5, "8/3"}, {7, "-7/3"}});
  expect_theta(9, 2, 3, {{1, "545/8"}, {2, "-679/8"}, {4, "121/8"}, {5, "121/8"}, {7, "-679/8"}, {8, "545/8"}});
}

TEST(Theta, MatchesDefinitionOverFullCyclotomicFields) {
  for (std::int64_t f = 2; f <= 36; ++f)
    for (std::int64_t b : {2, 7, 11})
      for (int n = 0; n <= 3; ++n) {
        if (gcd64(b, f) != 1) continue;
        auto field = AbelianFieldQ::cyclotomic(f);
        auto t = theta(make_context_q(field, f, b, n));
        for (auto [c, v] : naive_theta(f, b, n)) EXPECT_EQ(t[field.artin_symbol(c)], v) << f << " " << b << " " << n;
      }
}

// Over a subfield the coefficients are the sums over cosets of H.
TEST(Theta, SubfieldIsPushForward) {
  auto big = AbelianFieldQ::cyclotomic(5), small = AbelianFieldQ::make_field(5, {4});
  for (int n = 0; n <= 3; ++n) {
    auto tb = theta(make_context_q(big, 5, 2, n));
    auto ts = theta(make_context_q(small, 5, 2, n));
    EXPECT_TRUE(tb.push_forward(small.galois_group(), restriction_map(big, small)) == ts);
  }
}

TEST(Theta, RejectsBadInputs) {
  auto f4 = AbelianFieldQ::cyclotomic(4);
  EXPECT_THROW(make_context_q(f4, 4, 2, 1), PreconditionError);
  EXPECT_THROW(make_context_q(f4, 4, 3, -1), PreconditionError);
  EXPECT_THROW(make_context_q(f4, 4, 0, 1), PreconditionError);
}

TEST(Integrality, Examples) {
  auto f4 = AbelianFieldQ::cyclotomic(4);
  auto c7 = make_context_q(f4, 4, 7, 1);
  EXPECT_EQ(delta(c7, f4.artin_symbol(1)), q("2"));
  EXPECT_TRUE(check_integrality(c7).pass);
  auto c3 = make_context_q(f4, 4, 3, 1);
  EXPECT_EQ(delta(c3, f4.artin_symbol(1)), q("1/3"));
  EXPECT_TRUE(check_integrality(c3).pass);
}

TEST(Integrality, CorruptedTableFails) {
  auto t = std::make_shared<PartialZetaTable>(build_table_q(4, 2));
  t->set_value(0, 1, t->value(0, 1) + q("1/5"));
  auto c = make_context(t, t->group()->label(t->class_of(7)), 1);
  EXPECT_FALSE(check_integrality(c).pass);
}

TEST(Congruence, ExampleAtConductorFour) {
  auto f4 = AbelianFieldQ::cyclotomic(4);
  auto c = make_context_q(f4, 4, 7, 1);
  EXPECT_EQ(delta(c, 0, 1), q("2"));
  EXPECT_EQ(delta(c, 0, 0), q("2"));
  auto r = check_congruence(c, 1, 0);
  EXPECT_TRUE(r.applicable);
  EXPECT_TRUE(r.pass);
}

TEST(Congruence, EqualTwistsAreTrivial) {
  auto c = make_context_q(AbelianFieldQ::cyclotomic(7), 7, 2, 2);
  auto r = check_congruence(c, 2, 2);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.checked, 6);
}

// Delta_2(1,7,3) = 4, 7 Delta_1(1,7,3) = 7, and 4 - 7 is odd while w_1(Q(mu_3)) = 6.
TEST(Congruence, FullModulusFailsWithWitness) {
  auto c = make_context_q(AbelianFieldQ::cyclotomic(3), 3, 7, 1);
  auto r = check_congruence(c, 1, 0, CongruenceModulus::full);
  EXPECT_FALSE(r.pass);
  ASSERT_FALSE(r.witnesses.empty());
  EXPECT_NE(r.witnesses[0].find("lhs=4 rhs=7 mod 6"), std::string::npos) << r.witnesses[0];
  EXPECT_TRUE(check_congruence(c, 1, 0, CongruenceModulus::f_supported).pass);
}

TEST(Congruence, PartSupportedOnConductorHoldsForLowerTwistZero) {
  auto r = sweep_congruence(24, 4, {7, 11, 13}, CongruenceModulus::f_supported, 1, 0);
  EXPECT_TRUE(r.pass) << (r.witnesses.empty() ? "" : r.witnesses[0]);
}

// The simulator relies on the l-part of gcd(w_n, w_m) with l dividing the conductor.
TEST(Congruence, PrimePartHoldsForAllPairsWhenPrimeDividesConductor) {
  for (std::int64_t l : {3, 5, 7})
    for (std::int64_t f = l; f <= 45; f += l)
      for (std::int64_t b : {7, 11, 13}) {
        if (gcd64(b, f) != 1) continue;
        for (int n = 1; n <= 4; ++n)
          for (int m = 0; m < n; ++m) {
            auto r = check_congruence(make_context_q(AbelianFieldQ::cyclotomic(f), f, b, n), n, m, CongruenceModulus::prime_part, l);
            EXPECT_TRUE(!r.applicable || r.pass) << (r.witnesses.empty() ? "" : r.witnesses[0]);
          }
      }
}

// Delta_4(1,7,2) = -140 and Delta_3(1,7,2) = 0, while w_2(Q) = 24 has 2-part 8.
TEST(Congruence, FormWithPositiveLowerTwistFailsAtTwo) {
  auto c = make_context_q(AbelianFieldQ::cyclotomic(2), 2, 7, 3);
  auto r = check_congruence(c, 3, 2, CongruenceModulus::f_supported);
  EXPECT_FALSE(r.pass);
  ASSERT_FALSE(r.witnesses.empty());
  EXPECT_NE(r.witnesses[0].find("lhs=-140 rhs=0 mod 8"), std::string::npos) << r.witnesses[0];
}

// At a prime not dividing f the lower-twist-zero form can fail: f = 4, b = 7, n = 2 at 3.
TEST(Congruence, PrimePartAwayFromConductorCanFail) {
  auto c = make_context_q(AbelianFieldQ::cyclotomic(4), 4, 7, 2);
  EXPECT_FALSE(check_congruence(c, 2, 0, CongruenceModulus::prime_part, 3).pass);
}

TEST(Congruence, CorruptedTableFails) {
  auto t = std::make_shared<PartialZetaTable>(build_table_q(4, 3));
  t->set_value(0, 2, t->value(0, 2) + q("1"));
  auto c = make_context(t, t->group()->label(t->class_of(7)), 2);
  EXPECT_FALSE(check_congruence(c, 2, 1).pass);
}

TEST(ConductorRestriction, WorkedAndSwept) {
  auto s = conductor_restriction_sides(12, 4, 7, 1);
  EXPECT_TRUE(s.equal());
  auto f4 = AbelianFieldQ::cyclotomic(4);
  EXPECT_EQ(s.lhs[f4.artin_symbol(1)], q("-4"));
  EXPECT_EQ(s.lhs[f4.artin_symbol(3)], q("-4"));
  auto r = sweep_conductor_restriction(40, 3, {7, 11, 13}, 1);
  EXPECT_TRUE(r.pass);
}

TEST(ConductorRestriction, WrongEulerTwistIsDetected) {
  auto field = AbelianFieldQ::cyclotomic(4);
  QGroupRing big = theta(make_context_q(field, 12, 7, 2));
  QGroupRing wrong = euler_factor_q(field, 3, 1) * theta(make_context_q(field, 4, 7, 2));
  EXPECT_FALSE(big == wrong);
}

TEST(EulerFactor, Shape) {
  auto field = AbelianFieldQ::cyclotomic(5);
  auto e = euler_factor_q(field, 2, 3);
  EXPECT_EQ(e[field.artin_symbol(1)], q("1"));
  EXPECT_EQ(e[field.artin_symbol(3)], q("-8"));  // sigma_2^{-1} = sigma_3
}

// F = Q, b = 7, n = 1, l = 3: Theta = 48 zeta(-1) = -4 at conductor 1, but 4 at modulus 4.
TEST(ThetaLevel0, ScalarCaseDependsOnTheModulus) {
  auto q0 = AbelianFieldQ::cyclotomic(1);
  EXPECT_EQ(theta_level0(make_context_q(q0, 7, 1), 3)[0], q("8"));
  EXPECT_EQ(theta_level0(make_context_q(q0, 4, 7, 1), 3)[0], q("-8"));
}

TEST(GammaL, InvertsTheEulerFactor) {
  for (auto [f, l] : std::vector<std::pair<std::int64_t, std::int64_t>>{{4, 3}, {1, 5}, {5, 3}, {7, 3}, {3, 3}})
    for (int n = 1; n <= 3; ++n)
      for (int k = 1; k <= 4; ++k) {
        auto field = AbelianFieldQ::cyclotomic(f);
        auto gm = gamma_l(field, l, n, k);
        std::int64_t lk = ipow(l, k);
        auto one = ZnGroupRing::scalar(field.galois_group(), 1, ResidueRing{lk});
        if (f % l == 0) {
          EXPECT_TRUE(gm == one);
          continue;
        }
        EXPECT_TRUE(gm * reduce(euler_factor_q(field, l, n), lk) == one) << f << " " << l << " " << n << " " << k;
      }
  EXPECT_THROW(gamma_l(AbelianFieldQ::cyclotomic(4), 3, 0, 2), ArithmeticError);
}

TEST(Tower, RestrictionAcrossLevels) {
  for (std::int64_t f : {1, 4, 5})
    for (int n = 1; n <= 2; ++n)
      for (int k = 0; k <= 1; ++k) EXPECT_TRUE(verify_tower_restriction(AbelianFieldQ::cyclotomic(f), 7, n, 3, k)) << f << " " << n << " " << k;
  EXPECT_THROW(verify_tower_restriction(AbelianFieldQ::cyclotomic(1), 7, 1, 2, 0), PreconditionError);
}

TEST(Characters, OracleOnSweep) {
  auto r = sweep_characters(20, 3, {7, 11, 13}, 1);
  EXPECT_TRUE(r.pass) << (r.witnesses.empty() ? "" : r.witnesses[0]);
  auto sub = character_check(make_context_q(AbelianFieldQ::make_field(13, {3}), 13, 2, 1));
  EXPECT_TRUE(sub.pass);
}

TEST(Characters, CorruptedThetaIsDetected) {
  auto t = std::make_shared<PartialZetaTable>(build_table_q(7, 2));
  t->set_value(1, 1, t->value(1, 1) + q("1/7"));
  StickContext c = make_context_q(AbelianFieldQ::cyclotomic(7), 7, 2, 1);
  c.zeta = t;
  EXPECT_FALSE(character_check(c).pass);
}

TEST(Wn, SuiteValues) { EXPECT_TRUE(wn_values_check().pass); }
