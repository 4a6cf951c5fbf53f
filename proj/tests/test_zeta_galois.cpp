#include "stickel/cyclotomic_galois.hpp"
#include "stickel/partial_zeta.hpp"

#include <gtest/gtest.h>

using namespace stickel;

namespace {
Rational q(const char* s) { return Rational::parse(s); }
}  // namespace

TEST(PartialZeta, FrozenSmallValues) {
  EXPECT_EQ(zeta_q(4, 1, 1), q("1/24"));
  EXPECT_EQ(zeta_q(5, 1, 0), q("3/10"));
  EXPECT_EQ(zeta_q(12, 1, 1), q("-13/24"));
  EXPECT_EQ(zeta_q(4, 3, 1), q("1/24"));
  EXPECT_EQ(riemann_zeta_negative(0), q("-1/2"));
}

// f^n * Hurwitz zeta(-n, a/f), evaluated numerically at 50 digits and rationalized.
TEST(PartialZeta, AgreesWithNumericHurwitzValues) {
  struct Row {
    std::int64_t f, a;
    int n;
    const char* v;
  };
  const Row rows[] = {
      {5, 1, 1, "-1/60"},     {5, 4, 1, "-1/60"},     {5, 3, 2, "1/5"},        {5, 2, 3, "-91/120"},    {7, 1, 1, "-13/84"},
      {7, 4, 1, "23/84"},     {7, 1, 2, "-5/7"},      {7, 4, 2, "2/7"},        {7, 1, 3, "1321/840"},   {7, 4, 3, "-1919/840"},
      {12, 1, 1, "-13/24"},   {12, 11, 1, "-13/24"},  {12, 7, 2, "35/36"},     {12, 5, 3, "-2669/240"}, {15, 1, 1, "-47/60"},
      {15, 7, 1, "37/60"},    {15, 13, 1, "-23/60"},  {15, 2, 2, "-143/45"},   {15, 8, 2, "28/45"},     {15, 14, 2, "91/45"},
      {15, 4, 3, "-497/120"}, {15, 11, 3, "-497/120"},
  };
  for (auto& r : rows) EXPECT_EQ(zeta_q(r.f, r.a, r.n), q(r.v)) << r.f << " " << r.a << " " << r.n;
}

// Summing over all residues mod f (units or not) recovers zeta(-n).
TEST(PartialZeta, FullResidueSumIsRiemannZeta) {
  for (std::int64_t f = 2; f <= 30; ++f)
    for (int n = 0; n <= 5; ++n) {
      Rational s;
      for (std::int64_t a = 1; a <= f; ++a) {
        Rational x{BigInt(a), BigInt(f)};
        s -= Rational(big_pow(BigInt(f), static_cast<unsigned>(n))) * bernoulli_poly(n + 1, x) / Rational(n + 1);
      }
      EXPECT_EQ(s, riemann_zeta_negative(n));
    }
  EXPECT_EQ(riemann_zeta_negative(1), q("-1/12"));
  EXPECT_EQ(riemann_zeta_negative(3), q("1/120"));
}

TEST(PartialZeta, RejectsBadArguments) {
  EXPECT_THROW(zeta_q(4, 2, 1), PreconditionError);
  EXPECT_THROW(zeta_q(4, 1, -1), PreconditionError);
  EXPECT_THROW(zeta_q(0, 1, 1), PreconditionError);
}

TEST(PartialZeta, DistributionRelation) {
  for (std::int64_t f : {3, 4, 5, 7, 12})
    for (std::int64_t l : {2, 3, 5, 7})
      for (int n = 0; n <= 3; ++n)
        for (auto a : unit_group(f))
          if (f % l) EXPECT_TRUE(verify_distribution(f, l, n, a)) << f << " " << l << " " << n << " " << a;
}

TEST(ZetaTable, FormatLoadRoundTrip) {
  auto t = build_table_q(12, 3);
  auto doc = format_table(t);
  auto back = load_zeta_table(doc);
  EXPECT_TRUE(back == t);
  EXPECT_EQ(back.twists(), (std::vector<int>{0, 1, 2, 3}));
  ASSERT_TRUE(back.w_value(2).has_value());
  EXPECT_EQ(*back.w_value(2), BigInt(24));
}

TEST(ZetaTable, MalformedDocumentsAreRejected) {
  auto doc = format_table(build_table_q(5, 1));
  auto replace = [&](const std::string& from, const std::string& to) {
    std::string d = doc;
    auto pos = d.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    d.replace(pos, from.size(), to);
    return d;
  };
  EXPECT_THROW(load_zeta_table(replace("order:", "ordre:")), ParseError);
  EXPECT_THROW(load_zeta_table(replace(" | 1 | ", " | 1 | 1/0 # ")), ParseError);
  // dropping a value leaves the table incomplete
  std::string d = doc;
  auto pos = d.find("| 0 |");
  auto start = d.rfind('\n', pos) + 1;
  d.erase(start, d.find('\n', pos) - start + 1);
  EXPECT_THROW(load_zeta_table(d), std::exception);
}

TEST(Field, DegreesConductorsAndArtin) {
  auto q5 = AbelianFieldQ::cyclotomic(5);
  EXPECT_EQ(q5.degree(), 4);
  EXPECT_EQ(q5.conductor(), 5);
  auto r5 = AbelianFieldQ::make_field(5, {4});  // Q(sqrt 5)
  EXPECT_EQ(r5.degree(), 2);
  EXPECT_EQ(r5.conductor(), 5);
  EXPECT_EQ(r5.artin_symbol(4), r5.artin_symbol(1));
  EXPECT_NE(r5.artin_symbol(2), r5.artin_symbol(1));
  // Q(mu_12)^{<7>} = Q(sqrt -3), conductor 3
  auto f = AbelianFieldQ::make_field(12, {7});
  EXPECT_EQ(f.degree(), 2);
  EXPECT_EQ(f.conductor(), 3);
  EXPECT_THROW(f.artin_symbol(3), PreconditionError);
  EXPECT_THROW(AbelianFieldQ::make_field(12, {2}), PreconditionError);
}

TEST(Field, RestrictionIsASurjectiveHomomorphism) {
  for (std::int64_t big : {12, 20, 24, 36})
    for (auto d : divisors(big)) {
      auto e = AbelianFieldQ::cyclotomic(big), f = AbelianFieldQ::cyclotomic(d);
      ASSERT_TRUE(is_subfield(f, e));
      auto res = restriction_map(e, f);
      const auto &ge = *e.galois_group(), &gf = *f.galois_group();
      std::vector<int> hit(gf.size(), 0);
      for (int a = 0; a < ge.size(); ++a) {
        hit[res[a]] = 1;
        for (int b = 0; b < ge.size(); ++b) EXPECT_EQ(res[ge.mul(a, b)], gf.mul(res[a], res[b]));
      }
      for (int h : hit) EXPECT_EQ(h, 1);
    }
  EXPECT_FALSE(is_subfield(AbelianFieldQ::cyclotomic(5), AbelianFieldQ::cyclotomic(12)));
}

TEST(Field, CompositumAndTower) {
  auto c = compositum(AbelianFieldQ::make_field(5, {4}), AbelianFieldQ::cyclotomic(3));
  EXPECT_EQ(c.degree(), 4);
  EXPECT_EQ(c.conductor(), 15);
  auto t = tower_level(AbelianFieldQ::cyclotomic(4), 3, 2);
  EXPECT_EQ(t.field_k.degree(), 12);
  EXPECT_EQ(t.conductor_k, 36);
}

TEST(Field, CyclotomicPolynomials) {
  EXPECT_EQ(cyclotomic_polynomial(12), (std::vector<BigInt>{1, 0, -1, 0, 1}));
  EXPECT_EQ(cyclotomic_polynomial(6), (std::vector<BigInt>{1, -1, 1}));
  EXPECT_EQ(cyclotomic_polynomial(1), (std::vector<BigInt>{-1, 1}));
}

TEST(Wn, FrozenValues) {
  EXPECT_EQ(w_n(AbelianFieldQ::cyclotomic(1), 1), BigInt(2));
  EXPECT_EQ(w_n(AbelianFieldQ::cyclotomic(1), 2), BigInt(24));
  EXPECT_EQ(w_n(AbelianFieldQ::cyclotomic(4), 1), BigInt(4));
  EXPECT_EQ(w_n(AbelianFieldQ::cyclotomic(3), 1), BigInt(6));
  EXPECT_EQ(w_n(AbelianFieldQ::cyclotomic(3), 2), BigInt(24));
}

// w_1 counts roots of unity: lcm(2, f) for Q(mu_f).
TEST(Wn, FirstValueCountsRootsOfUnity) {
  for (std::int64_t f = 1; f <= 60; ++f) {
    EXPECT_EQ(w_n(AbelianFieldQ::cyclotomic(f), 1), BigInt(lcm64(2, f))) << f;
  }
}

TEST(Wn, BoundedSearchAgreesWithPrimeByPrime) {
  std::vector<AbelianFieldQ> fields{AbelianFieldQ::cyclotomic(1), AbelianFieldQ::cyclotomic(4), AbelianFieldQ::cyclotomic(3),
                                    AbelianFieldQ::make_field(5, {4}), AbelianFieldQ::cyclotomic(5), AbelianFieldQ::make_field(8, {3})};
  for (auto& f : fields)
    for (int n = 1; n <= 3; ++n) {
      auto bound = w_n_search_bound(f, n);
      if (bound > 3000) continue;
      EXPECT_EQ(BigInt(w_n_bruteforce(f, n, bound)), w_n(f, n)) << f.description() << " n=" << n;
    }
  EXPECT_EQ(w_n_search_bound(AbelianFieldQ::cyclotomic(1), 1), 4);
  EXPECT_EQ(w_n_search_bound(AbelianFieldQ::cyclotomic(1), 2), 24);
}

TEST(Characters, CountAndOrthogonality) {
  auto f = AbelianFieldQ::cyclotomic(15);
  auto chars = enumerate_characters(*f.galois_group());
  EXPECT_EQ(static_cast<int>(chars.size()), f.degree());
  // exponents of distinct characters differ somewhere
  for (std::size_t i = 0; i < chars.size(); ++i)
    for (std::size_t j = i + 1; j < chars.size(); ++j) EXPECT_NE(chars[i], chars[j]);
}
