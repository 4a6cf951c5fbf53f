#include "stickel/euler_system.hpp"
#include "stickel/splitting_sim.hpp"
#include "stickel/suites.hpp"

#include <gtest/gtest.h>

using namespace stickel;

namespace {

const char* kSplit = R"(# Q(i), v over 13
field: 4
prime: 13
l: 3
m: 1
n: 2
b: 7
k_max: 3
mode: split
a_exp: 2
)";

ScenarioSpec spec_with(const std::string& extra) { return parse_scenario_spec(std::string(kSplit) + extra); }

std::string first_witness(const std::vector<CheckReport>& checks) {
  for (auto& c : checks)
    if (!c.witnesses.empty()) return c.name + ": " + c.witnesses[0];
  return "";
}

}  // namespace

TEST(ScenarioSpec, ParseFormatRoundTrip) {
  auto s = parse_scenario_spec(kSplit);
  EXPECT_EQ(s.f, 4);
  EXPECT_EQ(s.p, 13);
  EXPECT_EQ(s.a_characters(), (std::vector<int>{1}));
  auto again = parse_scenario_spec(format_scenario_spec(s));
  EXPECT_EQ(format_scenario_spec(again), format_scenario_spec(s));
  auto t = spec_with("a_chars: none\nadmissible: 11\n");
  EXPECT_TRUE(t.a_characters().empty());
  EXPECT_EQ(t.admissible, (std::vector<std::int64_t>{11}));
}

TEST(ScenarioSpec, RejectsBadInput) {
  EXPECT_THROW(parse_scenario_spec("prime: 13\nl: 3\n"), ParseError);  // b missing
  EXPECT_THROW(spec_with("colour: red\n"), ParseError);
  EXPECT_THROW(spec_with("l: 5\n"), ParseError);  // duplicate
  EXPECT_THROW(spec_with("mode_x\n"), ParseError);
  EXPECT_THROW(parse_scenario_spec("prime: 13\nl: 3\nb: 7\nmode: mixed\n"), ParseError);
  EXPECT_THROW(parse_scenario_spec("prime: 13\nl: 2\nb: 7\n"), ScenarioError);
  EXPECT_THROW(parse_scenario_spec("prime: 3\nl: 3\nb: 7\n"), ScenarioError);
  EXPECT_THROW(parse_scenario_spec("field: 4\nprime: 13\nl: 3\nb: 6\n"), ScenarioError);
  EXPECT_THROW(parse_scenario_spec("field: 4\nprime: 13\nl: 3\nb: 7\nk_max: 9\n"), ScenarioError);
  EXPECT_THROW(parse_scenario_spec("field: 4\nprime: 13\nl: 3\nb: 7\nadmissible: 7\n"), ScenarioError);
}

TEST(Scenario, SplitModePasses) {
  LocalizationScenario sc(parse_scenario_spec(kSplit));
  EXPECT_EQ(sc.k_v(), 1);  // 13^2 - 1 = 168 = 2^3 3 7
  auto rep = run_scenario(sc);
  EXPECT_TRUE(rep.pass()) << first_witness(rep.checks);
  EXPECT_GE(rep.checks.size(), 7u);
}

TEST(Scenario, TwistedModePasses) {
  auto s = parse_scenario_spec(kSplit);
  s.twisted = true;
  s.seed = 4;
  LocalizationScenario sc(s);
  auto rep = run_scenario(sc);
  EXPECT_TRUE(rep.pass()) << first_witness(rep.checks);
}

TEST(Scenario, SameSeedSameElements) {
  LocalizationScenario a(parse_scenario_spec(kSplit)), b(parse_scenario_spec(kSplit));
  for (int k = 1; k <= a.k_max(); ++k) EXPECT_EQ(a.special_element(k), b.special_element(k));
}

TEST(Scenario, LiftIndependenceReportCountsShifts) {
  LocalizationScenario sc(parse_scenario_spec(kSplit));
  for (int k = 1; k <= sc.k_max(); ++k) {
    const auto& L = sc.level(k);
    auto [x, rep] = sc.lambda_m(k, L.c.module->basis(0));
    EXPECT_TRUE(rep.pass);
    EXPECT_GT(rep.checked, 0);
    EXPECT_LE(BigInt(rep.checked), L.a->size());
  }
}

TEST(Scenario, BoundaryOfSpecialElementMatchesTheta) {
  LocalizationScenario sc(parse_scenario_spec(kSplit));
  for (int k = 1; k <= sc.k_max(); ++k) EXPECT_TRUE(sc.verify_special_element_boundary(k).pass) << k;
}

TEST(Scenario, GeneratorCovariance) {
  LocalizationScenario sc(parse_scenario_spec(kSplit));
  for (int k = 1; k <= sc.k_max(); ++k)
    for (std::int64_t u : {2, 4, 5}) {
      const auto& L = sc.level(k);
      EXPECT_TRUE(L.p0->equal(sc.special_element(k, u), L.p0->scale(sc.special_element(k), u))) << k << " " << u;
    }
}

TEST(Scenario, AssemblyNeedsTheStableLevel) {
  auto sc = build_stable_scenario(parse_scenario_spec(kSplit));
  int ks = sc.stable_level();
  EXPECT_GE(ks, 1);
  if (ks > 1) EXPECT_THROW(sc.assemble_lambda(ks - 1), StabilizationError);
  auto lm = sc.assemble_lambda();
  EXPECT_TRUE(sc.verify_assembled_boundary(lm).pass);
  EXPECT_TRUE(sc.certify_divisible_annihilation().pass);
}

TEST(Scenario, CorruptedTransferFails) {
  LocalizationScenario sc(spec_with("corrupt_transfer: true\n"));
  auto rep = run_scenario(sc);
  EXPECT_FALSE(rep.pass());
  EXPECT_FALSE(first_witness(rep.checks).empty());
}

TEST(Scenario, EngineeredDivisiblePart) {
  auto sc = build_stable_scenario(parse_scenario_spec("field: 1\nprime: 7\nl: 3\nm: 1\nn: 1\nb: 17\nk_max: 2\nseed: 3\nengineer_divisible: true\n"));
  auto rep = sc.certify_divisible_annihilation();
  EXPECT_TRUE(rep.pass) << (rep.witnesses.empty() ? "" : rep.witnesses[0]);
  EXPECT_TRUE(run_scenario(sc).pass());
}

TEST(Scenario, SeededSpecsAreReproducibleAndSmall) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto a = random_scenario_spec(seed), b = random_scenario_spec(seed);
    EXPECT_EQ(format_scenario_spec(a), format_scenario_spec(b));
    EXPECT_LE(a.field().degree() * euler_phi(ipow(a.l, a.k_max)), 150);
    EXPECT_GE(a.n - a.m, -1);
    EXPECT_LE(a.n - a.m, 2);
  }
}

TEST(Scenario, SeededSuiteSample) {
  for (std::uint64_t seed : {2, 9, 17}) {
    auto sc = build_stable_scenario(random_scenario_spec(seed));
    auto rep = run_scenario(sc);
    EXPECT_TRUE(rep.pass()) << sc.repro() << " " << first_witness(rep.checks);
  }
}

TEST(Euler, AdmissiblePrimes) {
  auto s = parse_scenario_spec(kSplit);
  s.prime_bound = 30;
  EXPECT_EQ(admissible_primes(s), (std::vector<std::int64_t>{5, 11, 17, 19, 23, 29}));
}

TEST(Euler, TwoLayerFamilyPasses) {
  auto spec = acceptance_family_specs().front();
  EulerFamily fam(spec);
  EXPECT_EQ(fam.conductors(), (std::vector<std::int64_t>{1, 11}));
  ASSERT_EQ(fam.edges().size(), 1u);
  auto rep = run_family(fam);
  EXPECT_TRUE(rep.pass()) << first_witness(rep.checks);
}

TEST(Euler, ElementAtTrivialLayerIsTheBaseElement) {
  auto spec = acceptance_family_specs().front();
  EulerFamily fam(spec);
  LocalizationScenario base(spec);
  for (int k = 1; k <= spec.k_max; ++k) {
    Elem xi = base.level(k).c.module->basis(0);
    EXPECT_EQ(fam.es_element(1, k, xi), base.lambda_m(k, xi).first);
  }
}

TEST(Euler, SwappedTwistFails) {
  EulerFamily fam(acceptance_family_specs().front());
  auto rep = run_family(fam, true);
  EXPECT_FALSE(rep.pass());
  bool es1_failed = false;
  for (auto& c : rep.checks)
    if (c.name == "norm relation for Lambda_m") es1_failed = !c.pass && !c.witnesses.empty();
  EXPECT_TRUE(es1_failed);
}

TEST(Euler, NoAuxiliaryPrimesMeansNotApplicable) {
  auto spec = acceptance_family_specs().front();
  spec.admissible.clear();
  EulerFamily fam(spec);
  EXPECT_TRUE(fam.edges().empty());
  auto rep = run_family(fam);
  for (auto& c : rep.checks)
    if (c.name == "assembled norm relation") EXPECT_FALSE(c.applicable);
}
