#include "stickel/finite_field_k.hpp"
#include "stickel/module_splitting.hpp"
#include "stickel/suites.hpp"

#include <gtest/gtest.h>

using namespace stickel;

TEST(KGroups, Orders) {
  EXPECT_EQ(k_order(3, 2), BigInt(8));
  EXPECT_EQ(k_order(4, 3), BigInt(63));
  EXPECT_THROW(k_order(6, 1), PreconditionError);
  EXPECT_THROW(k_order(5, 0), PreconditionError);
  auto c = coeff_k_group(cyclic_k_group(7, 1), 3, 2);
  EXPECT_EQ(c.order, 3);  // 6 / 3-part
  EXPECT_EQ(coeff_k_group(cyclic_k_group(19, 1), 3, 1).order, 3);
  EXPECT_EQ(coeff_k_group(cyclic_k_group(19, 1), 3, 4).order, 9);
}

TEST(KGroups, MapsOnSmallExample) {
  // F_9 over F_3, m = 1: Z/8 -> Z/2 by reduction, inclusion multiplies by 4, Frobenius by 3
  EXPECT_EQ(norm_map(3, 2, 1, 5), 1);
  EXPECT_EQ(inclusion_map(3, 2, 1, 1), 4);
  EXPECT_EQ(frobenius_action(3, 2, 1, 5), 7);
}

TEST(KGroups, QuillenIdentities) {
  auto r = quillen_suite({2, 3, 4, 5, 7}, {2, 3}, {1, 2}, 1);
  EXPECT_TRUE(r.pass) << (r.witnesses.empty() ? "" : r.witnesses[0]);
  EXPECT_GT(r.checked, 0);
}

TEST(KGroups, ValuationOfQvPower) {
  EXPECT_EQ(k_of_v(7, 1, 3), 1);
  EXPECT_EQ(k_of_v(7, 3, 3), 2);
  EXPECT_EQ(k_of_v(2, 2, 3), 1);
  EXPECT_EQ(k_of_v(2, 1, 3), 0);
  EXPECT_EQ(k_of_v(3, 4, 5), 1);
  EXPECT_THROW(k_of_v(9, 1, 3), PreconditionError);
}

TEST(KGroups, BorelRanks) {
  EXPECT_EQ(borel_rank(1, 1, 0), 0);
  EXPECT_EQ(borel_rank(5, 1, 0), 1);
  EXPECT_EQ(borel_rank(3, 1, 0), 0);
  EXPECT_EQ(borel_rank(3, 0, 1), 1);
  EXPECT_EQ(borel_rank(2, 0, 1), 0);
}

TEST(InducedModule, ComponentsFollowTheFrobenius) {
  auto f = AbelianFieldQ::cyclotomic(5);
  auto split = induced_module(f.galois_group(), f.artin_symbol(11), 1, 9);
  EXPECT_EQ(split.module->rank(), 4);
  auto inert2 = induced_module(f.galois_group(), f.artin_symbol(19), 8, 9);  // 8^2 = 1 mod 9
  EXPECT_EQ(inert2.module->rank(), 2);
  EXPECT_EQ(inert2.layout.residue_degree, 2);
  EXPECT_THROW(induced_module(f.galois_group(), f.artin_symbol(19), 2, 9), PreconditionError);
  // Frobenius acts on its own component by the scalar
  Elem e = inert2.module->basis(0);
  EXPECT_TRUE(inert2.module->equal(inert2.module->act(f.artin_symbol(19), e), inert2.module->scale(e, 8)));
}

namespace {

// G = C2 acting on Z/9 by -1, A = 3 Z/9, C = Z/3.
ShortExactSequence sign_ses() {
  auto g = cyclic_product_group({2});
  int s = g->generators().at(0);
  auto b = make_module(g, {9}, {{s, Mat64{{8}}}});
  auto a = make_module(g, {3}, {{s, Mat64{{2}}}});
  auto c = make_module(g, {3}, {{s, Mat64{{2}}}});
  return make_ses(ModuleMap::from_images(a, b, {Elem{3}}), ModuleMap::from_images(b, c, {Elem{1}}));
}

struct SignSequence {
  ShortExactSequence ses = sign_ses();
  GroupPtr g = ses.b->group();
  ModPtr b = ses.b, a = ses.a, c = ses.c;
};

}  // namespace

TEST(FiniteModule, KernelImageCokernel) {
  SignSequence s;
  EXPECT_EQ(s.b->size(), BigInt(9));
  auto ker = kernel(s.ses.pi);
  EXPECT_EQ(ker.module->size(), BigInt(3));
  EXPECT_EQ(image(s.ses.iota).module->size(), BigInt(3));
  auto co = cokernel(s.ses.iota);
  EXPECT_EQ(co.module->size(), BigInt(3));
  EXPECT_EQ(direct_sum(s.a, s.b)->size(), BigInt(27));
  EXPECT_EQ(torsion(s.b, 3).module->size(), BigInt(3));
}

TEST(FiniteModule, ActionMustRespectGroupRelations) {
  auto g = cyclic_product_group({2});
  int s = g->generators().at(0);
  EXPECT_THROW(make_module(g, {9}, {{s, Mat64{{2}}}}), ModuleError);  // 2^2 != 1 mod 9
  EXPECT_THROW(make_module(g, {0}, {{s, Mat64{{1}}}}), ModuleError);
}

TEST(FiniteModule, SequencesAreValidated) {
  SignSequence s;
  EXPECT_THROW(make_ses(ModuleMap::from_images(s.a, s.b, {Elem{3}}), ModuleMap::from_images(s.b, s.c, {Elem{0}})), ContractError);
  auto c9 = make_module(s.g, {9}, {{s.g->generators().at(0), Mat64{{8}}}});
  EXPECT_THROW(make_ses(ModuleMap::from_images(s.a, s.b, {Elem{3}}), ModuleMap::from_images(s.b, c9, {Elem{1}})), ContractError);
}

TEST(Splitting, HandExampleRoundTrips) {
  SignSequence s;
  QGroupRing r = QGroupRing::scalar(s.g, Rational(3));
  ModuleMap lambda = ModuleMap::from_images(s.c, s.b, {Elem{3}});
  auto gamma = derive_gamma(s.ses, r, lambda);
  EXPECT_TRUE(gamma.is_zero());  // Lambda o pi is already multiplication by 3
  auto rep = check_contracts(s.ses, {lambda, gamma, r});
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.checked, 3 + 3 + 3 + 9);
  auto lambda2 = derive_lambda(s.ses, r, gamma);
  EXPECT_TRUE(lambda2 == lambda);
}

TEST(Splitting, ContractViolationsAreRejected) {
  SignSequence s;
  QGroupRing r = QGroupRing::scalar(s.g, Rational(3));
  ModuleMap lambda = ModuleMap::from_images(s.c, s.b, {Elem{3}});
  // the sequence does not split, so no Lambda has pi o Lambda = 1
  EXPECT_THROW(derive_gamma(s.ses, QGroupRing::scalar(s.g, Rational(1)), lambda), ContractError);
  ModuleMap bad = ModuleMap::zero(s.c, s.b);  // Lambda o pi + iota o Gamma = 0 != 3
  auto gamma = derive_gamma(s.ses, r, lambda);
  auto rep = check_contracts(s.ses, {bad, gamma, r});
  EXPECT_FALSE(rep.pass);
  EXPECT_FALSE(rep.witnesses.empty());
}

TEST(Splitting, AnnihilationOnInducedSequence) {
  SignSequence s;
  ModuleMap lambda = ModuleMap::from_images(s.c, s.b, {Elem{3}});
  auto seq = induced_four_term(s.ses, 3);  // del = 3 pi = 0, D = C
  EXPECT_EQ(seq.d->size(), BigInt(3));
  auto rep = verify_annihilation(seq, QGroupRing::scalar(s.g, Rational(9)), lambda);
  EXPECT_TRUE(rep.pass);
  // del o Lambda = 0 differs from r = 1 on C
  EXPECT_THROW(verify_annihilation(seq, QGroupRing::scalar(s.g, Rational(1)), lambda), ContractError);
}

TEST(Splitting, SeededPropertySuite) {
  auto r = splitting_property_suite(60, 5, 1);
  EXPECT_TRUE(r.pass) << (r.witnesses.empty() ? "" : r.witnesses[0]);
  EXPECT_GT(r.checked, 1000);
}

TEST(Splitting, RandomCasesAreReproducible) {
  auto g = cyclic_product_group({2, 2});
  auto a = random_splitting_case(42, 3, 2, g), b = random_splitting_case(42, 3, 2, g);
  EXPECT_EQ(a.description, b.description);
  EXPECT_TRUE(a.lambda == b.lambda);
}
