#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "tsn/admission.hpp"

using namespace tsn;
using namespace tsn::testing;

namespace {

Sc2Certificate example2_certificate(TVector tv = TVector::of({2, 4, 8, 8})) {
  return {latin_to_decomposition(cyclic_square4()), std::move(tv)};
}

TVector mixed_tvector() {
  return {{Period::finite(3), Period::finite(6), Period::finite(6), Period::infinite()}};
}

}  // namespace

TEST(Sc1Test, WorkedExamples) {
  EXPECT_TRUE(check_sc1(example1_spec()));
  EXPECT_FALSE(check_sc1(example2_spec()));
  EXPECT_TRUE(check_sc1(TrafficSpec(4)));
  EXPECT_FALSE(check_sc1(mixed_spec()));
}

TEST(Sc2CertificateTest, WorkedExamples) {
  EXPECT_TRUE(check_sc2_certificate(example2_spec(), example2_certificate()));
  // f(1,4) sits in M4 with period 8: neither 8 == 9 nor 8 >= 17.
  EXPECT_FALSE(check_sc2_certificate(example2_spec(),
                                     example2_certificate(TVector::of({2, 4, 8, 9}))));
  EXPECT_TRUE(check_sc2_certificate(mixed_spec(), example2_certificate(mixed_tvector())));
}

TEST(Sc2CertificateTest, UtilizationAboveOneFails) {
  EXPECT_FALSE(check_sc2_certificate(example2_spec(),
                                     example2_certificate(TVector::of({2, 4, 4, 8}))));
}

TEST(Sc2CertificateTest, PresentFlowInInfiniteMatchingFails) {
  TVector tv{{Period::finite(2), Period::finite(4), Period::finite(8), Period::infinite()}};
  EXPECT_FALSE(check_sc2_certificate(example2_spec(), example2_certificate(tv)));
}

TEST(Sc2CertificateTest, DimensionMismatchThrows) {
  EXPECT_THROW(check_sc2_certificate(TrafficSpec(3), example2_certificate()), ValidationError);
}

TEST(CandidatePeriodTest, WorkedExamples) {
  const auto d = latin_to_decomposition(cyclic_square4());
  const auto spec = example2_spec();
  EXPECT_EQ(candidate_period(spec, d.matching(0)), Period::finite(2));
  EXPECT_EQ(candidate_period(spec, d.matching(1)), Period::finite(4));
  EXPECT_EQ(candidate_period(spec, d.matching(2)), Period::finite(8));
  EXPECT_EQ(candidate_period(spec, d.matching(3)), Period::finite(8));
  EXPECT_EQ(candidate_period(mixed_spec(), d.matching(3)), Period::infinite());
}

TEST(CandidatePeriodTest, FallsBackToHalfPeriod) {
  // Zero-offset flow with T=4 alongside an offset flow with T=5: T_k=4 would
  // need 5 >= 7, so the half-period bound min(floor(5/2), floor(6/2)) = 2 wins.
  TrafficSpec s(2);
  s.set_flow(0, 0, {0, 4});
  s.set_flow(1, 1, {3, 5});
  EXPECT_EQ(candidate_period(s, PerfectMatching::identity(2)), Period::finite(2));
  // Only offset flows: t1 is infinite, so t2.
  TrafficSpec o(2);
  o.set_flow(0, 0, {1, 9});
  EXPECT_EQ(candidate_period(o, PerfectMatching::identity(2)), Period::finite(5));
}

TEST(SearchSc2Test, WorkedExamples) {
  auto ex2 = search_sc2(example2_spec());
  ASSERT_TRUE(ex2.has_value());
  EXPECT_EQ(utilization(ex2->tvector), Rational(1));
  EXPECT_EQ(ex2->tvector, TVector::of({2, 4, 8, 8}));
  EXPECT_EQ(decomposition_to_latin(ex2->decomposition), cyclic_square4());

  EXPECT_FALSE(search_sc2(example1_spec()).has_value());

  auto d = search_sc2(mixed_spec());
  ASSERT_TRUE(d.has_value());
  EXPECT_EQ(utilization(d->tvector), Rational(2, 3));
  EXPECT_TRUE(check_sc2_certificate(mixed_spec(), *d));
}

TEST(SearchSc2Test, ReturnsFirstCertificateInCanonicalOrder) {
  // An empty spec is feasible for every decomposition; the first square wins.
  auto c = search_sc2(TrafficSpec(4));
  ASSERT_TRUE(c.has_value());
  LatinSquareEnumerator e(4);
  ASSERT_TRUE(e.advance());
  EXPECT_EQ(decomposition_to_latin(c->decomposition), e.current());
  EXPECT_EQ(utilization(c->tvector), Rational(0));
}

TEST(SearchSc2Test, SizeBound) {
  EXPECT_THROW(search_sc2(TrafficSpec(7)), ValidationError);
}

TEST(SearchSc2Test, AgreesWithExhaustiveOracleOnSmallSwitches) {
  std::mt19937_64 rng(31337);
  int feasible = 0, infeasible = 0;
  for (int trial = 0; trial < 150; ++trial) {
    TrafficSpec s(3);
    for (Port i = 0; i < 3; ++i)
      for (Port j = 0; j < 3; ++j)
        if (uniform(rng, 0, 2) != 0) {
          const std::int64_t offset = uniform(rng, 0, 1) ? 0 : uniform(rng, 0, 4);
          s.set_flow(i, j, {offset, uniform(rng, 1, 8)});
        }
    const auto found = search_sc2(s);
    EXPECT_EQ(found.has_value(), exhaustive_sc2_feasible(s, 8)) << "trial " << trial;
    if (found) {
      EXPECT_TRUE(check_sc2_certificate(s, *found));
      ++feasible;
    } else {
      ++infeasible;
    }
  }
  // The generator should exercise both outcomes.
  EXPECT_GT(feasible, 10);
  EXPECT_GT(infeasible, 10);
}

TEST(SearchSc2Test, ConstructedInstancesAreFound) {
  std::mt19937_64 rng(5);
  DecompositionSampler sampler;
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(uniform(rng, 2, 4));
    const auto inst = random_sc2_instance(n, rng, sampler);
    ASSERT_TRUE(check_sc2_certificate(inst.spec, inst.certificate));
    const auto found = search_sc2(inst.spec);
    ASSERT_TRUE(found.has_value());
    EXPECT_TRUE(check_sc2_certificate(inst.spec, *found));
  }
}

TEST(Sc1Sc2Test, NeitherConditionImpliesTheOther) {
  EXPECT_TRUE(check_sc1(example1_spec()));
  EXPECT_FALSE(search_sc2(example1_spec()).has_value());
  EXPECT_FALSE(check_sc1(example2_spec()));
  EXPECT_TRUE(search_sc2(example2_spec()).has_value());
}

TEST(ArbiterTest, AdmitsUnderSc1) {
  TrafficSpec table(4);
  auto d = arbiter_admit(table, {0, 0, 0, 4});
  EXPECT_TRUE(std::holds_alternative<AdmitSc1>(d));
  EXPECT_TRUE(table.present(0, 0));
}

TEST(ArbiterTest, AdmitsUnderSc2WithCertificate) {
  TrafficSpec table(4);
  auto d = arbiter_admit(table, {0, 0, 0, 2});
  ASSERT_TRUE(std::holds_alternative<AdmitSc2>(d));
  const auto& cert = std::get<AdmitSc2>(d).certificate;
  EXPECT_TRUE(check_sc2_certificate(table, cert));
  EXPECT_EQ(cert.tvector.t[0], Period::finite(2));
  for (std::size_t k = 1; k < 4; ++k) EXPECT_TRUE(cert.tvector.t[k].is_infinite());
}

TEST(ArbiterTest, DuplicateSubscriptionThrows) {
  TrafficSpec table = example1_spec();
  EXPECT_THROW(arbiter_admit(table, {0, 0, 0, 4}), DuplicateSubscription);
}

TEST(ArbiterTest, RejectLeavesTableUnchanged) {
  // Two period-1 flows on the same input can never both be served.
  TrafficSpec table(2);
  ASSERT_TRUE(admitted(arbiter_admit(table, {0, 0, 0, 1})));
  const TrafficSpec before = table;
  auto d = arbiter_admit(table, {0, 1, 0, 1});
  EXPECT_TRUE(std::holds_alternative<Reject>(d));
  EXPECT_EQ(table, before);
}
