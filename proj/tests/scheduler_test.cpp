#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "tsn/scheduler.hpp"

using namespace tsn;
using namespace tsn::testing;

namespace {

FlowDecompositionSet cyclic_set() { return latin_to_decomposition(cyclic_square4()); }

Sc2Certificate mixed_certificate() {
  return {cyclic_set(),
          {{Period::finite(3), Period::finite(6), Period::finite(6), Period::infinite()}}};
}

std::vector<bool> none(std::size_t n) { return std::vector<bool>(n, false); }

}  // namespace

TEST(MtdmaTest, RoundRobinOverMatchings) {
  const auto d = cyclic_set();
  EXPECT_EQ(mtdma_matching(d, 0), PerfectMatching::identity(4));
  EXPECT_EQ(mtdma_matching(d, 5), d.matching(1));
  for (Slot t = 0; t < 40; ++t) EXPECT_EQ(mtdma_matching(d, t), mtdma_matching(d, t + 4));
  EXPECT_THROW(mtdma_matching(d, -1), ValidationError);
}

TEST(MedfTest, ExampleTwoMatchingSequence) {
  const Sc2Certificate cert{cyclic_set(), TVector::of({2, 4, 8, 8})};
  const std::vector<std::size_t> labels = {0, 1, 0, 2, 0, 1, 0, 3};
  for (Slot t = 0; t < 8; ++t) {
    const auto m = medf_matching(cert, t);
    ASSERT_TRUE(m.has_value());
    EXPECT_EQ(*m, cert.decomposition.matching(labels[static_cast<std::size_t>(t)]));
  }
}

TEST(MedfTest, IdleSlotInMixedExample) {
  EXPECT_FALSE(medf_matching(mixed_certificate(), 4).has_value());
  EXPECT_FALSE(medf_matching(mixed_certificate(), 5).has_value());
}

TEST(MedfTest, PeriodicWithHyperperiod) {
  const Sc2Certificate cert{cyclic_set(), TVector::of({2, 4, 8, 8})};
  for (Slot t = 0; t < 16; ++t) EXPECT_EQ(medf_matching(cert, t), medf_matching(cert, t + 8));
}

TEST(MedfTest, SelectorMatchesStatelessQuery) {
  const auto cert = mixed_certificate();
  Step1Selector sel(MedfMode{cert});
  for (Slot t = 0; t < 24; ++t) {
    const auto c = sel.select(t);
    const auto m = medf_matching(cert, t);
    EXPECT_EQ(c.matching != nullptr, m.has_value());
    if (m) {
      EXPECT_EQ(*c.matching, *m);
    }
  }
  Step1Selector late(MedfMode{cert}, 7);
  EXPECT_EQ(*late.select(7).matching, *medf_matching(cert, 7));
  EXPECT_THROW(late.select(9), std::logic_error);
}

TEST(MaskTest, AndsWithTsMatrix) {
  const auto id = PerfectMatching::identity(4);
  EXPECT_EQ(mask_by_ts_matrix(id, BinaryMatrix::ones(4)), id.as_matching());
  EXPECT_EQ(mask_by_ts_matrix(id, BinaryMatrix(4)).size(), 0u);
  BinaryMatrix live(4);
  live.set(0, 1);
  const auto m = mask_by_ts_matrix(cyclic_set().matching(1), live);
  EXPECT_EQ(m.pairs(), (std::vector<std::pair<Port, Port>>{{0, 1}}));
  EXPECT_EQ(mask_by_ts_matrix(std::nullopt, BinaryMatrix::ones(4)).size(), 0u);
}

TEST(IslipTest, SingleFreeInputPicksOnePair) {
  BinaryMatrix voq(4);
  for (Port j = 0; j < 4; ++j) voq.set(0, j);
  auto r = islip_select(voq, none(4), none(4), IslipState::initial(4), 4);
  EXPECT_EQ(r.islip.size(), 1u);
  EXPECT_TRUE(r.islip.contains(0, 0));
  EXPECT_EQ(r.pairs.size(), 4u);
  EXPECT_EQ(r.state.accept_pointer[0], 1u);
  EXPECT_EQ(r.state.grant_pointer[0], 1u);
  // Next slot the accept pointer has moved on to output 2.
  auto r2 = islip_select(voq, none(4), none(4), r.state, 4);
  EXPECT_TRUE(r2.islip.contains(0, 1));
}

TEST(IslipTest, EmptyVoqsArePaddedToFullMatching) {
  auto r = islip_select(BinaryMatrix(4), none(4), none(4), IslipState::initial(4), 4);
  EXPECT_EQ(r.islip.size(), 0u);
  EXPECT_EQ(r.pairs, PerfectMatching::identity(4).as_matching());
  EXPECT_EQ(r.state, IslipState::initial(4));
}

TEST(IslipTest, AllInputsBusyYieldsNothing) {
  auto r = islip_select(BinaryMatrix::ones(3), std::vector<bool>(3, true),
                        std::vector<bool>(3, true), IslipState::initial(3), 3);
  EXPECT_EQ(r.pairs.size(), 0u);
}

TEST(IslipTest, AvoidsBusyPortsAndCompletesMatching) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = static_cast<std::size_t>(uniform(rng, 2, 6));
    // Random partial TS matching.
    std::vector<Port> perm(n);
    std::iota(perm.begin(), perm.end(), Port{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<bool> bi(n), bo(n);
    std::size_t x = 0;
    for (Port i = 0; i < n; ++i)
      if (uniform(rng, 0, 1)) {
        bi[i] = bo[perm[i]] = true;
        ++x;
      }
    BinaryMatrix voq(n);
    for (Port i = 0; i < n; ++i)
      for (Port j = 0; j < n; ++j) voq.set(i, j, uniform(rng, 0, 2) == 0);
    IslipState st = IslipState::initial(n);
    for (Port k = 0; k < n; ++k) {
      st.grant_pointer[k] = static_cast<Port>(uniform(rng, 0, static_cast<std::int64_t>(n) - 1));
      st.accept_pointer[k] = static_cast<Port>(uniform(rng, 0, static_cast<std::int64_t>(n) - 1));
    }
    auto r = islip_select(voq, bi, bo, st, n);
    EXPECT_EQ(r.pairs.size() + x, n);
    for (auto [i, j] : r.pairs.pairs()) {
      EXPECT_FALSE(bi[i]);
      EXPECT_FALSE(bo[j]);
    }
    for (auto [i, j] : r.islip.pairs()) EXPECT_TRUE(voq.at(i, j));
    // n iterations make the iSLIP part maximal over nonempty VOQs.
    for (Port i = 0; i < n; ++i)
      for (Port j = 0; j < n; ++j)
        if (voq.at(i, j) && !bi[i] && !bo[j]) {
          EXPECT_TRUE(r.islip.input_busy(i) || r.islip.output_busy(j));
        }
    for (Port k = 0; k < n; ++k) {
      EXPECT_LT(r.state.grant_pointer[k], n);
      EXPECT_LT(r.state.accept_pointer[k], n);
    }
  }
}

TEST(IslipTest, PointersOnlyMoveOnFirstIterationAccepts) {
  // Input 0 wants outputs 0 and 1, input 1 only output 0. Both outputs grant
  // input 0, which accepts output 0; iteration 2 finds no unmatched requester.
  BinaryMatrix voq = BinaryMatrix::from_rows({{1, 1}, {1, 0}});
  auto r = islip_select(voq, none(2), none(2), IslipState::initial(2), 2);
  EXPECT_TRUE(r.islip.contains(0, 0));
  EXPECT_EQ(r.islip.size(), 1u);
  EXPECT_EQ(r.state.grant_pointer, (std::vector<Port>{1, 0}));
  EXPECT_EQ(r.state.accept_pointer, (std::vector<Port>{1, 0}));
  EXPECT_TRUE(r.pairs.contains(1, 1));  // padding
}

TEST(SchedulerModeTest, DecompositionAccessor) {
  const auto d = cyclic_set();
  EXPECT_EQ(decomposition_of(MtdmaMode{d}), d);
  EXPECT_EQ(decomposition_of(MedfMode{mixed_certificate()}), d);
}
