#include "wallbreak/analysis.hpp"

#include <gtest/gtest.h>

using namespace wallbreak;

TEST(Analysis, ReorgSlopeValues) {
  EXPECT_EQ(predicted_reorg_slope(3), BigRational(1));
  EXPECT_EQ(predicted_reorg_slope(reorg_slope_upper_bound()), BigRational(4, 3));
  // 1 + (3/100) / (25 - 602/25) = 1 + (3/100) / (23/25) = 1 + 3/92
  EXPECT_EQ(predicted_reorg_slope(BigRational(301, 100)), BigRational(95, 92));
  // 3s - 9 = 3/20 and 25 - 8s = 3/5
  EXPECT_EQ(predicted_reorg_slope(BigRational(61, 20)), BigRational(5, 4));
}

TEST(Analysis, ReorgSlopeIncreasing) {
  BigRational prev = predicted_reorg_slope(3);
  for (int i = 1; i <= 200; ++i) {
    BigRational s = BigRational(3) + BigRational(i, 200 * 17);
    BigRational v = predicted_reorg_slope(s);
    EXPECT_GT(v, prev) << i;
    prev = v;
  }
}

TEST(Analysis, ReorgSlopeDomain) {
  EXPECT_THROW(predicted_reorg_slope(BigRational(299, 100)), std::domain_error);
  EXPECT_THROW(predicted_reorg_slope(BigRational(3) + BigRational(1, 16)), std::domain_error);
}

TEST(Analysis, SlopeSequence) {
  auto seq = s_sequence(6);
  ASSERT_EQ(seq.size(), 6u);
  EXPECT_EQ(seq[0].s, 3);
  EXPECT_EQ(seq[1].s, 33);
  EXPECT_EQ(seq[2].s, 6273);
  EXPECT_EQ(seq[1].x, 4);
  EXPECT_EQ(seq[1].y, 7);
  for (const auto &t : seq) {
    EXPECT_EQ(t.s % 10, 3);
    EXPECT_EQ(t.s, 2 * t.x * t.x + 1);
    EXPECT_EQ(3 * t.s, 2 * t.y * t.y + 1);
  }
  // s_6 needs well over 64 bits
  EXPECT_GT(seq[5].s, BigInt(std::numeric_limits<std::uint64_t>::max()));
  EXPECT_THROW(s_sequence(0), std::invalid_argument);
}

TEST(Analysis, ColumnProfileQuadratic) {
  auto prof = column_profile(-3, 3, 30);
  const auto &d0 = prof.down.at(0).times;
  ASSERT_GE(d0.size(), 4u);
  EXPECT_EQ(d0[0], 1u);
  EXPECT_EQ(d0[1], 5u);
  EXPECT_EQ(d0[2], 13u);
  EXPECT_EQ(d0[3], 25u);
  EXPECT_EQ(prof.up.at(0).times[0], 2u);
  EXPECT_EQ(prof.up.at(1).times[0], 3u);
  for (auto *side : {&prof.down, &prof.up})
    for (const auto &[n, sched] : *side) {
      EXPECT_EQ(sched.times.size(), 30u);
      EXPECT_TRUE(sched.fits()) << n;
      for (auto d : sched.second_differences()) EXPECT_EQ(d, 4) << n;
    }
}

TEST(Analysis, ColumnSlotFormulas) {
  auto prof = column_profile(0, 1, 15);
  for (std::uint64_t x = 1; x <= 15; ++x) {
    EXPECT_EQ(prof.down.at(0).times[x - 1], 2 * x * x - 2 * x + 1);
    EXPECT_EQ(prof.up.at(0).times[x - 1], 2 * x * x);
    EXPECT_EQ(prof.up.at(1).times[x - 1], 2 * x * x + 1);
  }
}

TEST(Analysis, WedgeDecomposition) {
  auto d = decompose_wedge_size(22); // 24 = 3 * 1 * 8
  ASSERT_TRUE(d);
  EXPECT_EQ(d->k, 0);
  EXPECT_EQ(d->p, 3);
  d = decompose_wedge_size(7); // 9 = 3 * 3 * 1
  EXPECT_EQ(d->k, 1);
  EXPECT_EQ(d->p, 0);
  EXPECT_FALSE(decompose_wedge_size(5));
  // every n = 1 mod 3 reassembles
  for (std::int64_t n = 1; n < 3000; n += 3) {
    auto w = decompose_wedge_size(n);
    ASSERT_TRUE(w);
    EXPECT_EQ(3 * (2 * w->k + 1) * (std::int64_t{1} << w->p) - 2, n);
  }
}

TEST(Analysis, WedgePeriods) {
  EXPECT_EQ(predict_wedge_period(12, true).period, 14u);
  EXPECT_EQ(predict_wedge_period(9, false).period, 14u);
  EXPECT_EQ(predict_wedge_period(10, true).period, 10u);
  EXPECT_EQ(predict_wedge_period(4, true).period, 8u);
  EXPECT_EQ(predict_wedge_period(7, true).period, 6u);
  EXPECT_EQ(predict_wedge_period(13, true).period, 6u);
  EXPECT_EQ(predict_wedge_period(22, true).period, 12u);
  EXPECT_FALSE(predict_wedge_period(22, false).period);
  EXPECT_EQ(predict_wedge_period(7, false).period, 6u);
  auto open = predict_wedge_period(5, true);
  EXPECT_FALSE(open.period);
  EXPECT_TRUE(open.conjectural);
  EXPECT_THROW(predict_wedge_period(0, true), std::invalid_argument);
}
