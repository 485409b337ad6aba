#include "wallbreak/driver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace wallbreak;

namespace {

LaunchSpec launch(BigRational x, BigRational y, const std::string &slope, int sx = 1, int sy = 1) {
  return LaunchSpec{x, y, sx, sy, SlopeSpec::parse(slope)};
}

// Merge the times at which the up-right line meets x = 1, 2, ... and
// y = 1, 2, ...; equal times mean a corner.
struct Merged {
  std::vector<Symbol> word;
  bool corner = false;
};

Merged merged_crossings(const BigRational &x, const BigRational &y, const BigRational &s, std::size_t n) {
  Merged m;
  BigInt i = 1, j = 1;
  while (m.word.size() < n) {
    BigRational tx = BigRational(i) - x;
    BigRational ty = (BigRational(j) - y) / s;
    if (tx == ty) {
      m.corner = true;
      break;
    }
    if (tx < ty) {
      m.word.push_back(Symbol::V);
      ++i;
    } else {
      m.word.push_back(Symbol::H);
      ++j;
    }
  }
  return m;
}

std::size_t count(const std::vector<Symbol> &w, Symbol s) { return std::count(w.begin(), w.end(), s); }

} // namespace

TEST(Driver, WordParsing) {
  EXPECT_EQ(to_string(parse_word("HH V h")), "HHVH");
  EXPECT_THROW(parse_word("HXV"), ParseError);
}

TEST(Driver, RationalWordMatchesMergedCrossings) {
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    BigRational s(static_cast<long>(rng() % 40 + 1), static_cast<long>(rng() % 15 + 1));
    BigRational x(static_cast<long>(rng() % 97), 97), y(static_cast<long>(rng() % 89), 89);
    int sx = rng() % 2 ? 1 : -1, sy = rng() % 2 ? 1 : -1;
    if (x == 0) sx = 1;
    if (y == 0) sy = 1;
    LaunchSpec l{x, y, sx, sy, SlopeSpec(QuadraticValue(s))};
    auto n = static_cast<std::size_t>(numerator(s) + denominator(s));
    Merged want = merged_crossings(l.x_forward(), l.y_forward(), s, 3 * n);
    CuttingTrace got = trace_cutting_word(l);
    if (want.corner) {
      ASSERT_TRUE(got.corner);
      EXPECT_EQ(got.word.symbols(), want.word);
      EXPECT_EQ(*got.corner, want.word.size() + 1);
      continue;
    }
    ASSERT_FALSE(got.corner);
    EXPECT_EQ(got.word.kind(), EncounterWord::Kind::Periodic);
    EXPECT_EQ(got.word.prefix(3 * n), want.word);
    // one period holds p horizontals and q verticals
    EXPECT_EQ(count(got.word.symbols(), Symbol::H), numerator(s));
    EXPECT_EQ(count(got.word.symbols(), Symbol::V), denominator(s));
    ++checked;
  }
  EXPECT_GT(checked, 200);
}

TEST(Driver, QuadraticWordMatchesFloatingMerge) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 40; ++i) {
    long a = rng() % 5, b = rng() % 3 + 1, d = std::vector<long>{2, 3, 5, 7}[rng() % 4], c = rng() % 3 + 1;
    QuadraticValue s(a, b, d, c);
    long double sv = (a + b * std::sqrt(static_cast<long double>(d))) / c;
    BigRational x(static_cast<long>(rng() % 50 + 1), 53), y(static_cast<long>(rng() % 50 + 1), 59);
    LaunchSpec l{x, y, 1, 1, SlopeSpec(s)};
    auto word = cutting_word(l).prefix(300);
    long double xf = static_cast<long double>(x), yf = static_cast<long double>(y);
    std::vector<Symbol> want;
    long i1 = 1, j1 = 1;
    bool close = false;
    while (want.size() < 300) {
      long double tx = i1 - xf, ty = (j1 - yf) / sv;
      if (std::abs(tx - ty) < 1e-12L) close = true;
      if (tx < ty) {
        want.push_back(Symbol::V);
        ++i1;
      } else {
        want.push_back(Symbol::H);
        ++j1;
      }
    }
    if (!close) {
      EXPECT_EQ(word, want) << s.str();
    }
  }
}

TEST(Driver, BeattyAgreesWithPeriodicOnRationalSlopes) {
  for (auto [p, q] : std::vector<std::pair<int, int>>{{3, 1}, {5, 3}, {146, 1}, {7, 12}}) {
    BigRational s(p, q);
    LaunchSpec l{BigRational(1, 7), BigRational(2, 11), 1, 1, SlopeSpec(QuadraticValue(s))};
    auto periodic = cutting_word(l);
    auto beatty = EncounterWord::beatty(QuadraticValue(s), QuadraticValue(l.y - s * l.x));
    std::size_t n = 4 * (p + q);
    EXPECT_EQ(beatty.prefix(n), periodic.prefix(n)) << p << "/" << q;
  }
}

TEST(Driver, StageCountsHorizontalsSinceLastVertical) {
  EXPECT_EQ(stage_of(launch(BigRational(1, 2), BigRational(1, 3), "3")), 2);
  EXPECT_EQ(stage_of(launch(0, BigRational(1, 2), "3")), 0);
  EXPECT_EQ(stage_of(launch(BigRational(1, 9), BigRational(2, 3), "3")), 0);
  // slope 3 through (1/2, 1/2) runs back to the lattice point (0, -1)
  EXPECT_THROW(stage_of(launch(BigRational(1, 2), BigRational(1, 2), "3")), CornerHit);
  EXPECT_THROW(stage_of(launch(0, 0, "3")), CornerHit);
  // direction signs reflect the start
  EXPECT_EQ(stage_of(launch(BigRational(1, 2), BigRational(2, 3), "3", 1, -1)), 2);
}

TEST(Driver, StageMatchesBackwardScan) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 300; ++i) {
    BigRational s(static_cast<long>(rng() % 30 + 1), static_cast<long>(rng() % 7 + 1));
    BigRational x(static_cast<long>(rng() % 60 + 1), 61), y(static_cast<long>(rng() % 60), 67);
    // walk backwards: horizontal lines crossed before reaching x = 0
    BigRational back = y - s * x;
    if (denominator(back) == 1) continue;
    std::int64_t want = 0;
    for (BigInt j = 0; BigRational(j) > back; --j) ++want;
    EXPECT_EQ(stage_of(LaunchSpec{x, y, 1, 1, SlopeSpec(QuadraticValue(s))}), want);
  }
}

TEST(Driver, RegionsPartitionTheSquare) {
  for (auto s : {BigRational(3), BigRational(5, 3), BigRational(146), BigRational(2, 7)}) {
    auto reps = representative_points(s);
    ASSERT_EQ(reps.size(), region_count(s));
    auto canon = canonical_period(s);
    for (std::size_t r = 0; r < reps.size(); ++r) {
      EXPECT_NO_THROW(stage_of(reps[r]));
      EXPECT_EQ(region_of(reps[r]), r);
      auto w = cutting_word(reps[r]).symbols();
      std::vector<Symbol> rotated(canon.begin() + r, canon.end());
      rotated.insert(rotated.end(), canon.begin(), canon.begin() + r);
      EXPECT_EQ(w, rotated);
    }
  }
  EXPECT_EQ(region_count(BigRational(3)), 4u);
  EXPECT_THROW(representative_point(BigRational(3), 4), std::out_of_range);
}

TEST(Driver, CanonicalPeriodStartsAfterAVertical) {
  EXPECT_EQ(to_string(canonical_period(BigRational(3))), "HHHV");
  EXPECT_EQ(to_string(canonical_period(BigRational(5, 3))), "HVHHVHHV");
}

TEST(Driver, CornerHitsCarryThePrefix) {
  try {
    cutting_word(launch(BigRational(1, 2), BigRational(1, 2), "1"));
    FAIL();
  } catch (const CornerHit &e) {
    EXPECT_EQ(e.index(), 1u);
    EXPECT_TRUE(e.prefix().empty());
  }
  try {
    cutting_word(launch(BigRational(1, 2), BigRational(1, 2), "3"));
    FAIL();
  } catch (const CornerHit &e) {
    EXPECT_EQ(e.index(), 2u);
    EXPECT_EQ(to_string(e.prefix()), "H");
  }
  EXPECT_THROW(cutting_word(launch(0, 0, "quad:0,1,2,1")), CornerHit);
}

TEST(Driver, LaunchValidation) {
  EXPECT_THROW(launch(1, 0, "2").validate(), std::invalid_argument);
  EXPECT_THROW(launch(0, BigRational(1, 2), "2", -1, 1).validate(), std::invalid_argument);
  EXPECT_THROW(SlopeSpec::parse("0"), std::invalid_argument);
  EXPECT_THROW(SlopeSpec::parse("-3"), std::invalid_argument);
}
