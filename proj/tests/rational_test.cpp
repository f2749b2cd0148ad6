#include <gtest/gtest.h>

#include "phasekit/rational.hpp"

namespace phasekit {
namespace {

TEST(Rational, TextForm) {
  EXPECT_EQ(to_string(Rational(5)), "5/1");
  EXPECT_EQ(to_string(Rational(6) / Rational(-4)), "-3/2");
  EXPECT_EQ(parse_rational("10/4"), Rational(5, 2));
  EXPECT_EQ(parse_rational("-7"), Rational(-7));
  EXPECT_EQ(parse_rational("3/-6"), Rational(-1, 2));
  EXPECT_THROW(parse_rational("1/0"), Error);
  EXPECT_THROW(parse_rational("x/2"), Error);
}

TEST(Rational, LowestTermsPositiveDenominator) {
  const Rational r = Rational(BigInt(-12)) / Rational(BigInt(-18));
  EXPECT_EQ(boost::multiprecision::numerator(r), 2);
  EXPECT_EQ(boost::multiprecision::denominator(r), 3);
}

TEST(Rational, RecognizesSmallDenominators) {
  EXPECT_EQ(recognize_rational(0.5), Rational(1, 2));
  EXPECT_EQ(recognize_rational(-2.0 / 3.0), Rational(-2, 3));
  EXPECT_EQ(recognize_rational(7.0), Rational(7));
  EXPECT_EQ(recognize_rational(std::sqrt(2.0)), std::nullopt);
  EXPECT_EQ(recognize_rational(1.0 / 3.0 + 1e-12), std::nullopt);
}

TEST(ExactRank, SmallMatrices) {
  EXPECT_EQ(exact_rank({{1, 2}, {2, 4}}), 1u);
  EXPECT_EQ(exact_rank({{1, 2}, {3, 4}}), 2u);
  EXPECT_EQ(exact_rank({{0, 0, 0}}), 0u);
  EXPECT_EQ(exact_rank({{Rational(1, 3), Rational(1, 2)}, {Rational(2, 3), Rational(1)}}), 1u);
  // Rows of a 3x3 Vandermonde on distinct nodes are independent.
  EXPECT_EQ(exact_rank({{1, 1, 1}, {1, 2, 4}, {1, 3, 9}}), 3u);
}

TEST(ExactSolve, SolvesAndDetectsSingular) {
  const auto x = exact_solve({{2, 1}, {1, 3}}, {Rational(3), Rational(5)});
  ASSERT_TRUE(x.has_value());
  EXPECT_EQ((*x)[0], Rational(4, 5));
  EXPECT_EQ((*x)[1], Rational(7, 5));
  EXPECT_FALSE(exact_solve({{1, 2}, {2, 4}}, {Rational(1), Rational(2)}).has_value());
}

TEST(ExactInverse, InvertsAndDetectsSingular) {
  const RationalMatrix a{{0, 1, 0}, {2, 0, 0}, {1, 1, 1}};
  const auto inv = exact_inverse(a);
  ASSERT_TRUE(inv.has_value());
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      Rational s = 0;
      for (std::size_t k = 0; k < 3; ++k) s += a[i][k] * (*inv)[k][j];
      EXPECT_EQ(s, Rational(i == j ? 1 : 0));
    }
  }
  EXPECT_FALSE(exact_inverse({{1, 1}, {1, 1}}).has_value());
}

}  // namespace
}  // namespace phasekit
