#include <gtest/gtest.h>

#include <numbers>

#include "phasekit/ensemble.hpp"
#include "phasekit/injectivity.hpp"
#include "test_support.hpp"

namespace phasekit {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(CosineVector, Entries) {
  const auto c0 = cosine_vector(4, 0);
  for (std::size_t p = 0; p < 4; ++p) EXPECT_NEAR(c0[p].real(), 2.0, 1e-15);
  const auto c1 = cosine_vector(3, 1);
  EXPECT_NEAR(c1[0].real(), 2.0, 1e-15);
  EXPECT_NEAR(c1[1].real(), 2.0 * std::cos(2.0 * kPi / 9.0), 1e-15);
  EXPECT_NEAR(c1[2].real(), 2.0 * std::cos(4.0 * kPi / 9.0), 1e-15);
  for (std::ptrdiff_t q = -5; q < 20; ++q) EXPECT_NEAR(cosine_vector(5, q)[0].real(), 2.0, 1e-15);
  EXPECT_THROW(cosine_vector(1, 0), Error);
}

TEST(Modulation, DiagonalAndRatios) {
  EXPECT_NEAR(std::abs(modulation(5)[0] - Complex(1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(modulation(2)[1] - std::polar(1.0, 2.0 * kPi / 3.0)), 0.0, 1e-15);
  for (std::size_t m = 2; m <= 64; ++m) {
    const auto e = modulation(m);
    for (std::size_t j = 0; j < m; ++j) {
      EXPECT_NEAR(std::abs(e[j]), 1.0, 1e-12);
      for (std::size_t k = 0; k < m; ++k) {
        if (j != k) EXPECT_GT(std::abs(e.ratio(j, k).imag()), 0.0);
      }
    }
    EXPECT_NEAR(e.min_ratio_imag(), modulation_margin(m), 1e-12);
  }
  EXPECT_THROW(modulation(1), Error);
}

TEST(Modulation, RejectsBadDiagonals) {
  EXPECT_THROW(ModulationOperator({Complex(1.0), Complex(2.0)}), Error);
  EXPECT_THROW(ModulationOperator({Complex(1.0), Complex(-1.0)}), Error);
}

TEST(Build4m4, ShapeAndColumns) {
  EXPECT_EQ(build_4m4_ensemble(2).size(), 4u);
  const auto phi = build_4m4_ensemble(3);
  EXPECT_EQ(phi.size(), 8u);
  EXPECT_EQ(phi.dimension(), 3u);
  EXPECT_EQ(phi.field(), Field::complex);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(std::abs(phi.column(0)[k] - Complex(2.0)), 0.0, 1e-15);
  const auto e = modulation(3);
  for (std::size_t q = 1; q <= 3; ++q) {
    const auto c = cosine_vector(3, static_cast<std::ptrdiff_t>(q));
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_NEAR(std::abs(phi.column(4 + q)[k] - std::conj(e[k]) * c[k]), 0.0, 1e-15);
    }
  }
  EXPECT_THROW(build_4m4_ensemble(1), Error);
}

TEST(Build4m4, SpikeAtZeroMeasuresFour) {
  for (std::size_t m = 2; m <= 10; ++m) {
    std::vector<Complex> x(m);
    x[0] = 1.0;
    const auto y = measure(build_4m4_ensemble(m), DenseSignal(x));
    for (double v : y.values()) EXPECT_NEAR(v, 4.0, 1e-12);
  }
}

TEST(Build4m4, CosineIntensitiesAreEven) {
  testing::Rng rng(21);
  for (std::size_t m = 2; m <= 8; ++m) {
    const DenseSignal x(testing::random_complex_vector(rng, m));
    const std::size_t period = symmetrized_period(m);
    auto intensity = [&](std::ptrdiff_t q) {
      const auto c = cosine_vector(m, q);
      Complex acc{};
      for (std::size_t k = 0; k < m; ++k) acc += x[k] * std::conj(c[k]);
      return std::norm(acc);
    };
    for (std::ptrdiff_t q = 0; q < static_cast<std::ptrdiff_t>(period); ++q) {
      EXPECT_NEAR(intensity(q), intensity(-q), 1e-10 * intensity(0) + 1e-12);
    }
  }
}

TEST(SimplexFrame, UnitNormTightFrame) {
  for (std::size_t m = 2; m <= 10; ++m) {
    const auto phi = simplex_frame(m);
    ASSERT_EQ(phi.size(), m + 1);
    const Eigen::MatrixXd a = phi.real_matrix();
    for (Eigen::Index c = 0; c < a.cols(); ++c) EXPECT_NEAR(a.col(c).norm(), 1.0, 1e-12);
    const Eigen::MatrixXd frame = a * a.transpose();
    const double bound = static_cast<double>(m + 1) / static_cast<double>(m);
    EXPECT_LT((frame - bound * Eigen::MatrixXd::Identity(a.rows(), a.rows())).norm(), 1e-10);
  }
  EXPECT_THROW(simplex_frame(1), Error);
}

TEST(SimplexFrame, ThreeDimensionalCaseMatchesTetrahedron) {
  // (1,1,1) and the sign flips (1,-1,-1), (-1,1,-1), (-1,-1,1), normalized.
  const double s = 1.0 / std::sqrt(3.0);
  const auto tetra = MeasurementEnsemble::from_real_columns(
      3, {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}});
  const Eigen::MatrixXd a = simplex_frame(3).real_matrix();
  const Eigen::MatrixXd b = tetra.real_matrix();
  // Equal Gram matrices means the frames agree up to an orthogonal map.
  EXPECT_LT((a.transpose() * a - b.transpose() * b).norm(), 1e-12);
}

TEST(SpikePair, Construction) {
  const auto phi = spike_pair_ensemble(2);
  ASSERT_EQ(phi.size(), 3u);
  const std::vector<std::vector<double>> expected{{1, 0}, {0, 1}, {1, 1}};
  for (std::size_t n = 0; n < 3; ++n) {
    for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(phi.column(n)[k].real(), expected[n][k]);
  }
  for (std::size_t m = 2; m <= 12; ++m) EXPECT_EQ(spike_pair_ensemble(m).size(), 2 * m - 1);
}

TEST(SpikePair, AlmostInjectivityIsCheckedNotAssumed) {
  for (std::size_t m = 2; m <= 8; ++m) {
    const auto phi = spike_pair_ensemble(m);
    EXPECT_TRUE(is_almost_injective(phi).decision) << "M=" << m;
    EXPECT_EQ(has_complement_property(phi).decision, m == 2) << "M=" << m;
    EXPECT_EQ(is_full_spark(phi), m == 2) << "M=" << m;
  }
}

TEST(Measure, ZeroSignalAndDimensionCheck) {
  const auto phi = build_4m4_ensemble(4);
  const auto y = measure(phi, DenseSignal::zeros(4));
  for (double v : y.values()) EXPECT_EQ(v, 0.0);
  try {
    measure(phi, DenseSignal::zeros(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_input);
  }
}

TEST(Measure, GlobalPhaseInvariance) {
  testing::Rng rng(22);
  for (std::size_t m = 2; m <= 9; ++m) {
    const auto phi = build_4m4_ensemble(m);
    const auto raw = testing::random_complex_vector(rng, m);
    const Complex phase = std::polar(1.0, 0.77 * static_cast<double>(m));
    std::vector<Complex> rotated(raw), negated(raw);
    for (std::size_t k = 0; k < m; ++k) {
      rotated[k] *= phase;
      negated[k] = -negated[k];
    }
    const auto a = measure(phi, DenseSignal(raw));
    const auto b = measure(phi, DenseSignal(rotated));
    const auto c = measure(phi, DenseSignal(negated));
    for (std::size_t n = 0; n < a.size(); ++n) {
      EXPECT_NEAR(a[n], b[n], 1e-10 * a.max());
      EXPECT_NEAR(a[n], c[n], 1e-10 * a.max());
    }
  }
}

TEST(MeasurementEnsemble, Validation) {
  EXPECT_THROW(MeasurementEnsemble::from_real_columns(2, {{1, 0, 0}}), Error);
  EXPECT_THROW(MeasurementEnsemble(2, {{Complex(1, 1), Complex(0)}}, Field::real), Error);
  EXPECT_THROW(build_4m4_ensemble(3).real_matrix(), Error);
}

TEST(IntensityVector, ClampsTinyNegatives) {
  const IntensityVector v({1.0, -1e-13});
  EXPECT_EQ(v[1], 0.0);
  EXPECT_THROW(IntensityVector({-1e-6}), Error);
}

}  // namespace
}  // namespace phasekit
