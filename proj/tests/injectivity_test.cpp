#include <gtest/gtest.h>

#include <cstdlib>
#include <functional>
#include <numeric>

#include "phasekit/injectivity.hpp"
#include "phasekit/selftest.hpp"
#include "test_support.hpp"

namespace phasekit {
namespace {

MeasurementEnsemble real_ensemble(std::size_t m, const std::vector<std::vector<double>>& cols) {
  return MeasurementEnsemble::from_real_columns(m, cols);
}

MeasurementEnsemble identity(std::size_t m) {
  std::vector<std::vector<double>> cols(m, std::vector<double>(m, 0.0));
  for (std::size_t k = 0; k < m; ++k) cols[k][k] = 1.0;
  return real_ensemble(m, cols);
}

/// Brute-force injectivity oracle independent of the library's subset walk: a
/// bitmask loop over all 2^N subsets with plain SVD ranks.
bool complement_property_oracle(const MeasurementEnsemble& phi) {
  const Eigen::MatrixXd a = phi.real_matrix();
  const auto n = static_cast<std::size_t>(a.cols());
  auto rank_of = [&](std::uint64_t mask) -> std::size_t {
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1U) idx.push_back(static_cast<Eigen::Index>(i));
    }
    if (idx.empty()) return 0;
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = a.col(idx[i]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    lu.setThreshold(1e-9);
    return static_cast<std::size_t>(lu.rank());
  };
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  for (std::uint64_t mask = 0; mask <= full; ++mask) {
    if (rank_of(mask) < phi.dimension() && rank_of(full & ~mask) < phi.dimension()) return false;
  }
  return true;
}

/// Orthogonal-partition oracle: the ensemble splits orthogonally iff the graph
/// joining non-orthogonal columns is disconnected.
bool splits_by_components(const MeasurementEnsemble& phi) {
  const Eigen::MatrixXd a = phi.real_matrix();
  const auto n = static_cast<std::size_t>(a.cols());
  if (n < 2) return false;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> find = [&](std::size_t i) { return parent[i] == i ? i : parent[i] = find(parent[i]); };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = a.col(static_cast<Eigen::Index>(i)).dot(a.col(static_cast<Eigen::Index>(j)));
      if (std::abs(d) > 1e-9) parent[find(i)] = find(j);
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (find(i) != find(0)) return true;
  }
  return false;
}

TEST(ComplementProperty, Examples) {
  const auto id = has_complement_property(identity(2));
  EXPECT_FALSE(id.decision);
  EXPECT_EQ(id.witness, Subset{0});

  EXPECT_TRUE(has_complement_property(spike_pair_ensemble(2)).decision);

  const auto simplex = has_complement_property(simplex_frame(3));
  EXPECT_FALSE(simplex.decision);
  ASSERT_TRUE(simplex.witness.has_value());
  // N = 4 < 2M - 1 = 5: some split has both halves of size <= 2 < 3.
  EXPECT_EQ(simplex.witness, (Subset{0, 1}));
}

TEST(ComplementProperty, RequiresRealEnsembleAndCap) {
  try {
    has_complement_property(build_4m4_ensemble(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unsupported_field);
  }
  std::vector<std::vector<double>> many(25, std::vector<double>{1.0});
  try {
    has_complement_property(real_ensemble(1, many));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::size_limit);
  }
}

TEST(ComplementProperty, AgreesWithBitmaskOracle) {
  selftest::detail::Rng rng(41);
  for (int t = 0; t < 80; ++t) {
    const std::size_t m = testing::uniform_index(rng, 1, 3);
    const std::size_t n = testing::uniform_index(rng, 1, 7);
    const auto phi = selftest::random_rational_ensemble(rng, m, n);
    EXPECT_EQ(has_complement_property(phi).decision, complement_property_oracle(phi)) << "trial " << t;
  }
}

TEST(AlmostInjective, Examples) {
  const auto id = is_almost_injective(identity(2));
  EXPECT_FALSE(id.decision);
  EXPECT_EQ(id.witness, Subset{0});

  EXPECT_TRUE(is_almost_injective(simplex_frame(3)).decision);

  const auto doubled = is_almost_injective(real_ensemble(2, {{1, 0}, {1, 0}, {0, 1}, {0, 1}}));
  EXPECT_FALSE(doubled.decision);
  EXPECT_EQ(doubled.witness, (Subset{0, 1}));
}

TEST(AlmostInjective, IgnoresZeroColumnsAndReportsNonSpanning) {
  const auto with_zero = real_ensemble(2, {{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  EXPECT_TRUE(is_almost_injective(with_zero).decision);
  EXPECT_TRUE(has_complement_property(with_zero).decision);

  const auto flat = is_almost_injective(real_ensemble(2, {{1, 0}, {2, 0}, {3, 0}}));
  EXPECT_FALSE(flat.decision);
  EXPECT_EQ(flat.witness, Subset{});
}

TEST(AlmostInjective, TetrahedronCollisionsLieInCoordinatePlanes) {
  const double s = 1.0 / std::sqrt(3.0);
  const auto tetra = real_ensemble(3, {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}});
  EXPECT_TRUE(is_almost_injective(tetra).decision);
  const auto in_plane = DenseSignal::from_real({0.7, -1.3, 0.0});
  EXPECT_FALSE(census_is_trivial(preimage_census(tetra, in_plane), in_plane));
  const auto generic = DenseSignal::from_real({0.7, -1.3, 0.4});
  EXPECT_TRUE(census_is_trivial(preimage_census(tetra, generic), generic));
}

TEST(AlmostInjective, InjectiveImpliesAlmostInjective) {
  selftest::detail::Rng rng(42);
  for (int t = 0; t < 100; ++t) {
    const auto phi = selftest::random_rational_ensemble(rng, testing::uniform_index(rng, 1, 4), testing::uniform_index(rng, 1, 8));
    if (has_complement_property(phi).decision) EXPECT_TRUE(is_almost_injective(phi).decision) << "trial " << t;
  }
}

TEST(FullSpark, Examples) {
  for (std::size_t m = 1; m <= 6; ++m) {
    auto cols = identity(m).real_matrix();
    std::vector<std::vector<double>> with_ones;
    for (Eigen::Index c = 0; c < cols.cols(); ++c) with_ones.emplace_back(cols.col(c).data(), cols.col(c).data() + m);
    with_ones.emplace_back(m, 1.0);
    EXPECT_TRUE(is_full_spark(real_ensemble(m, with_ones))) << "M=" << m;
  }
  EXPECT_FALSE(is_full_spark(real_ensemble(2, {{1, 0}, {0, 1}, {1, 0}})));
  EXPECT_THROW(is_full_spark(real_ensemble(3, {{1, 0, 0}})), Error);
  EXPECT_TRUE(is_full_spark(build_4m4_ensemble(2)));
}

TEST(FullSpark, MatchesAlmostInjectivityWhenOneExtraVector) {
  // In one dimension a single nonzero vector already determines x up to sign.
  selftest::detail::Rng rng(43);
  std::size_t full = 0;
  for (int t = 0; t < 150; ++t) {
    const std::size_t m = testing::uniform_index(rng, 2, 6);
    const auto phi = selftest::random_rational_ensemble(rng, m, m + 1);
    const bool spark = is_full_spark(phi);
    full += spark ? 1 : 0;
    EXPECT_EQ(is_almost_injective(phi).decision, spark) << "trial " << t;
  }
  EXPECT_GT(full, 0u);
}

TEST(Untf, Examples) {
  EXPECT_TRUE(is_untf(simplex_frame(3)));
  EXPECT_TRUE(is_untf(identity(4)));
  EXPECT_FALSE(is_untf(real_ensemble(2, {{1, 0}, {0, 1}, {1, 1}})));
}

TEST(OrthogonalPartition, Examples) {
  EXPECT_EQ(find_orthogonal_partition(identity(2)), Subset{0});
  EXPECT_EQ(find_orthogonal_partition(simplex_frame(3)), std::nullopt);
  selftest::detail::Rng rng(44);
  const auto split = selftest::split_planar_untf(selftest::random_rotation(rng, 4));
  EXPECT_EQ(find_orthogonal_partition(split), (Subset{0, 1, 2}));
}

TEST(OrthogonalPartition, AgreesWithComponentOracle) {
  selftest::detail::Rng rng(45);
  for (int t = 0; t < 120; ++t) {
    const auto phi = selftest::random_rational_ensemble(rng, testing::uniform_index(rng, 1, 4), testing::uniform_index(rng, 1, 7));
    EXPECT_EQ(find_orthogonal_partition(phi).has_value(), splits_by_components(phi)) << "trial " << t;
  }
}

TEST(OrthogonalPartition, CharacterizesUntfAlmostInjectivity) {
  selftest::detail::Rng rng(46);
  std::vector<MeasurementEnsemble> frames;
  for (std::size_t m = 2; m <= 8; ++m) frames.push_back(simplex_frame(m));
  frames.push_back(selftest::split_planar_untf(selftest::random_rotation(rng, 4)));
  frames.push_back(identity(3));
  frames.push_back(real_ensemble(2, {{1, 0}, {1, 0}, {0, 1}, {0, 1}}));
  for (const auto& phi : frames) {
    ASSERT_TRUE(is_untf(phi));
    EXPECT_EQ(is_almost_injective(phi).decision, !find_orthogonal_partition(phi).has_value());
  }
}

TEST(CoprimeGuarantee, Examples) {
  EXPECT_TRUE(coprime_untf_guarantee(3, 4));
  EXPECT_FALSE(coprime_untf_guarantee(2, 4));
  for (std::size_t m = 1; m <= 50; ++m) EXPECT_TRUE(coprime_untf_guarantee(m, m + 1));
}

TEST(CoprimeGuarantee, SimplexFramesAreAlmostInjective) {
  for (std::size_t m = 2; m <= 8; ++m) {
    const auto phi = simplex_frame(m);
    ASSERT_TRUE(coprime_untf_guarantee(m, phi.size()) && is_untf(phi));
    EXPECT_TRUE(is_almost_injective(phi).decision) << "M=" << m;
  }
}

TEST(PreimageCensus, Examples) {
  selftest::detail::Rng rng(47);
  const auto simplex = simplex_frame(3);
  for (int t = 0; t < 20; ++t) {
    const auto x = selftest::random_real_signal(rng, 3);
    EXPECT_TRUE(census_is_trivial(preimage_census(simplex, x), x));
  }

  const auto doubled = real_ensemble(2, {{1, 0}, {0, 1}, {1, 0}, {0, 1}});
  const auto census = preimage_census(doubled, DenseSignal::from_real({1, 1}));
  ASSERT_EQ(census.size(), 2u);
  EXPECT_NEAR(std::abs(census[1][0].real()), 1.0, 1e-12);
  EXPECT_NEAR(census[1][0].real() * census[1][1].real(), -1.0, 1e-12);

  const auto zero = preimage_census(simplex, DenseSignal::zeros(3));
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_EQ(zero[0].norm(), 0.0);
}

TEST(PreimageCensus, ConfusablePairsCollide) {
  const auto doubled = real_ensemble(2, {{1, 0}, {1, 0}, {0, 1}, {0, 1}});
  const auto pair = confusable_pair(doubled, {0, 1});
  ASSERT_TRUE(pair.has_value());
  const auto a = measure(doubled, pair->first);
  const auto b = measure(doubled, pair->second);
  for (std::size_t n = 0; n < a.size(); ++n) EXPECT_NEAR(a[n], b[n], 1e-12);
  EXPECT_GT(std::min(phase_aligned_distance(pair->first, pair->second), pair->first.norm()), 0.1);
  EXPECT_FALSE(confusable_pair(simplex_frame(3), {0}).has_value());
}

TEST(PreimageCensus, CapAndEnvironmentOverride) {
  std::vector<std::vector<double>> cols(21, std::vector<double>{1.0});
  const auto phi = real_ensemble(1, cols);
  EXPECT_THROW(preimage_census(phi, DenseSignal::from_real({1.0})), Error);
  ::setenv("PHASEKIT_MAX_SUBSET_BITS", "22", 1);
  EXPECT_EQ(preimage_census(phi, DenseSignal::from_real({1.0})).size(), 1u);
  ::setenv("PHASEKIT_MAX_SUBSET_BITS", "3", 1);
  EXPECT_THROW(has_complement_property(simplex_frame(3)), Error);
  ::unsetenv("PHASEKIT_MAX_SUBSET_BITS");
}

}  // namespace
}  // namespace phasekit
