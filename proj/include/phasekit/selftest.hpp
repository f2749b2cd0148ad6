#pragma once

// Acceptance suite shared by the acceptance test binary and `phasekit selftest`.
// Each check is deterministic given the seed.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phasekit/cyclic.hpp"
#include "phasekit/ensemble.hpp"
#include "phasekit/error.hpp"
#include "phasekit/hardness.hpp"
#include "phasekit/injectivity.hpp"
#include "phasekit/rational.hpp"
#include "phasekit/recovery.hpp"

namespace phasekit::selftest {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  nlohmann::json data = nlohmann::json::object();
};

namespace detail {

using Rng = std::mt19937_64;

inline std::uint64_t mix(std::uint64_t seed, int id) {
  return seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(id) * 0xBF58476D1CE4E5B9ULL + 1;
}

inline Complex random_complex(Rng& rng) {
  std::normal_distribution<double> g;
  const double re = g(rng);
  return {re, g(rng)};
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace detail

/// 4M-4 retrieval recovers random complex signals up to a global phase.
inline CriterionResult check_4m4_injectivity(std::uint64_t seed) {
  CriterionResult r{1, "4M-4 ensemble recovery, M = 2..16", true, {}, {}};
  detail::Rng rng(detail::mix(seed, 1));
  constexpr double kTol = 1e-8;
  double worst = 0.0;
  std::size_t failures = 0;
  std::string failing_dims;
  nlohmann::json sweep = nlohmann::json::array();
  for (std::size_t m = 2; m <= 16; ++m) {
    double worst_m = 0.0;
    std::size_t failures_m = 0;
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<Complex> x(m, Complex{});
      switch (trial % 3) {
        case 0:
          for (auto& v : x) v = detail::random_complex(rng);
          break;
        case 1: {
          const std::size_t last = pick(rng);
          for (std::size_t k = 0; k <= last; ++k) x[k] = detail::random_complex(rng);
          break;
        }
        default:
          x[pick(rng)] = detail::random_complex(rng);
      }
      const DenseSignal truth(std::move(x));
      double err = 0.0;
      try {
        const auto result = retrieve_4m4(measure(build_4m4_ensemble(m), truth), m);
        err = phase_aligned_distance(result.estimate, truth) / truth.norm();
      } catch (const Error&) {
        err = std::numeric_limits<double>::infinity();
      }
      worst_m = std::max(worst_m, err);
      if (!(err <= kTol)) ++failures_m;
    }
    worst = std::max(worst, worst_m);
    failures += failures_m;
    if (failures_m > 0) failing_dims += (failing_dims.empty() ? "" : ",") + std::to_string(m) + ":" + std::to_string(failures_m);
    sweep.push_back({{"M", m}, {"worst_relative_error", worst_m}, {"failures", failures_m}});
  }
  r.pass = failures == 0;
  r.detail = "1500 signals, " + std::to_string(failures) + " above 1e-8 (worst " + detail::fmt(worst) + ")";
  if (failures > 0) r.detail += "; failures per M " + failing_dims;
  r.data["m_sweep"] = std::move(sweep);
  return r;
}

/// The printed symbolic pattern for CirAut(2a, b, c, 0, 0, 0, 0, c, b).
inline std::array<double, 9> printed_pattern(Complex a, Complex b, Complex c) {
  const double e1 = 2.0 * (2.0 * a * std::conj(b) + b * std::conj(c)).real();
  const double e2 = std::norm(b) + 4.0 * (a * std::conj(c)).real();
  const double e3 = 2.0 * (b * std::conj(c)).real();
  const double e4 = std::norm(c);
  return {4.0 * std::norm(a) + std::norm(b) + std::norm(c), e1, e2, e3, e4, e4, e3, e2, e1};
}

/// Symbolic CirAut pattern of the three-entry worked example, checked numerically.
inline CriterionResult check_worked_example(std::uint64_t seed) {
  CriterionResult r{2, "worked-example CirAut pattern, 50 triples", true, {}, {}};
  detail::Rng rng(detail::mix(seed, 2));
  constexpr double kTol = 1e-10;
  double worst_literal0 = 0.0, worst_rest = 0.0, worst_corrected0 = 0.0;
  std::size_t literal_failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Complex a = detail::random_complex(rng);
    const Complex b = detail::random_complex(rng);
    const Complex c = trial == 0 ? Complex{} : detail::random_complex(rng);
    const CyclicSignal auto_u = circular_autocorrelation(symmetrize(DenseSignal({a, b, c})));
    const auto expected = printed_pattern(a, b, c);
    const double scale = std::max(1.0, auto_u[0].real());
    bool ok = true;
    for (std::size_t p = 0; p < 9; ++p) {
      const double dev = std::abs(auto_u[static_cast<std::ptrdiff_t>(p)] - expected[p]) / scale;
      if (p == 0) worst_literal0 = std::max(worst_literal0, dev);
      else worst_rest = std::max(worst_rest, dev);
      if (dev > kTol) ok = false;
    }
    const double corrected0 = 4.0 * std::norm(a) + 2.0 * std::norm(b) + 2.0 * std::norm(c);
    worst_corrected0 = std::max(worst_corrected0, std::abs(auto_u[0] - corrected0) / scale);
    if (!ok) ++literal_failures;
  }
  r.pass = literal_failures == 0;
  r.detail = std::to_string(literal_failures) + "/50 triples violate the printed pattern; entry 0 deviates by up to " +
             detail::fmt(worst_literal0) + ", entries 1..8 by " + detail::fmt(worst_rest) +
             "; 4|a|^2+2|b|^2+2|c|^2 at entry 0 deviates by " + detail::fmt(worst_corrected0);
  r.data["entry0_printed_max_deviation"] = worst_literal0;
  r.data["entries1to8_max_deviation"] = worst_rest;
  r.data["entry0_norm_identity_max_deviation"] = worst_corrected0;
  return r;
}

/// Closed form 4i(cos(theta) - 1)sin(theta), theta = 2π(2M-2)^2/(4M-3).
inline Complex patch_determinant_closed_form(std::size_t m) {
  const double d = static_cast<double>(2 * m - 2);
  const double theta = 2.0 * std::numbers::pi * d * d / static_cast<double>(symmetrized_period(m));
  return Complex(0.0, 4.0) * (std::cos(theta) - 1.0) * std::sin(theta);
}

inline CriterionResult check_patch_determinant(std::uint64_t /*seed*/) {
  CriterionResult r{3, "patch-system determinant, M = 2..64", true, {}, {}};
  double worst = 0.0, smallest = std::numeric_limits<double>::infinity();
  nlohmann::json per_m = nlohmann::json::array();
  for (std::size_t m = 2; m <= 64; ++m) {
    const Complex det = patch_system_determinant(m);
    const Complex closed = patch_determinant_closed_form(m);
    const double rel = std::abs(det - closed) / std::abs(closed);
    worst = std::max(worst, rel);
    smallest = std::min(smallest, std::abs(det));
    const bool ok = rel <= 1e-9 && std::abs(det) > 0.0;
    if (!ok) r.pass = false;
    per_m.push_back({{"M", m}, {"det", {det.real(), det.imag()}}, {"relative_error", rel}, {"pass", ok}});
  }
  r.detail = "worst relative error " + detail::fmt(worst) + ", smallest |det| " + detail::fmt(smallest);
  r.data["per_m"] = std::move(per_m);
  return r;
}

inline CriterionResult check_dft_autocorrelation(std::uint64_t seed) {
  CriterionResult r{4, "dft(CirAut u) = |dft u|^2, P = 5..509", true, {}, {}};
  detail::Rng rng(detail::mix(seed, 4));
  std::uniform_int_distribution<std::size_t> period(5, 509);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t p = period(rng);
    std::vector<Complex> u(p);
    for (auto& v : u) v = detail::random_complex(rng);
    const CyclicSignal signal(std::move(u));
    const CyclicSignal lhs = dft(circular_autocorrelation(signal));
    const CyclicSignal spectrum = dft(signal);
    double dev = 0.0, scale = 0.0;
    for (std::size_t q = 0; q < p; ++q) {
      const double power = std::norm(spectrum[static_cast<std::ptrdiff_t>(q)]);
      dev = std::max(dev, std::abs(lhs[static_cast<std::ptrdiff_t>(q)] - power));
      scale = std::max(scale, power);
    }
    worst = std::max(worst, dev / scale);
  }
  r.pass = worst <= 1e-10;
  r.detail = "100 signals, worst relative deviation " + detail::fmt(worst);
  return r;
}

/// Random real ensemble with small-denominator rational entries, zero columns allowed.
inline MeasurementEnsemble random_rational_ensemble(detail::Rng& rng, std::size_t m, std::size_t n) {
  std::uniform_int_distribution<int> num(-2, 2);
  std::uniform_int_distribution<int> den(1, 3);
  std::uniform_int_distribution<int> style(0, 3);
  std::vector<std::vector<double>> cols(n, std::vector<double>(m));
  for (auto& c : cols) {
    const int s = style(rng);
    for (auto& v : c) {
      // Sparse columns make orthogonal splits and rank deficiency common.
      v = (s == 0 && num(rng) != 0) ? 0.0 : static_cast<double>(num(rng)) / den(rng);
    }
  }
  return MeasurementEnsemble::from_real_columns(m, cols);
}

inline DenseSignal random_real_signal(detail::Rng& rng, std::size_t m) {
  std::normal_distribution<double> g;
  std::vector<double> v(m);
  for (auto& e : v) e = g(rng);
  return DenseSignal::from_real(v);
}

struct OracleTally {
  std::size_t ensembles = 0;
  std::size_t injective = 0;
  std::size_t almost_injective = 0;
  std::vector<std::string> failures;
};

/// Cross-checks both subset verdicts for one ensemble against the census.
inline void cross_check_with_census(const MeasurementEnsemble& phi, const std::string& label, detail::Rng& rng,
                                    OracleTally& tally) {
  ++tally.ensembles;
  const SubsetVerdict inj = has_complement_property(phi);
  const SubsetVerdict almost = is_almost_injective(phi);
  auto fail = [&](const std::string& why) { tally.failures.push_back(label + ": " + why); };
  if (inj.decision) ++tally.injective;
  if (almost.decision) ++tally.almost_injective;
  if (inj.decision && !almost.decision) fail("injective but not almost injective");

  std::size_t trivial = 0;
  for (int probe = 0; probe < 100; ++probe) {
    const DenseSignal x = random_real_signal(rng, phi.dimension());
    if (census_is_trivial(preimage_census(phi, x), x)) ++trivial;
  }

  if (inj.decision) {
    if (trivial != 100) fail("injective but a random probe has a nontrivial census");
    // Adversarial probes from every subset: none may collide for an injective ensemble.
    const Subset all = phasekit::detail::iota_subset(phi.size());
    phasekit::detail::for_each_subset_with_first(all, [&](const Subset& s) {
      if (auto pair = confusable_pair(phi, s)) {
        if (!census_is_trivial(preimage_census(phi, pair->first), pair->first)) fail("adversarial probe collided");
      }
      return true;
    });
  } else {
    if (!inj.witness) {
      fail("non-injective verdict without witness");
    } else if (auto pair = confusable_pair(phi, *inj.witness)) {
      if (census_is_trivial(preimage_census(phi, pair->first), pair->first)) fail("injectivity witness gives no collision");
    } else {
      fail("injectivity witness has a spanning side");
    }
  }

  if (almost.decision) {
    if (trivial < 99) fail("almost injective but only " + std::to_string(trivial) + "/100 probes trivial");
  } else {
    if (!almost.witness) {
      fail("non-almost-injective verdict without witness");
    } else if (auto pair = confusable_pair(phi, *almost.witness)) {
      if (census_is_trivial(preimage_census(phi, pair->first), pair->first)) fail("almost-injectivity witness gives no collision");
    } else {
      fail("almost-injectivity witness admits no u+v construction");
    }
  }
}

inline MeasurementEnsemble doubled_basis_ensemble() {
  return MeasurementEnsemble::from_real_columns(2, {{1, 0}, {1, 0}, {0, 1}, {0, 1}});
}

/// Two three-vector planar tight frames placed in orthogonal planes of R^4 and
/// rotated by `rotation`: a UNTF with N/M = 3/2 that splits orthogonally.
inline MeasurementEnsemble split_planar_untf(const Eigen::MatrixXd& rotation) {
  std::vector<std::vector<double>> cols;
  for (int block = 0; block < 2; ++block) {
    for (int k = 0; k < 3; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / 3.0 + 0.4 * block;
      Eigen::VectorXd v = Eigen::VectorXd::Zero(4);
      v(2 * block) = std::cos(angle);
      v(2 * block + 1) = std::sin(angle);
      const Eigen::VectorXd w = rotation * v;
      cols.emplace_back(w.data(), w.data() + w.size());
    }
  }
  return MeasurementEnsemble::from_real_columns(4, cols);
}

inline Eigen::MatrixXd random_rotation(detail::Rng& rng, std::size_t m) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = g(rng);
  }
  return Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
}

inline CriterionResult check_injectivity_oracles(std::uint64_t seed) {
  CriterionResult r{5, "subset verdicts agree with the preimage census", true, {}, {}};
  detail::Rng rng(detail::mix(seed, 5));
  OracleTally tally;
  std::uniform_int_distribution<std::size_t> dim(1, 3);
  std::uniform_int_distribution<std::size_t> count(1, 6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = dim(rng);
    const std::size_t n = count(rng);
    cross_check_with_census(random_rational_ensemble(rng, m, n), "random #" + std::to_string(trial), rng, tally);
  }
  cross_check_with_census(simplex_frame(3), "simplex(3)", rng, tally);
  cross_check_with_census(spike_pair_ensemble(2), "spike-pair(2)", rng, tally);
  cross_check_with_census(doubled_basis_ensemble(), "{e1,e1,e2,e2}", rng, tally);
  cross_check_with_census(MeasurementEnsemble::from_real_columns(2, {{1, 0}, {0, 1}}), "{e1,e2}", rng, tally);
  cross_check_with_census(split_planar_untf(random_rotation(rng, 4)), "split planar UNTF", rng, tally);
  r.pass = tally.failures.empty();
  r.detail = std::to_string(tally.ensembles) + " ensembles (" + std::to_string(tally.injective) + " injective, " +
             std::to_string(tally.almost_injective) + " almost injective), " + std::to_string(tally.failures.size()) +
             " disagreements";
  if (!tally.failures.empty()) r.detail += "; first: " + tally.failures.front();
  r.data["failures"] = tally.failures;
  return r;
}

inline CriterionResult check_untf_coprime(std::uint64_t seed) {
  CriterionResult r{6, "simplex frames almost injective; split UNTF is not", true, {}, {}};
  detail::Rng rng(detail::mix(seed, 6));
  std::vector<std::string> problems;
  for (std::size_t m = 2; m <= 8; ++m) {
    const auto phi = simplex_frame(m);
    if (!coprime_untf_guarantee(m, phi.size())) problems.push_back("gcd(M, M+1) != 1 at M=" + std::to_string(m));
    if (!is_untf(phi)) problems.push_back("simplex(" + std::to_string(m) + ") not a UNTF");
    if (!is_almost_injective(phi).decision) problems.push_back("simplex(" + std::to_string(m) + ") not almost injective");
  }
  const auto split = split_planar_untf(random_rotation(rng, 4));
  const auto verdict = is_almost_injective(split);
  const auto partition = find_orthogonal_partition(split);
  if (!is_untf(split)) problems.push_back("split frame is not a UNTF");
  if (coprime_untf_guarantee(split.dimension(), split.size())) problems.push_back("split frame has coprime M, N");
  if (verdict.decision) problems.push_back("split frame reported almost injective");
  if (!partition) {
    problems.push_back("no orthogonal partition found for the split frame");
  } else {
    const SubsetRank ranks(split);
    const Subset rest = phasekit::detail::complement(*partition, phasekit::detail::iota_subset(split.size()));
    for (std::size_t i : *partition) {
      for (std::size_t j : rest) {
        if (!ranks.orthogonal(i, j)) problems.push_back("partition sides are not orthogonal");
      }
    }
    r.data["partition"] = *partition;
  }
  r.pass = problems.empty();
  r.detail = r.pass ? "simplex M=2..8 pass; split UNTF (M=4, N=6) rejected with partition witness"
                    : problems.front();
  return r;
}

inline CriterionResult check_reduction(std::uint64_t seed) {
  CriterionResult r{7, "SubsetSum reduction certified by both oracles", true, {}, {}};
  detail::Rng rng(detail::mix(seed, 7));
  std::uniform_int_distribution<std::size_t> size(1, 8);
  std::uniform_int_distribution<std::int64_t> entry(-20, 20);
  std::uniform_int_distribution<std::int64_t> target(-60, 60);
  std::vector<std::string> problems;
  std::size_t yes = 0, total = 0;

  auto certify = [&](const std::vector<std::int64_t>& a, std::int64_t z, std::optional<bool> expected) {
    ++total;
    const auto cert = certify_reduction(a, z);
    if (!cert.agree()) problems.push_back("oracles disagree on instance " + std::to_string(total));
    if (expected && cert.subset_sum != *expected) problems.push_back("fixed instance has the wrong verdict");
    if (cert.witness) {
      ++yes;
      const auto phi = default_family(a.size());
      for (std::size_t n = 0; n < phi.size(); ++n) {
        if (boost::multiprecision::abs(phi.inner(*cert.witness, n)) != cert.instance.b[n]) {
          problems.push_back("witness has nonzero residual");
        }
      }
    }
  };
  certify({1, 2, 3}, 3, true);
  certify({2, 4}, 3, false);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::int64_t> a(size(rng));
    for (auto& v : a) v = entry(rng);
    certify(a, target(rng), std::nullopt);
  }
  r.pass = problems.empty();
  r.detail = std::to_string(total) + " instances (" + std::to_string(yes) + " yes), " +
             std::to_string(problems.size()) + " problems";
  if (!problems.empty()) r.detail += "; first: " + problems.front();
  return r;
}

inline CriterionResult check_spike_pair(std::uint64_t seed) {
  CriterionResult r{8, "spike-pair closed-form recovery, M = 2..32", true, {}, {}};
  detail::Rng rng(detail::mix(seed, 8));
  std::uniform_int_distribution<std::size_t> dim(2, 32);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = dim(rng);
    std::vector<double> x(m);
    for (auto& v : x) v = g(rng);
    while (std::abs(x[0]) < 0.1) x[0] = g(rng);
    const auto truth = DenseSignal::from_real(x);
    const auto result = retrieve_spike_pair(measure(spike_pair_ensemble(m), truth), m);
    worst = std::max(worst, phase_aligned_distance(result.estimate, truth));
  }
  bool rejected = true;
  for (std::size_t m : {2, 5, 32}) {
    std::vector<double> x(m);
    for (auto& v : x) v = g(rng);
    x[0] = 0.0;
    try {
      retrieve_spike_pair(measure(spike_pair_ensemble(m), DenseSignal::from_real(x)), m);
      rejected = false;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::unsupported_signal) rejected = false;
    }
  }
  r.pass = worst <= 1e-12 && rejected;
  r.detail = "100 signals, worst error " + detail::fmt(worst) + (rejected ? "; zero first entry rejected" : "; zero first entry NOT rejected");
  return r;
}

inline const std::vector<std::function<CriterionResult(std::uint64_t)>>& criteria() {
  static const std::vector<std::function<CriterionResult(std::uint64_t)>> all{
      check_4m4_injectivity,  check_worked_example, check_patch_determinant, check_dft_autocorrelation,
      check_injectivity_oracles, check_untf_coprime, check_reduction,         check_spike_pair};
  return all;
}

inline std::vector<CriterionResult> run_all(std::uint64_t seed = 0) {
  std::vector<CriterionResult> out;
  for (const auto& c : criteria()) out.push_back(c(seed));
  return out;
}

}  // namespace phasekit::selftest
