#pragma once

// Exact recovery up to global phase from 4M-4 intensities (and from the 2M-1
// spike-pair ensemble).
//
// Pipeline for the 4M-4 ensemble, P = 4M-3:
//   1. even-extend |<x,c_q>|^2 to all q in Z_P and invert the DFT: r1 = CirAut(x+Rx);
//   2. rebuild r2 = CirAut(Ex+REx) from the 2M-3 modulated intensities, using that
//      r2 and r1 agree at 0 and +-(2M-2) (a 3x3 linear solve);
//   3. read the last nonzero index q of x off r1, fix x[q] = sqrt(r1[2q]), and walk
//      k = q-1, ..., 0 resolving each x[k] from r1[q+k] and r2[q+k].

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phasekit/cyclic.hpp"
#include "phasekit/ensemble.hpp"
#include "phasekit/error.hpp"

namespace phasekit {

/// Relative threshold for locating the last nonzero entry of r1.
inline constexpr double kSupportTolerance = 1e-9;
/// Relative residual above which autocorrelations/intensities are declared inconsistent.
inline constexpr double kConsistencyTolerance = 1e-6;

struct RecoveryResult {
  DenseSignal estimate;
  /// Index of the last nonzero entry of the estimate; empty for the zero signal.
  std::optional<std::size_t> support_index;
  double residual = 0.0;
};

/// Given a_hat = e^{iψ} a, Re(a conj b) and Re(ω a conj b), returns e^{iψ} b:
///   i / (conj(a_hat) Im ω) · (Re(ω a conj b) - ω Re(a conj b)).
inline Complex resolve_entry(Complex a_hat, double re_ab, double re_wab, Complex omega, double tol = 1e-300) {
  if (std::abs(a_hat) <= tol) throw Error(ErrorKind::degenerate_pivot, "anchor entry is zero");
  if (std::abs(omega.imag()) <= 1e-12 * std::abs(omega)) {
    throw Error(ErrorKind::degenerate_pivot, "modulation ratio is real");
  }
  const Complex i{0.0, 1.0};
  return i / (std::conj(a_hat) * omega.imag()) * (re_wab - omega * re_ab);
}

/// Largest q with |r1[2q]| above tol·||r1||_inf, 2q <= 2M-2; empty if r1 vanishes there.
inline std::optional<std::size_t> support_index(const CyclicSignal& r1, std::size_t m, double tol = kSupportTolerance) {
  const double scale = r1.max_abs();
  if (scale == 0.0) return std::nullopt;
  const double threshold = tol * scale;
  for (std::size_t q = m; q-- > 0;) {
    if (std::abs(r1[static_cast<std::ptrdiff_t>(2 * q)]) > threshold) return q;
  }
  return std::nullopt;
}

namespace detail {

inline std::array<std::ptrdiff_t, 3> patch_indices(std::size_t m) {
  const auto period = static_cast<std::ptrdiff_t>(symmetrized_period(m));
  const auto edge = static_cast<std::ptrdiff_t>(2 * m - 2);
  return {0, edge, period - edge};
}

/// 3x3 block of P·(F*)^{-1} on rows/columns {0, 2M-2, -(2M-2)}.
inline std::array<std::array<Complex, 3>, 3> patch_matrix(std::size_t m) {
  const std::size_t period = symmetrized_period(m);
  const auto idx = patch_indices(m);
  std::array<std::array<Complex, 3>, 3> g{};
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      g[r][c] = root_of_unity(static_cast<std::size_t>(idx[r] * idx[c]), period, 1.0);
    }
  }
  return g;
}

inline Complex det3(const std::array<std::array<Complex, 3>, 3>& a) {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

}  // namespace detail

/// Determinant of the 3x3 patch system with the 1/P normalization removed.
inline Complex patch_system_determinant(std::size_t m) {
  detail::require_dimension_at_least_two(m);
  return detail::det3(detail::patch_matrix(m));
}

/// Rebuilds CirAut(Ex+REx) from r1 = CirAut(x+Rx) and the modulated intensities
/// |<x, E* c_q>|^2 for q = 1..2M-3.
inline CyclicSignal reconstruct_second_autocorrelation(const CyclicSignal& r1, std::span<const double> modulated,
                                                        std::size_t m) {
  detail::require_dimension_at_least_two(m);
  const std::size_t period = symmetrized_period(m);
  if (r1.period() != period) throw Error(ErrorKind::invalid_input, "r1 must have period 4M-3");
  if (modulated.size() != 2 * m - 3) {
    throw Error(ErrorKind::invalid_input, "expected " + std::to_string(2 * m - 3) + " modulated intensities");
  }

  // Spectrum of r2, known away from the patch indices by even symmetry.
  std::vector<Complex> spectrum(period, Complex{});
  for (std::size_t q = 1; q <= 2 * m - 3; ++q) {
    spectrum[q] = modulated[q - 1];
    spectrum[period - q] = modulated[q - 1];
  }

  const auto idx = detail::patch_indices(m);
  auto g = detail::patch_matrix(m);
  std::array<Complex, 3> rhs{};
  for (std::size_t r = 0; r < 3; ++r) {
    Complex known{};
    for (std::size_t k = 0; k < period; ++k) {
      known += spectrum[k] * detail::root_of_unity(static_cast<std::size_t>(idx[r]) * k, period, 1.0);
    }
    rhs[r] = static_cast<double>(period) * r1[idx[r]] - known;
  }

  const Complex det = detail::det3(g);
  if (std::abs(det) < 1e-12) throw Error(ErrorKind::numerical_degeneracy, "patch system is singular");
  for (std::size_t c = 0; c < 3; ++c) {
    auto gc = g;
    for (std::size_t r = 0; r < 3; ++r) gc[r][c] = rhs[r];
    // The spectrum of an even real autocorrelation is real.
    spectrum[static_cast<std::size_t>(idx[c])] = (detail::det3(gc) / det).real();
  }
  return idft(CyclicSignal(std::move(spectrum)));
}

namespace detail {

inline double autocorrelation_mismatch(const CyclicSignal& expected, const CyclicSignal& actual) {
  double worst = 0.0;
  for (std::size_t p = 0; p < expected.period(); ++p) {
    const auto i = static_cast<std::ptrdiff_t>(p);
    worst = std::max(worst, std::abs(expected[i] - actual[i]));
  }
  return worst;
}

}  // namespace detail

/// Recovers x up to global phase from r1 = CirAut(x+Rx) and r2 = CirAut(Ex+REx).
/// The free phase is pinned so that the last nonzero entry is a nonnegative real.
inline RecoveryResult recover_from_autocorrelations(const CyclicSignal& r1, const CyclicSignal& r2, std::size_t m,
                                                    const ModulationOperator& e,
                                                    double consistency_tol = kConsistencyTolerance) {
  detail::require_dimension_at_least_two(m);
  const std::size_t period = symmetrized_period(m);
  if (r1.period() != period || r2.period() != period) {
    throw Error(ErrorKind::invalid_input, "autocorrelations must have period 4M-3");
  }
  if (e.dimension() != m) throw Error(ErrorKind::invalid_input, "modulation dimension mismatch");

  const double scale = r1.max_abs();
  std::vector<Complex> xhat(m, Complex{});
  const auto q = support_index(r1, m);

  if (q) {
    const double anchor = r1[static_cast<std::ptrdiff_t>(2 * *q)].real();
    if (anchor < 0.0) throw Error(ErrorKind::not_an_autocorrelation_pair, "negative squared modulus at the support index");
    if (*q == 0) {
      xhat[0] = 0.5 * std::sqrt(anchor);
    } else {
      xhat[*q] = std::sqrt(anchor);
      std::vector<Complex> modulated(m, Complex{});
      for (std::size_t k = *q; k-- > 0;) {
        // xhat[k] and everything below it are still zero, so the expansions
        // evaluated on xhat give every term except the one pairing x[q] with x[k].
        const std::size_t p = *q + k;
        for (std::size_t j = 0; j < m; ++j) modulated[j] = e[j] * xhat[j];
        const double known1 = symmetrized_autocorrelation_entry(xhat, p);
        const double known2 = symmetrized_autocorrelation_entry(modulated, p);
        const double weight = (k == 0) ? 4.0 : 2.0;
        const double re_ab = (r1[static_cast<std::ptrdiff_t>(p)].real() - known1) / weight;
        const double re_wab = (r2[static_cast<std::ptrdiff_t>(p)].real() - known2) / weight;
        xhat[k] = resolve_entry(xhat[*q], re_ab, re_wab, e.ratio(*q, k));
      }
    }
  }

  DenseSignal estimate(std::move(xhat));
  const CyclicSignal r1_hat = circular_autocorrelation(symmetrize(estimate));
  const CyclicSignal r2_hat = circular_autocorrelation(symmetrize(e.apply(estimate)));
  const double mismatch =
      std::max(detail::autocorrelation_mismatch(r1, r1_hat), detail::autocorrelation_mismatch(r2, r2_hat));
  const double residual = scale > 0.0 ? mismatch / scale : mismatch;
  if (residual > consistency_tol) {
    throw Error(ErrorKind::not_an_autocorrelation_pair,
                "re-derived autocorrelations deviate by " + std::to_string(residual) + " (relative)");
  }
  return RecoveryResult{std::move(estimate), q, residual};
}

/// Relative max deviation between two intensity vectors, scaled by the largest input value.
inline double intensity_residual(const IntensityVector& input, const IntensityVector& remeasured) {
  double worst = 0.0;
  for (std::size_t n = 0; n < input.size(); ++n) worst = std::max(worst, std::abs(input[n] - remeasured[n]));
  const double scale = input.max();
  return scale > 0.0 ? worst / scale : worst;
}

/// Full 4M-4 pipeline. Intensities are ordered as build_4m4_ensemble(M)'s columns.
inline RecoveryResult retrieve_4m4(const IntensityVector& intensities, std::size_t m) {
  detail::require_dimension_at_least_two(m);
  if (intensities.size() != 4 * m - 4) {
    throw Error(ErrorKind::invalid_input, "expected " + std::to_string(4 * m - 4) + " intensities, got " +
                                              std::to_string(intensities.size()));
  }
  const std::size_t period = symmetrized_period(m);
  const auto values = intensities.values();

  std::vector<Complex> cosine_spectrum(period);
  for (std::size_t q = 0; q < period; ++q) cosine_spectrum[q] = values[std::min(q, period - q)];
  const CyclicSignal r1 = idft(CyclicSignal(std::move(cosine_spectrum)));
  const CyclicSignal r2 = reconstruct_second_autocorrelation(r1, values.subspan(2 * m - 1), m);

  RecoveryResult result = recover_from_autocorrelations(r1, r2, m, modulation(m));
  result.residual = intensity_residual(intensities, measure(build_4m4_ensemble(m), result.estimate));
  return result;
}

/// Closed-form recovery for the spike-pair ensemble; needs x[0] != 0.
inline RecoveryResult retrieve_spike_pair(const IntensityVector& intensities, std::size_t m, double tol = 1e-12) {
  detail::require_dimension_at_least_two(m);
  if (intensities.size() != 2 * m - 1) {
    throw Error(ErrorKind::invalid_input, "expected " + std::to_string(2 * m - 1) + " intensities, got " +
                                              std::to_string(intensities.size()));
  }
  const double first = intensities[0];
  if (first <= tol * std::max(1.0, intensities.max())) {
    throw Error(ErrorKind::unsupported_signal, "spike-pair recovery needs a nonzero first entry");
  }
  std::vector<Complex> xhat(m);
  xhat[0] = std::sqrt(first);
  for (std::size_t k = 1; k < m; ++k) {
    xhat[k] = (intensities[m + k - 1] - first - intensities[k]) / (2.0 * xhat[0].real());
  }
  DenseSignal estimate(std::move(xhat));
  std::optional<std::size_t> last;
  for (std::size_t k = m; k-- > 0;) {
    if (estimate[k] != 0.0) {
      last = k;
      break;
    }
  }
  const double residual = intensity_residual(intensities, measure(spike_pair_ensemble(m), estimate));
  return RecoveryResult{std::move(estimate), last, residual};
}

}  // namespace phasekit
