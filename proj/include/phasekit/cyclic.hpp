#pragma once

// Harmonic analysis on the cyclic group Z_P: signals, translation, reversal,
// the DFT pair and circular autocorrelation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phasekit/error.hpp"

namespace phasekit {

using Complex = std::complex<double>;

/// Complex function on Z_P. Indices are taken mod P on access.
class CyclicSignal {
 public:
  explicit CyclicSignal(std::vector<Complex> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) {
      throw Error(ErrorKind::invalid_dimension, "cyclic signal needs a positive period");
    }
  }

  static CyclicSignal zeros(std::size_t period) {
    return CyclicSignal(std::vector<Complex>(period, Complex{}));
  }

  static CyclicSignal spike(std::size_t period, std::ptrdiff_t at = 0) {
    CyclicSignal s = zeros(period);
    s[at] = 1.0;
    return s;
  }

  std::size_t period() const noexcept { return entries_.size(); }

  std::size_t wrap(std::ptrdiff_t p) const noexcept {
    const auto n = static_cast<std::ptrdiff_t>(entries_.size());
    const std::ptrdiff_t r = p % n;
    return static_cast<std::size_t>(r < 0 ? r + n : r);
  }

  const Complex& operator[](std::ptrdiff_t p) const { return entries_[wrap(p)]; }
  Complex& operator[](std::ptrdiff_t p) { return entries_[wrap(p)]; }

  std::span<const Complex> entries() const noexcept { return entries_; }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : entries_) m = std::max(m, std::abs(v));
    return m;
  }

  CyclicSignal& operator+=(const CyclicSignal& other) {
    if (other.period() != period()) {
      throw Error(ErrorKind::invalid_input, "period mismatch in cyclic sum");
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
    return *this;
  }

  friend CyclicSignal operator+(CyclicSignal a, const CyclicSignal& b) { return a += b; }

 private:
  std::vector<Complex> entries_;
};

/// Length-M signal, the unknown of a phase retrieval problem.
class DenseSignal {
 public:
  explicit DenseSignal(std::vector<Complex> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) {
      throw Error(ErrorKind::invalid_dimension, "signal dimension must be positive");
    }
  }

  static DenseSignal zeros(std::size_t dimension) {
    return DenseSignal(std::vector<Complex>(dimension, Complex{}));
  }

  static DenseSignal from_real(std::span<const double> values) {
    return DenseSignal(std::vector<Complex>(values.begin(), values.end()));
  }

  static DenseSignal from_real(std::initializer_list<double> values) {
    return DenseSignal(std::vector<Complex>(values.begin(), values.end()));
  }

  std::size_t dimension() const noexcept { return entries_.size(); }

  const Complex& operator[](std::size_t k) const { return entries_[k]; }
  Complex& operator[](std::size_t k) { return entries_[k]; }

  std::span<const Complex> entries() const noexcept { return entries_; }

  double norm() const {
    double s = 0.0;
    for (const auto& v : entries_) s += std::norm(v);
    return std::sqrt(s);
  }

  bool is_real(double tol = 0.0) const {
    for (const auto& v : entries_) {
      if (std::abs(v.imag()) > tol) return false;
    }
    return true;
  }

 private:
  std::vector<Complex> entries_;
};

/// Smallest distance between `estimate` and the orbit {e^{iθ} truth}.
inline double phase_aligned_distance(const DenseSignal& estimate, const DenseSignal& truth) {
  if (estimate.dimension() != truth.dimension()) {
    throw Error(ErrorKind::invalid_input, "dimension mismatch in phase alignment");
  }
  // The optimal phase aligns the inner product <estimate, truth> with the positive reals.
  Complex inner{};
  for (std::size_t k = 0; k < truth.dimension(); ++k) inner += estimate[k] * std::conj(truth[k]);
  const Complex phase = std::abs(inner) > 0.0 ? inner / std::abs(inner) : Complex{1.0};
  double s = 0.0;
  for (std::size_t k = 0; k < truth.dimension(); ++k) s += std::norm(estimate[k] - phase * truth[k]);
  return std::sqrt(s);
}

namespace detail {

/// e^{sign·2πi·k/P}, with k reduced mod P first so large products keep full accuracy.
inline Complex root_of_unity(std::size_t k, std::size_t period, double sign) {
  const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k % period) /
                       static_cast<double>(period);
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace detail

/// (T^p u)[p'] = u[p' - p].
inline CyclicSignal translate(const CyclicSignal& u, std::ptrdiff_t p) {
  CyclicSignal out = CyclicSignal::zeros(u.period());
  const auto n = static_cast<std::ptrdiff_t>(u.period());
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = u[i - p];
  return out;
}

/// (R u)[p] = u[-p].
inline CyclicSignal reverse(const CyclicSignal& u) {
  CyclicSignal out = CyclicSignal::zeros(u.period());
  const auto n = static_cast<std::ptrdiff_t>(u.period());
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = u[-i];
  return out;
}

/// Analysis operator of the Fourier basis: out[q] = sum_p u[p] e^{-2πipq/P}.
/// Direct O(P^2) evaluation; P = 4M-3 is odd and rarely smooth.
inline CyclicSignal dft(const CyclicSignal& u) {
  const std::size_t n = u.period();
  std::vector<Complex> out(n);
  for (std::size_t q = 0; q < n; ++q) {
    Complex acc{};
    for (std::size_t p = 0; p < n; ++p) acc += u[static_cast<std::ptrdiff_t>(p)] * detail::root_of_unity(p * q, n, -1.0);
    out[q] = acc;
  }
  return CyclicSignal(std::move(out));
}

/// Inverse of dft: out[p] = (1/P) sum_q v[q] e^{2πipq/P}.
inline CyclicSignal idft(const CyclicSignal& v) {
  const std::size_t n = v.period();
  std::vector<Complex> out(n);
  for (std::size_t p = 0; p < n; ++p) {
    Complex acc{};
    for (std::size_t q = 0; q < n; ++q) acc += v[static_cast<std::ptrdiff_t>(q)] * detail::root_of_unity(p * q, n, 1.0);
    out[p] = acc / static_cast<double>(n);
  }
  return CyclicSignal(std::move(out));
}

/// out[p] = <u, T^p u> = sum_{p'} u[p'] conj(u[p' - p]).
inline CyclicSignal circular_autocorrelation(const CyclicSignal& u) {
  const auto n = static_cast<std::ptrdiff_t>(u.period());
  CyclicSignal out = CyclicSignal::zeros(u.period());
  for (std::ptrdiff_t p = 0; p < n; ++p) {
    Complex acc{};
    for (std::ptrdiff_t i = 0; i < n; ++i) acc += u[i] * std::conj(u[i - p]);
    out[p] = acc;
  }
  return out;
}

/// Zero-pads x to period P.
inline CyclicSignal embed(const DenseSignal& x, std::size_t period) {
  if (period < x.dimension()) {
    throw Error(ErrorKind::invalid_embedding, "period " + std::to_string(period) +
                                                  " is shorter than signal dimension " +
                                                  std::to_string(x.dimension()));
  }
  std::vector<Complex> out(period, Complex{});
  std::copy(x.entries().begin(), x.entries().end(), out.begin());
  return CyclicSignal(std::move(out));
}

inline std::size_t symmetrized_period(std::size_t dimension) { return 4 * dimension - 3; }

/// x + Rx in Z_{4M-3}.
inline CyclicSignal symmetrize(const DenseSignal& x) {
  const CyclicSignal e = embed(x, symmetrized_period(x.dimension()));
  return e + reverse(e);
}

/// CirAut(x + Rx)[p] evaluated from the entries of x alone, for 0 <= p <= 2M-2.
///
/// For p >= 1 only entries at index >= ceil(p/2) contribute:
///   2 Re( sum_{p' > p/2} x[p'] (conj x[p'-p] + conj x[p-p']) ) + [p even] |x[p/2]|^2
/// with x[k] = 0 outside 0..M-1. Index 0 is ||x + Rx||^2.
inline double symmetrized_autocorrelation_entry(std::span<const Complex> x, std::size_t p) {
  const auto m = static_cast<std::ptrdiff_t>(x.size());
  auto at = [&](std::ptrdiff_t k) -> Complex { return (k < 0 || k >= m) ? Complex{} : x[static_cast<std::size_t>(k)]; };
  if (p == 0) {
    double s = 4.0 * std::norm(at(0));
    for (std::ptrdiff_t k = 1; k < m; ++k) s += 2.0 * std::norm(at(k));
    return s;
  }
  const auto pp = static_cast<std::ptrdiff_t>(p);
  Complex acc{};
  for (std::ptrdiff_t j = pp / 2 + 1; j < m; ++j) {
    acc += at(j) * (std::conj(at(j - pp)) + std::conj(at(pp - j)));
  }
  double value = 2.0 * acc.real();
  if (pp % 2 == 0) value += std::norm(at(pp / 2));
  return value;
}

}  // namespace phasekit
