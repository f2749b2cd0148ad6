#pragma once

// Exact rational arithmetic: "p/q" text form, recognition of doubles that are
// small-denominator rationals, and fraction-free (Bareiss) elimination.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "phasekit/error.hpp"

namespace phasekit {

using BigInt = boost::multiprecision::cpp_int;
/// Always normalized: lowest terms, positive denominator.
using Rational = boost::multiprecision::cpp_rational;

/// Row-major dense rational matrix.
using RationalMatrix = std::vector<std::vector<Rational>>;

inline std::string to_string(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

inline Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string_view::npos) return Rational(BigInt(std::string(text)));
    const BigInt num(std::string(text.substr(0, slash)));
    const BigInt den(std::string(text.substr(slash + 1)));
    if (den == 0) throw Error(ErrorKind::invalid_input, "zero denominator in '" + std::string(text) + "'");
    // cpp_rational rejects negative denominators in the two-argument form.
    return Rational(num) / Rational(den);
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const Error*>(&e) != nullptr) throw;
    throw Error(ErrorKind::invalid_input, "not a rational: '" + std::string(text) + "'");
  }
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Best rational approximation with denominator <= max_den (continued fractions),
/// returned only if it converts back to exactly `value`.
inline std::optional<Rational> recognize_rational(double value, std::int64_t max_den = 4096) {
  if (!std::isfinite(value)) return std::nullopt;
  if (value == std::floor(value) && std::abs(value) < 9.0e15) return Rational(static_cast<std::int64_t>(value));
  // Convergents h/k of the continued fraction of value.
  std::int64_t h_prev = 1, h = static_cast<std::int64_t>(std::floor(value));
  std::int64_t k_prev = 0, k = 1;
  double frac = value - std::floor(value);
  for (int iter = 0; iter < 64 && frac != 0.0; ++iter) {
    const double inv = 1.0 / frac;
    const auto a = static_cast<std::int64_t>(std::floor(inv));
    if (a > max_den) break;
    const std::int64_t h_next = a * h + h_prev;
    const std::int64_t k_next = a * k + k_prev;
    if (k_next > max_den) break;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
    frac = inv - static_cast<double>(a);
    if (static_cast<double>(h) / static_cast<double>(k) == value) break;
  }
  const Rational candidate(h, k);
  if (to_double(candidate) != value) return std::nullopt;
  return candidate;
}

namespace detail {

/// Fraction-free elimination on an integer matrix (in place). Returns the rank and
/// the pivot column of each pivot row.
inline std::size_t bareiss_rank(std::vector<std::vector<BigInt>>& a, std::vector<std::size_t>* pivot_cols = nullptr) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows == 0 ? 0 : a[0].size();
  BigInt prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t pivot = r;
    while (pivot < rows && a[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) / prev;
      }
      a[i][c] = 0;
    }
    prev = a[r][c];
    if (pivot_cols) pivot_cols->push_back(c);
    ++r;
  }
  return r;
}

/// Scales each row by the lcm of its denominators; row scaling keeps the rank.
inline std::vector<std::vector<BigInt>> clear_row_denominators(const RationalMatrix& a) {
  std::vector<std::vector<BigInt>> out;
  out.reserve(a.size());
  for (const auto& row : a) {
    BigInt l = 1;
    for (const auto& v : row) l = boost::multiprecision::lcm(l, BigInt(boost::multiprecision::denominator(v)));
    std::vector<BigInt> ints;
    ints.reserve(row.size());
    for (const auto& v : row) ints.push_back(boost::multiprecision::numerator(v) * (l / boost::multiprecision::denominator(v)));
    out.push_back(std::move(ints));
  }
  return out;
}

}  // namespace detail

inline std::size_t exact_rank(const RationalMatrix& a) {
  auto ints = detail::clear_row_denominators(a);
  return detail::bareiss_rank(ints);
}

/// Solves the square system a·x = b exactly; nullopt if a is singular.
inline std::optional<std::vector<Rational>> exact_solve(const RationalMatrix& a, const std::vector<Rational>& b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw Error(ErrorKind::invalid_input, "right-hand side length mismatch");
  RationalMatrix aug = a;
  for (std::size_t i = 0; i < n; ++i) {
    if (aug[i].size() != n) throw Error(ErrorKind::invalid_input, "exact_solve needs a square matrix");
    aug[i].push_back(b[i]);
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && aug[pivot][c] == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(aug[pivot], aug[c]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || aug[i][c] == 0) continue;
      const Rational f = aug[i][c] / aug[c][c];
      for (std::size_t j = c; j <= n; ++j) aug[i][j] -= f * aug[c][j];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = aug[i][n] / aug[i][i];
  return x;
}

/// Exact inverse of a square matrix by Gauss-Jordan on [a | I]; nullopt if singular.
inline std::optional<RationalMatrix> exact_inverse(const RationalMatrix& a) {
  const std::size_t n = a.size();
  RationalMatrix aug = a;
  for (std::size_t i = 0; i < n; ++i) {
    if (aug[i].size() != n) throw Error(ErrorKind::invalid_input, "exact_inverse needs a square matrix");
    aug[i].resize(2 * n);
    aug[i][n + i] = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && aug[pivot][c] == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(aug[pivot], aug[c]);
    const Rational scale = aug[c][c];
    for (auto& v : aug[c]) v /= scale;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || aug[i][c] == 0) continue;
      const Rational f = aug[i][c];
      for (std::size_t j = c; j < 2 * n; ++j) aug[i][j] -= f * aug[c][j];
    }
  }
  RationalMatrix inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[i].assign(aug[i].begin() + static_cast<std::ptrdiff_t>(n), aug[i].end());
  return inv;
}

}  // namespace phasekit
