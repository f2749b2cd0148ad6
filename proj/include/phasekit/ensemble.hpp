#pragma once

// Measurement ensembles and the intensity map x -> {|<x, phi_n>|^2}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "phasekit/cyclic.hpp"
#include "phasekit/error.hpp"

namespace phasekit {

enum class Field { real, complex };

inline std::string to_string(Field f) { return f == Field::real ? "real" : "complex"; }

/// N measurement vectors in C^M (or R^M), stored column by column.
class MeasurementEnsemble {
 public:
  MeasurementEnsemble(std::size_t dimension, std::vector<std::vector<Complex>> columns, Field field)
      : dimension_(dimension), columns_(std::move(columns)), field_(field) {
    if (dimension_ == 0) throw Error(ErrorKind::invalid_dimension, "ensemble dimension must be positive");
    for (const auto& c : columns_) {
      if (c.size() != dimension_) {
        throw Error(ErrorKind::invalid_input, "ensemble column has length " + std::to_string(c.size()) +
                                                  ", expected " + std::to_string(dimension_));
      }
      if (field_ == Field::real) {
        for (const auto& v : c) {
          if (v.imag() != 0.0) throw Error(ErrorKind::invalid_input, "real ensemble has a complex entry");
        }
      }
    }
  }

  static MeasurementEnsemble from_real_columns(std::size_t dimension, const std::vector<std::vector<double>>& columns) {
    std::vector<std::vector<Complex>> cols;
    cols.reserve(columns.size());
    for (const auto& c : columns) cols.emplace_back(c.begin(), c.end());
    return MeasurementEnsemble(dimension, std::move(cols), Field::real);
  }

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return columns_.size(); }
  Field field() const noexcept { return field_; }

  const std::vector<Complex>& column(std::size_t n) const { return columns_.at(n); }
  const std::vector<std::vector<Complex>>& columns() const noexcept { return columns_; }

  /// M x N real matrix of the ensemble. Requires field == real.
  Eigen::MatrixXd real_matrix() const {
    if (field_ != Field::real) throw Error(ErrorKind::unsupported_field, "operation needs a real ensemble");
    Eigen::MatrixXd m(dimension_, columns_.size());
    for (std::size_t n = 0; n < columns_.size(); ++n) {
      for (std::size_t k = 0; k < dimension_; ++k) m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n)) = columns_[n][k].real();
    }
    return m;
  }

 private:
  std::size_t dimension_;
  std::vector<std::vector<Complex>> columns_;
  Field field_;
};

/// Diagonal unit-modulus operator E with pairwise non-real ratios.
class ModulationOperator {
 public:
  explicit ModulationOperator(std::vector<Complex> diagonal) : diagonal_(std::move(diagonal)) {
    for (const auto& w : diagonal_) {
      if (std::abs(std::abs(w) - 1.0) > 1e-12) {
        throw Error(ErrorKind::invalid_input, "modulation entries must have unit modulus");
      }
    }
    for (std::size_t j = 0; j < diagonal_.size(); ++j) {
      for (std::size_t k = 0; k < j; ++k) {
        if (std::abs(ratio(j, k).imag()) < 1e-12) {
          throw Error(ErrorKind::invalid_input, "modulation entries have a real ratio");
        }
      }
    }
  }

  std::size_t dimension() const noexcept { return diagonal_.size(); }
  const Complex& operator[](std::size_t k) const { return diagonal_[k]; }
  std::span<const Complex> diagonal() const noexcept { return diagonal_; }

  /// omega_j * conj(omega_k)
  Complex ratio(std::size_t j, std::size_t k) const { return diagonal_[j] * std::conj(diagonal_[k]); }

  double min_ratio_imag() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < diagonal_.size(); ++j) {
      for (std::size_t k = 0; k < diagonal_.size(); ++k) {
        if (j != k) m = std::min(m, std::abs(ratio(j, k).imag()));
      }
    }
    return m;
  }

  DenseSignal apply(const DenseSignal& x) const {
    if (x.dimension() != dimension()) throw Error(ErrorKind::invalid_input, "modulation dimension mismatch");
    std::vector<Complex> out(x.dimension());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = diagonal_[k] * x[k];
    return DenseSignal(std::move(out));
  }

 private:
  std::vector<Complex> diagonal_;
};

/// Nonnegative intensities, ordered like the ensemble columns.
class IntensityVector {
 public:
  explicit IntensityVector(std::vector<double> values) : values_(std::move(values)) {
    for (auto& v : values_) {
      if (!std::isfinite(v)) throw Error(ErrorKind::invalid_input, "intensity is not finite");
      if (v < 0.0) {
        if (v < -1e-12) throw Error(ErrorKind::invalid_input, "intensity is negative");
        v = 0.0;
      }
    }
  }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t n) const { return values_[n]; }
  std::span<const double> values() const noexcept { return values_; }

  double max() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, v);
    return m;
  }

 private:
  std::vector<double> values_;
};

namespace detail {

inline void require_dimension_at_least_two(std::size_t m) {
  if (m < 2) throw Error(ErrorKind::invalid_dimension, "M must be at least 2, got " + std::to_string(m));
}

}  // namespace detail

/// Truncated discrete cosine: entry p is 2cos(2πpq/(4M-3)), p = 0..M-1.
inline DenseSignal cosine_vector(std::size_t m, std::ptrdiff_t q) {
  detail::require_dimension_at_least_two(m);
  const auto period = static_cast<std::ptrdiff_t>(symmetrized_period(m));
  const std::ptrdiff_t qr = ((q % period) + period) % period;
  std::vector<Complex> out(m);
  for (std::size_t p = 0; p < m; ++p) {
    // Reduce p*q mod P before scaling, as in the DFT kernel.
    const auto k = static_cast<std::size_t>((static_cast<std::ptrdiff_t>(p) * qr) % period);
    out[p] = 2.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(period));
  }
  return DenseSignal(std::move(out));
}

inline double modulation_margin(std::size_t m) {
  return std::sin(std::numbers::pi / static_cast<double>(2 * m - 1));
}

/// omega_k = e^{2πik/(2M-1)}, k = 0..M-1. The smallest |Im(omega_j conj(omega_k))|
/// is sin(π/(2M-1)), reached at |j - k| = M-1.
inline ModulationOperator modulation(std::size_t m) {
  detail::require_dimension_at_least_two(m);
  const double denom = static_cast<double>(2 * m - 1);
  std::vector<Complex> diag(m);
  for (std::size_t k = 0; k < m; ++k) diag[k] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / denom);
  ModulationOperator e(std::move(diag));
  if (e.min_ratio_imag() < modulation_margin(m) * (1.0 - 1e-9)) {
    throw Error(ErrorKind::numerical_degeneracy, "modulation ratios too close to the real axis");
  }
  return e;
}

/// {c_q}_{q=0}^{2M-2} followed by {E* c_q}_{q=1}^{2M-3}: 4M-4 columns.
inline MeasurementEnsemble build_4m4_ensemble(std::size_t m) {
  detail::require_dimension_at_least_two(m);
  const ModulationOperator e = modulation(m);
  std::vector<std::vector<Complex>> cols;
  cols.reserve(4 * m - 4);
  for (std::size_t q = 0; q <= 2 * m - 2; ++q) {
    const DenseSignal c = cosine_vector(m, static_cast<std::ptrdiff_t>(q));
    cols.emplace_back(c.entries().begin(), c.entries().end());
  }
  for (std::size_t q = 1; q <= 2 * m - 3; ++q) {
    const DenseSignal c = cosine_vector(m, static_cast<std::ptrdiff_t>(q));
    std::vector<Complex> col(m);
    for (std::size_t k = 0; k < m; ++k) col[k] = std::conj(e[k]) * c[k];
    cols.push_back(std::move(col));
  }
  return MeasurementEnsemble(m, std::move(cols), Field::complex);
}

/// M+1 unit vertices of the regular simplex centred at the origin of R^M.
///
/// The vertices are the images of the standard basis of R^{M+1} under the projection
/// onto the complement of the all-ones vector, written in an orthonormal basis of that
/// complement (Helmert contrasts) and rescaled to unit length.
inline MeasurementEnsemble simplex_frame(std::size_t m) {
  detail::require_dimension_at_least_two(m);
  const std::size_t n = m + 1;
  // Row j of the Helmert basis: (1,...,1,-j,0,...,0)/sqrt(j(j+1)) with j ones.
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t j = 1; j <= m; ++j) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(j * (j + 1)));
    for (std::size_t i = 0; i < j; ++i) basis(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(i)) = scale;
    basis(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(j)) = -static_cast<double>(j) * scale;
  }
  // The columns of `basis` are already the projected standard basis vectors, norm sqrt(M/(M+1)).
  const double rescale = std::sqrt(static_cast<double>(n) / static_cast<double>(m));
  std::vector<std::vector<double>> cols(n, std::vector<double>(m));
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t k = 0; k < m; ++k) cols[c][k] = rescale * basis(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c));
  }
  return MeasurementEnsemble::from_real_columns(m, cols);
}

/// Identity basis followed by delta_0 + delta_m, m = 1..M-1: 2M-1 columns.
inline MeasurementEnsemble spike_pair_ensemble(std::size_t m) {
  detail::require_dimension_at_least_two(m);
  std::vector<std::vector<double>> cols;
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<double> c(m, 0.0);
    c[k] = 1.0;
    cols.push_back(std::move(c));
  }
  for (std::size_t k = 1; k < m; ++k) {
    std::vector<double> c(m, 0.0);
    c[0] = 1.0;
    c[k] = 1.0;
    cols.push_back(std::move(c));
  }
  return MeasurementEnsemble::from_real_columns(m, cols);
}

/// values[n] = |<x, phi_n>|^2 with <x, y> = sum_k x[k] conj(y[k]).
inline IntensityVector measure(const MeasurementEnsemble& phi, const DenseSignal& x) {
  if (phi.dimension() != x.dimension()) {
    throw Error(ErrorKind::invalid_input, "signal dimension " + std::to_string(x.dimension()) +
                                              " does not match ensemble dimension " + std::to_string(phi.dimension()));
  }
  std::vector<double> values(phi.size());
  for (std::size_t n = 0; n < phi.size(); ++n) {
    Complex acc{};
    const auto& col = phi.column(n);
    for (std::size_t k = 0; k < x.dimension(); ++k) acc += x[k] * std::conj(col[k]);
    values[n] = std::norm(acc);
  }
  return IntensityVector(std::move(values));
}

}  // namespace phasekit
