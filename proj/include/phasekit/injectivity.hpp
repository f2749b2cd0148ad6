#pragma once

// Injectivity and almost-injectivity of real intensity maps.
//
// Verdicts come from subset rank conditions:
//   injective        <=> for every S, Phi_S or Phi_{S^c} spans R^M;
//   almost injective <=> the nonzero columns span R^M and
//                        rank Phi_S + rank Phi_{S^c} > M for every nonempty proper S.
// preimage_census is the brute-force ground truth both are tested against.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "phasekit/cyclic.hpp"
#include "phasekit/ensemble.hpp"
#include "phasekit/error.hpp"
#include "phasekit/rational.hpp"

namespace phasekit {

inline constexpr std::size_t kSubsetCapBits = 24;
inline constexpr std::size_t kCensusCapBits = 20;
/// Singular values below this fraction of the largest one count as zero.
inline constexpr double kRankTolerance = 1e-9;

using Subset = std::vector<std::size_t>;

struct SubsetVerdict {
  bool decision = true;
  /// Violating subset (0-based column indices) when decision is false.
  std::optional<Subset> witness;
};

/// Numeric rank of a real matrix by SVD with a relative threshold.
inline std::size_t numeric_rank(const Eigen::MatrixXd& a, double rel_tol = kRankTolerance) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > rel_tol * s(0)) ++r;
  }
  return r;
}

inline std::size_t numeric_rank(const Eigen::MatrixXcd& a, double rel_tol = kRankTolerance) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > rel_tol * s(0)) ++r;
  }
  return r;
}

/// Rank of column subsets of a real ensemble. Exact when every entry is a
/// small-denominator rational, SVD-based otherwise.
class SubsetRank {
 public:
  explicit SubsetRank(const MeasurementEnsemble& phi) : matrix_(phi.real_matrix()) {
    const auto rows = static_cast<std::size_t>(matrix_.rows());
    const auto cols = static_cast<std::size_t>(matrix_.cols());
    std::vector<std::vector<Rational>> exact(cols, std::vector<Rational>(rows));
    for (std::size_t c = 0; c < cols; ++c) {
      for (std::size_t r = 0; r < rows; ++r) {
        auto v = recognize_rational(matrix_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
        if (!v) return;
        exact[c][r] = std::move(*v);
      }
    }
    exact_columns_ = std::move(exact);
  }

  bool exact() const noexcept { return exact_columns_.has_value(); }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(matrix_.cols()); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }

  std::size_t rank(const Subset& cols) const {
    if (cols.empty()) return 0;
    if (exact_columns_) {
      // Columns as rows: rank is transpose invariant.
      RationalMatrix rows;
      rows.reserve(cols.size());
      for (std::size_t c : cols) rows.push_back((*exact_columns_)[c]);
      return exact_rank(rows);
    }
    Eigen::MatrixXd sub(matrix_.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = matrix_.col(static_cast<Eigen::Index>(cols[i]));
    return numeric_rank(sub);
  }

  bool orthogonal(std::size_t i, std::size_t j, double rel_tol = kRankTolerance) const {
    if (exact_columns_) {
      Rational acc = 0;
      const auto& a = (*exact_columns_)[i];
      const auto& b = (*exact_columns_)[j];
      for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
      return acc == 0;
    }
    const auto a = matrix_.col(static_cast<Eigen::Index>(i));
    const auto b = matrix_.col(static_cast<Eigen::Index>(j));
    return std::abs(a.dot(b)) <= rel_tol * a.norm() * b.norm();
  }

 private:
  Eigen::MatrixXd matrix_;
  std::optional<std::vector<std::vector<Rational>>> exact_columns_;
};

namespace detail {

inline Subset complement(const Subset& s, const Subset& universe) {
  Subset out;
  std::size_t i = 0;
  for (std::size_t u : universe) {
    if (i < s.size() && s[i] == u) {
      ++i;
    } else {
      out.push_back(u);
    }
  }
  return out;
}

/// Visits every subset of `items` that contains items[0], in lexicographic order
/// of the sorted index lists. Stops when `visit` returns true.
inline bool for_each_subset_with_first(const Subset& items, const std::function<bool(const Subset&)>& visit) {
  if (items.empty()) return false;
  Subset current{items[0]};
  std::function<bool(std::size_t)> descend = [&](std::size_t next) -> bool {
    if (visit(current)) return true;
    for (std::size_t j = next; j < items.size(); ++j) {
      current.push_back(items[j]);
      if (descend(j + 1)) return true;
      current.pop_back();
    }
    return false;
  };
  return descend(1);
}

inline Subset iota_subset(std::size_t n) {
  Subset s(n);
  std::iota(s.begin(), s.end(), std::size_t{0});
  return s;
}

inline void require_real(const MeasurementEnsemble& phi) {
  if (phi.field() != Field::real) throw Error(ErrorKind::unsupported_field, "check is defined for real ensembles only");
}

}  // namespace detail

/// Injectivity on R^M/{±1}: every S has Phi_S or Phi_{S^c} spanning.
inline SubsetVerdict has_complement_property(const MeasurementEnsemble& phi) {
  detail::require_real(phi);
  require_within_cap(phi.size(), kSubsetCapBits, "complement property");
  const SubsetRank oracle(phi);
  const std::size_t m = phi.dimension();
  const Subset all = detail::iota_subset(phi.size());
  if (oracle.rank(all) < m) return {false, Subset{}};

  SubsetVerdict verdict;
  detail::for_each_subset_with_first(all, [&](const Subset& s) {
    if (oracle.rank(s) == m || oracle.rank(detail::complement(s, all)) == m) return false;
    verdict = {false, s};
    return true;
  });
  return verdict;
}

/// Almost injectivity on R^M/{±1}. Zero columns are ignored. A non-spanning
/// ensemble reports the empty witness.
inline SubsetVerdict is_almost_injective(const MeasurementEnsemble& phi) {
  detail::require_real(phi);
  require_within_cap(phi.size(), kSubsetCapBits, "almost injectivity");
  const SubsetRank oracle(phi);
  const std::size_t m = phi.dimension();
  Subset nonzero;
  for (std::size_t n = 0; n < phi.size(); ++n) {
    if (oracle.rank({n}) > 0) nonzero.push_back(n);
  }
  if (oracle.rank(nonzero) < m) return {false, Subset{}};

  SubsetVerdict verdict;
  detail::for_each_subset_with_first(nonzero, [&](const Subset& s) {
    if (s.size() == nonzero.size()) return false;
    if (oracle.rank(s) + oracle.rank(detail::complement(s, nonzero)) > m) return false;
    verdict = {false, s};
    return true;
  });
  return verdict;
}

/// Every M-column subcollection spans.
inline bool is_full_spark(const MeasurementEnsemble& phi) {
  const std::size_t m = phi.dimension();
  const std::size_t n = phi.size();
  if (n < m) throw Error(ErrorKind::invalid_input, "full spark needs N >= M");
  require_within_cap(n, kSubsetCapBits, "full spark");

  std::optional<SubsetRank> real_oracle;
  if (phi.field() == Field::real) real_oracle.emplace(phi);
  auto spans = [&](const Subset& cols) {
    if (real_oracle) return real_oracle->rank(cols) == m;
    Eigen::MatrixXcd sub(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t c = 0; c < m; ++c) {
      for (std::size_t r = 0; r < m; ++r) sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = phi.column(cols[c])[r];
    }
    return numeric_rank(sub) == m;
  };

  Subset pick(m);
  std::iota(pick.begin(), pick.end(), std::size_t{0});
  while (true) {
    if (!spans(pick)) return false;
    // Next combination in lexicographic order.
    std::size_t i = m;
    while (i > 0 && pick[i - 1] == n - m + (i - 1)) --i;
    if (i == 0) return true;
    ++pick[i - 1];
    for (std::size_t j = i; j < m; ++j) pick[j] = pick[j - 1] + 1;
  }
}

/// Unit norm tight frame: unit columns and Phi Phi^T = (N/M) I, both within tol.
inline bool is_untf(const MeasurementEnsemble& phi, double tol = 1e-10) {
  detail::require_real(phi);
  const Eigen::MatrixXd a = phi.real_matrix();
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    if (std::abs(a.col(c).norm() - 1.0) > tol) return false;
  }
  const double bound = static_cast<double>(phi.size()) / static_cast<double>(phi.dimension());
  const Eigen::MatrixXd gap = a * a.transpose() - bound * Eigen::MatrixXd::Identity(a.rows(), a.rows());
  return gap.cwiseAbs().maxCoeff() <= tol;
}

/// Nonempty proper S with span(Phi_S) orthogonal to span(Phi_{S^c}), lexicographically first.
inline std::optional<Subset> find_orthogonal_partition(const MeasurementEnsemble& phi) {
  detail::require_real(phi);
  require_within_cap(phi.size(), kSubsetCapBits, "orthogonal partition search");
  const SubsetRank oracle(phi);
  const std::size_t n = phi.size();
  std::vector<std::vector<bool>> orth(n, std::vector<bool>(n, true));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) orth[i][j] = orth[j][i] = oracle.orthogonal(i, j);
  }
  const Subset all = detail::iota_subset(n);
  std::optional<Subset> found;
  detail::for_each_subset_with_first(all, [&](const Subset& s) {
    if (s.size() == n) return false;
    const Subset rest = detail::complement(s, all);
    for (std::size_t i : s) {
      for (std::size_t j : rest) {
        if (!orth[i][j]) return false;
      }
    }
    found = s;
    return true;
  });
  return found;
}

/// gcd(M, N) == 1: every UNTF of N vectors in R^M is then almost injective.
inline bool coprime_untf_guarantee(std::size_t m, std::size_t n) { return std::gcd(m, n) == 1; }

namespace detail {

/// Nonzero u orthogonal to every column in `cols`, if one exists.
inline std::optional<Eigen::VectorXd> orthogonal_vector(const Eigen::MatrixXd& a, const Subset& cols) {
  const Eigen::Index m = a.rows();
  if (cols.empty()) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
    u(0) = 1.0;
    return u;
  }
  Eigen::MatrixXd sub(m, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = a.col(static_cast<Eigen::Index>(cols[i]));
  // Left singular vectors past the rank span the orthogonal complement.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeFullU);
  const std::size_t r = numeric_rank(sub);
  if (r >= static_cast<std::size_t>(m)) return std::nullopt;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
  // Mix all complement directions so the probe is not axis-aligned.
  for (Eigen::Index k = static_cast<Eigen::Index>(r); k < m; ++k) u += (1.0 + 0.5 * static_cast<double>(k)) * svd.matrixU().col(k);
  return u;
}

inline DenseSignal to_signal(const Eigen::VectorXd& v) {
  std::vector<Complex> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v(i);
  return DenseSignal(std::move(out));
}

}  // namespace detail

/// For a subset S where neither side has trivial orthogonal complement, returns
/// (u + v, u - v) with u ⟂ Phi_S and v ⟂ Phi_{S^c}, u, v nonzero: two signals with
/// equal intensities that are not sign-equivalent.
inline std::optional<std::pair<DenseSignal, DenseSignal>> confusable_pair(const MeasurementEnsemble& phi, const Subset& s) {
  detail::require_real(phi);
  const Eigen::MatrixXd a = phi.real_matrix();
  const Subset rest = detail::complement(s, detail::iota_subset(phi.size()));
  auto u = detail::orthogonal_vector(a, s);
  auto v = detail::orthogonal_vector(a, rest);
  if (!u || !v) return std::nullopt;
  // Avoid u = ±v (possible when S is empty): then u + v or u - v vanishes.
  if (std::abs(std::abs(u->normalized().dot(v->normalized())) - 1.0) < 1e-9 && s.empty()) {
    Eigen::VectorXd alt = Eigen::VectorXd::Zero(a.rows());
    alt(a.rows() > 1 ? 1 : 0) = 1.0;
    *u = alt + 0.3 * *v;
  }
  return std::make_pair(detail::to_signal(*u + *v), detail::to_signal(*u - *v));
}

/// All sign-equivalence classes {±y} with |<y, phi_n>| = |<x, phi_n>| for every n,
/// found by solving <y, phi_n> = eps_n <x, phi_n> over all sign patterns eps. The
/// class of x comes first.
inline std::vector<DenseSignal> preimage_census(const MeasurementEnsemble& phi, const DenseSignal& x,
                                                double tol = 1e-8) {
  detail::require_real(phi);
  if (!x.is_real()) throw Error(ErrorKind::invalid_input, "census needs a real signal");
  if (x.dimension() != phi.dimension()) throw Error(ErrorKind::invalid_input, "signal/ensemble dimension mismatch");
  const std::size_t n = phi.size();
  require_within_cap(n, kCensusCapBits, "preimage census");
  if (n == 0) return {x};

  const Eigen::MatrixXd at = phi.real_matrix().transpose();
  Eigen::VectorXd xv(static_cast<Eigen::Index>(x.dimension()));
  for (std::size_t k = 0; k < x.dimension(); ++k) xv(static_cast<Eigen::Index>(k)) = x[k].real();
  const Eigen::VectorXd coeffs = at * xv;
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> solver(at);
  const double scale = std::max(coeffs.norm(), xv.norm());
  const double accept = tol * std::max(scale, 1e-300);

  // x itself always solves the eps = +1 system; list it first even when Phi does not span.
  std::vector<Eigen::VectorXd> classes{xv};
  const std::uint64_t patterns = std::uint64_t{1} << (n - 1);
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    Eigen::VectorXd rhs = coeffs;
    for (std::size_t i = 1; i < n; ++i) {
      if ((mask >> (i - 1)) & 1U) rhs(static_cast<Eigen::Index>(i)) = -rhs(static_cast<Eigen::Index>(i));
    }
    const Eigen::VectorXd y = solver.solve(rhs);
    if ((at * y - rhs).norm() > accept) continue;
    bool seen = false;
    for (const auto& c : classes) {
      if (std::min((c - y).norm(), (c + y).norm()) <= 1e3 * accept) {
        seen = true;
        break;
      }
    }
    if (!seen) classes.push_back(y);
  }
  std::vector<DenseSignal> out;
  out.reserve(classes.size());
  for (const auto& c : classes) out.push_back(detail::to_signal(c));
  return out;
}

/// True when the census is exactly {±x}.
inline bool census_is_trivial(const std::vector<DenseSignal>& census, const DenseSignal& x, double tol = 1e-6) {
  if (census.size() != 1) return false;
  const double scale = std::max(x.norm(), 1e-300);
  double plus = 0.0, minus = 0.0;
  for (std::size_t k = 0; k < x.dimension(); ++k) {
    plus += std::norm(census[0][k] - x[k]);
    minus += std::norm(census[0][k] + x[k]);
  }
  return std::sqrt(std::min(plus, minus)) <= tol * scale || (x.norm() == 0.0 && census[0].norm() == 0.0);
}

}  // namespace phasekit
