#pragma once

// SubsetSum -> ConsistentIntensities reduction for full-spark (M+1)-vector
// ensembles, with exhaustive exact-arithmetic oracles for both problems.
//
// Given integers a_1..a_M and z, write the family member as Psi^{-1} Phi_M = [I w]
// and set b_n = |a_n / w_n| (n <= M), b_{M+1} = |2z - sum a_m|. A signal x with
// |<x, phi_n>| = b_n exists iff some subset of the a_m sums to z.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phasekit/error.hpp"
#include "phasekit/rational.hpp"

namespace phasekit {

inline constexpr std::size_t kConsistentCapBits = 20;
inline constexpr std::size_t kSubsetSumCapBits = 24;
inline constexpr std::size_t kVerifyCapElements = 16;

/// Real ensemble with exact rational entries, stored column by column.
class RationalEnsemble {
 public:
  RationalEnsemble(std::size_t dimension, std::vector<std::vector<Rational>> columns, std::string id = "custom")
      : dimension_(dimension), columns_(std::move(columns)), id_(std::move(id)) {
    if (dimension_ == 0) throw Error(ErrorKind::invalid_dimension, "ensemble dimension must be positive");
    for (const auto& c : columns_) {
      if (c.size() != dimension_) throw Error(ErrorKind::invalid_input, "ensemble column length mismatch");
    }
  }

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return columns_.size(); }
  const std::vector<Rational>& column(std::size_t n) const { return columns_.at(n); }
  const std::vector<std::vector<Rational>>& columns() const noexcept { return columns_; }
  const std::string& id() const noexcept { return id_; }

  Rational inner(const std::vector<Rational>& x, std::size_t n) const {
    Rational acc = 0;
    const auto& c = columns_[n];
    for (std::size_t k = 0; k < dimension_; ++k) acc += x[k] * c[k];
    return acc;
  }

 private:
  std::size_t dimension_;
  std::vector<std::vector<Rational>> columns_;
  std::string id_;
};

using FamilyProvider = std::function<RationalEnsemble(std::size_t)>;

inline constexpr const char* kDefaultFamilyId = "identity-plus-ones";

/// [I | 1]: the identity columns followed by the all-ones column.
inline RationalEnsemble default_family(std::size_t m) {
  if (m < 1) throw Error(ErrorKind::invalid_dimension, "family dimension must be positive");
  std::vector<std::vector<Rational>> cols;
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<Rational> c(m, Rational(0));
    c[k] = 1;
    cols.push_back(std::move(c));
  }
  cols.emplace_back(m, Rational(1));
  return RationalEnsemble(m, std::move(cols), kDefaultFamilyId);
}

/// w with Psi w = phi_{M+1}, Psi the first M columns. Throws invalid-family unless
/// Psi is invertible and w has no zero entry (equivalently, the ensemble is full spark).
inline std::vector<Rational> family_weights(const RationalEnsemble& phi) {
  const std::size_t m = phi.dimension();
  if (phi.size() != m + 1) throw Error(ErrorKind::invalid_family, "family member must have M+1 columns");
  RationalMatrix psi(m, std::vector<Rational>(m));
  std::vector<Rational> last(m);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < m; ++c) psi[r][c] = phi.column(c)[r];
    last[r] = phi.column(m)[r];
  }
  auto w = exact_solve(psi, last);
  if (!w) throw Error(ErrorKind::invalid_family, "first M columns are not a basis");
  for (const auto& v : *w) {
    if (v == 0) throw Error(ErrorKind::invalid_family, "ensemble is not full spark (zero weight)");
  }
  return *w;
}

/// A ConsistentIntensities query: does some x in R^M have |<x, phi_n>| = b_n for all n?
struct ReductionInstance {
  std::size_t m = 0;
  std::vector<Rational> b;
  std::string ensemble_id;
};

inline ReductionInstance reduce_subset_sum(const std::vector<std::int64_t>& a, std::int64_t z,
                                           const FamilyProvider& family = default_family) {
  if (a.empty()) throw Error(ErrorKind::invalid_input, "SubsetSum instance needs at least one integer");
  const std::size_t m = a.size();
  const RationalEnsemble phi = family(m);
  if (phi.dimension() != m) throw Error(ErrorKind::invalid_family, "family returned the wrong dimension");
  const std::vector<Rational> w = family_weights(phi);

  ReductionInstance out{m, {}, phi.id()};
  out.b.reserve(m + 1);
  BigInt total = 0;
  for (std::size_t k = 0; k < m; ++k) {
    out.b.push_back(boost::multiprecision::abs(Rational(a[k]) / w[k]));
    total += a[k];
  }
  out.b.emplace_back(boost::multiprecision::abs(BigInt(2) * z - total));
  return out;
}

/// First exact x with |<x, phi_n>| = b_n for every n, searching sign patterns in
/// increasing order with eps_0 = +1; nullopt if none exists.
inline std::optional<std::vector<Rational>> brute_force_consistent(const RationalEnsemble& phi,
                                                                   const std::vector<Rational>& b) {
  const std::size_t n = phi.size();
  const std::size_t m = phi.dimension();
  if (b.size() != n) throw Error(ErrorKind::invalid_input, "need one magnitude per ensemble vector");
  require_within_cap(n, kConsistentCapBits, "consistent-intensities search");
  for (const auto& v : b) {
    if (v < 0) throw Error(ErrorKind::invalid_input, "magnitudes must be nonnegative");
  }

  // Pick M linearly independent columns; the rows of Phi^T they index determine x.
  std::vector<std::vector<BigInt>> ints;
  {
    RationalMatrix rows;
    for (std::size_t k = 0; k < m; ++k) {
      std::vector<Rational> row(n);
      for (std::size_t c = 0; c < n; ++c) row[c] = phi.column(c)[k];
      rows.push_back(std::move(row));
    }
    ints = detail::clear_row_denominators(rows);
  }
  std::vector<std::size_t> basis;
  if (detail::bareiss_rank(ints, &basis) < m) {
    throw Error(ErrorKind::invalid_ensemble, "ensemble does not span R^M");
  }
  RationalMatrix sub(m, std::vector<Rational>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < m; ++k) sub[i][k] = phi.column(basis[i])[k];
  }
  const auto inv = exact_inverse(sub);
  if (!inv) throw Error(ErrorKind::invalid_ensemble, "basis selection is singular");

  const std::uint64_t patterns = n == 0 ? 1 : (std::uint64_t{1} << (n - 1));
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    auto sign = [&](std::size_t i) { return (i > 0 && ((mask >> (i - 1)) & 1U)) ? -1 : 1; };
    std::vector<Rational> x(m, Rational(0));
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t col = basis[i];
        x[r] += (*inv)[r][i] * (sign(col) * b[col]);
      }
    }
    bool ok = true;
    for (std::size_t c = 0; c < n && ok; ++c) ok = phi.inner(x, c) == sign(c) * b[c];
    if (ok) return x;
  }
  return std::nullopt;
}

/// Does some sub-multiset of `a` (the empty one included) sum to z?
inline bool brute_force_subset_sum(const std::vector<std::int64_t>& a, std::int64_t z) {
  require_within_cap(a.size(), kSubsetSumCapBits, "subset-sum search");
  const std::uint64_t count = std::uint64_t{1} << a.size();
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if ((mask >> i) & 1U) s += a[i];
    }
    if (s == z) return true;
  }
  return false;
}

struct ReductionCertificate {
  ReductionInstance instance;
  bool subset_sum = false;
  std::optional<std::vector<Rational>> witness;
  bool agree() const { return subset_sum == witness.has_value(); }
};

inline ReductionCertificate certify_reduction(const std::vector<std::int64_t>& a, std::int64_t z,
                                              const FamilyProvider& family = default_family) {
  if (a.size() > enumeration_cap(kVerifyCapElements)) {
    throw Error(ErrorKind::size_limit, "verification is capped at " +
                                           std::to_string(enumeration_cap(kVerifyCapElements)) + " integers");
  }
  ReductionCertificate cert{reduce_subset_sum(a, z, family), false, std::nullopt};
  cert.witness = brute_force_consistent(family(a.size()), cert.instance.b);
  cert.subset_sum = brute_force_subset_sum(a, z);
  return cert;
}

/// Both oracles agree on (a, z).
inline bool verify_reduction(const std::vector<std::int64_t>& a, std::int64_t z,
                             const FamilyProvider& family = default_family) {
  return certify_reduction(a, z, family).agree();
}

}  // namespace phasekit
