#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

namespace phasekit {

enum class ErrorKind {
  invalid_dimension,
  invalid_embedding,
  invalid_input,
  degenerate_pivot,
  not_an_autocorrelation_pair,
  numerical_degeneracy,
  unsupported_signal,
  unsupported_field,
  size_limit,
  invalid_family,
  invalid_ensemble,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_dimension: return "invalid-dimension";
    case ErrorKind::invalid_embedding: return "invalid-embedding";
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::degenerate_pivot: return "degenerate-pivot";
    case ErrorKind::not_an_autocorrelation_pair: return "not-an-autocorrelation-pair";
    case ErrorKind::numerical_degeneracy: return "numerical-degeneracy";
    case ErrorKind::unsupported_signal: return "unsupported-signal";
    case ErrorKind::unsupported_field: return "unsupported-field";
    case ErrorKind::size_limit: return "size-limit";
    case ErrorKind::invalid_family: return "invalid-family";
    case ErrorKind::invalid_ensemble: return "invalid-ensemble";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Enumeration cap for exhaustive subset / sign-pattern searches.
/// PHASEKIT_MAX_SUBSET_BITS, when set to a positive integer, replaces every default cap.
inline std::size_t enumeration_cap(std::size_t default_bits) {
  if (const char* env = std::getenv("PHASEKIT_MAX_SUBSET_BITS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0 && value < 63) {
      return static_cast<std::size_t>(value);
    }
  }
  return default_bits;
}

inline void require_within_cap(std::size_t n, std::size_t default_bits, std::string_view what) {
  const std::size_t cap = enumeration_cap(default_bits);
  if (n > cap) {
    throw Error(ErrorKind::size_limit, std::string(what) + " needs " + std::to_string(n) +
                                           " enumeration bits, cap is " + std::to_string(cap));
  }
}

}  // namespace phasekit
