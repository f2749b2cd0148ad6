#pragma once

// JSON interchange: every document is {"kind", "version": "1", "payload"}.
// Complex numbers are [re, im] pairs and rationals are "p/q" strings.

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phasekit/cyclic.hpp"
#include "phasekit/ensemble.hpp"
#include "phasekit/error.hpp"
#include "phasekit/hardness.hpp"
#include "phasekit/rational.hpp"

namespace phasekit::io {

using nlohmann::json;

inline constexpr const char* kVersion = "1";

inline json envelope(const std::string& kind, json payload) {
  return json{{"kind", kind}, {"version", kVersion}, {"payload", std::move(payload)}};
}

/// Checks kind and version and returns the payload.
inline const json& open(const json& doc, const std::string& kind) {
  if (!doc.is_object() || !doc.contains("kind") || !doc.contains("version") || !doc.contains("payload")) {
    throw Error(ErrorKind::invalid_input, "not a phasekit JSON document");
  }
  if (doc.at("kind") != kind) {
    throw Error(ErrorKind::invalid_input, "expected a '" + kind + "' document, got '" +
                                              doc.at("kind").get<std::string>() + "'");
  }
  if (doc.at("version") != kVersion) throw Error(ErrorKind::invalid_input, "unsupported document version");
  return doc.at("payload");
}

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::invalid_input, "complex value must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json complex_list(std::span<const Complex> values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(complex_to_json(v));
  return out;
}

inline std::vector<Complex> complex_list_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::invalid_input, "expected a list of complex values");
  std::vector<Complex> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(complex_from_json(v));
  return out;
}

// --- signal ---------------------------------------------------------------

inline json signal_payload(const DenseSignal& x) {
  return json{{"M", x.dimension()}, {"entries", complex_list(x.entries())}};
}

inline json to_json(const DenseSignal& x) { return envelope("signal", signal_payload(x)); }

inline DenseSignal signal_from_json(const json& doc) {
  const json& p = open(doc, "signal");
  auto entries = complex_list_from_json(p.at("entries"));
  if (p.contains("M") && p.at("M").get<std::size_t>() != entries.size()) {
    throw Error(ErrorKind::invalid_input, "signal length does not match M");
  }
  return DenseSignal(std::move(entries));
}

// --- ensemble -------------------------------------------------------------

inline json to_json(const MeasurementEnsemble& phi) {
  json cols = json::array();
  for (const auto& c : phi.columns()) cols.push_back(complex_list(c));
  return envelope("ensemble", json{{"M", phi.dimension()},
                                   {"N", phi.size()},
                                   {"field", to_string(phi.field())},
                                   {"columns", std::move(cols)}});
}

inline MeasurementEnsemble ensemble_from_json(const json& doc) {
  const json& p = open(doc, "ensemble");
  const auto m = p.at("M").get<std::size_t>();
  const auto field_name = p.at("field").get<std::string>();
  if (field_name != "real" && field_name != "complex") throw Error(ErrorKind::invalid_input, "unknown field tag");
  std::vector<std::vector<Complex>> cols;
  for (const auto& c : p.at("columns")) cols.push_back(complex_list_from_json(c));
  if (p.contains("N") && p.at("N").get<std::size_t>() != cols.size()) {
    throw Error(ErrorKind::invalid_input, "column count does not match N");
  }
  return MeasurementEnsemble(m, std::move(cols), field_name == "real" ? Field::real : Field::complex);
}

// --- intensities ----------------------------------------------------------

inline json to_json(const IntensityVector& v) {
  return envelope("intensities", json{{"N", v.size()}, {"values", std::vector<double>(v.values().begin(), v.values().end())}});
}

inline IntensityVector intensities_from_json(const json& doc) {
  const json& p = open(doc, "intensities");
  auto values = p.at("values").get<std::vector<double>>();
  if (p.contains("N") && p.at("N").get<std::size_t>() != values.size()) {
    throw Error(ErrorKind::invalid_input, "intensity count does not match N");
  }
  return IntensityVector(std::move(values));
}

// --- reduction ------------------------------------------------------------

inline json rational_list(const std::vector<Rational>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(to_string(v));
  return out;
}

inline std::vector<Rational> rational_list_from_json(const json& j) {
  std::vector<Rational> out;
  for (const auto& v : j) out.push_back(parse_rational(v.get<std::string>()));
  return out;
}

inline json reduction_payload(const ReductionInstance& r) {
  return json{{"M", r.m}, {"N", r.b.size()}, {"ensemble", r.ensemble_id}, {"b", rational_list(r.b)}};
}

inline json to_json(const ReductionInstance& r) { return envelope("reduction", reduction_payload(r)); }

inline ReductionInstance reduction_from_json(const json& doc) {
  const json& p = open(doc, "reduction");
  ReductionInstance r;
  r.m = p.at("M").get<std::size_t>();
  r.b = rational_list_from_json(p.at("b"));
  r.ensemble_id = p.value("ensemble", std::string(kDefaultFamilyId));
  if (r.b.size() != r.m + 1) throw Error(ErrorKind::invalid_input, "reduction needs M+1 magnitudes");
  return r;
}

/// Reduction document with both oracle verdicts attached.
inline json to_json(const ReductionCertificate& cert) {
  json p = reduction_payload(cert.instance);
  p["subset_sum"] = cert.subset_sum;
  p["consistent"] = cert.witness.has_value();
  p["agree"] = cert.agree();
  p["witness"] = cert.witness ? rational_list(*cert.witness) : json(nullptr);
  return envelope("reduction", std::move(p));
}

// --- report ---------------------------------------------------------------

inline json report(json payload) { return envelope("report", std::move(payload)); }

inline json report_from_json(const json& doc) { return open(doc, "report"); }

}  // namespace phasekit::io
