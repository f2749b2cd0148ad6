// phasekit command-line front end. stdout carries JSON only; messages go to stderr.
//
// Exit codes: 0 success, 1 selftest failure, 2 bad input / size cap / unsupported
// field, 3 intensities that admit no (supported) signal.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "phasekit/phasekit.hpp"
#include "phasekit/selftest.hpp"

namespace {

using nlohmann::json;
using namespace phasekit;

constexpr int kExitSelftest = 1;
constexpr int kExitInput = 2;
constexpr int kExitInconsistent = 3;

json read_document(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::invalid_input, "cannot open '" + path + "'");
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::invalid_input, "'" + path + "' is not valid JSON: " + e.what());
  }
}

void emit(const json& doc) { std::cout << doc.dump(2) << '\n'; }

json one_based(const std::optional<Subset>& s) {
  if (!s) return nullptr;
  json out = json::array();
  for (std::size_t i : *s) out.push_back(i + 1);
  return out;
}

json verdict_json(const SubsetVerdict& v) { return json{{"decision", v.decision}, {"witness", one_based(v.witness)}}; }

MeasurementEnsemble subset_family_ensemble(std::size_t m) {
  const RationalEnsemble fam = default_family(m);
  std::vector<std::vector<double>> cols;
  for (const auto& c : fam.columns()) {
    std::vector<double> col;
    for (const auto& v : c) col.push_back(to_double(v));
    cols.push_back(std::move(col));
  }
  return MeasurementEnsemble::from_real_columns(m, cols);
}

int cmd_design(const std::string& kind, std::size_t m) {
  if (m < 2) throw Error(ErrorKind::invalid_dimension, "M must be at least 2, got " + std::to_string(m));
  if (kind == "4m4") emit(io::to_json(build_4m4_ensemble(m)));
  else if (kind == "spike-pair") emit(io::to_json(spike_pair_ensemble(m)));
  else if (kind == "simplex") emit(io::to_json(simplex_frame(m)));
  else emit(io::to_json(subset_family_ensemble(m)));
  return 0;
}

int cmd_measure(const std::string& ensemble_path, const std::string& signal_path) {
  const auto phi = io::ensemble_from_json(read_document(ensemble_path));
  const auto x = io::signal_from_json(read_document(signal_path));
  emit(io::to_json(measure(phi, x)));
  return 0;
}

int cmd_recover(const std::string& kind, std::size_t m, const std::string& intensities_path) {
  const auto intensities = io::intensities_from_json(read_document(intensities_path));
  const RecoveryResult result =
      kind == "4m4" ? retrieve_4m4(intensities, m) : retrieve_spike_pair(intensities, m);
  json payload = io::signal_payload(result.estimate);
  payload["residual"] = result.residual;
  payload["support_index"] = result.support_index ? json(*result.support_index) : json(nullptr);
  emit(io::envelope("signal", std::move(payload)));
  if (result.residual > kConsistencyTolerance) {
    std::cerr << "intensities are inconsistent: residual " << result.residual << '\n';
    return kExitInconsistent;
  }
  return 0;
}

int cmd_analyze(const std::string& ensemble_path, const std::vector<std::string>& checks) {
  const auto phi = io::ensemble_from_json(read_document(ensemble_path));
  json results = json::object();
  for (const auto& check : checks) {
    if (check == "injective") {
      results[check] = verdict_json(has_complement_property(phi));
    } else if (check == "almost-injective") {
      results[check] = verdict_json(is_almost_injective(phi));
    } else if (check == "full-spark") {
      if (phi.size() < phi.dimension()) {
        results[check] = json{{"decision", false}, {"note", "fewer vectors than the dimension"}};
      } else {
        results[check] = json{{"decision", is_full_spark(phi)}};
      }
    } else if (check == "untf") {
      results[check] = json{{"decision", is_untf(phi)},
                            {"coprime", coprime_untf_guarantee(phi.dimension(), phi.size())}};
    } else {
      const auto s = find_orthogonal_partition(phi);
      results[check] = json{{"decision", s.has_value()}, {"witness", one_based(s)}};
    }
  }
  emit(io::report(json{{"M", phi.dimension()}, {"N", phi.size()}, {"checks", std::move(results)}}));
  return 0;
}

std::vector<std::int64_t> parse_integers(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::invalid_input, "not an integer: '" + item + "'");
    }
  }
  return out;
}

int cmd_reduce(const std::string& a_text, std::int64_t z, bool verify) {
  const auto a = parse_integers(a_text);
  if (verify) {
    emit(io::to_json(certify_reduction(a, z)));
  } else {
    emit(io::to_json(reduce_subset_sum(a, z)));
  }
  return 0;
}

int cmd_selftest(std::uint64_t seed) {
  const auto results = selftest::run_all(seed);
  json criteria = json::array();
  std::vector<std::string> failing;
  for (const auto& r : results) {
    std::cerr << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << ": " << r.detail << '\n';
    criteria.push_back(json{{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"data", r.data}});
    if (!r.pass) failing.push_back(r.name);
  }
  emit(io::report(json{{"seed", seed}, {"pass", failing.empty()}, {"criteria", std::move(criteria)}}));
  if (!failing.empty()) {
    std::cerr << "failing suites:";
    for (const auto& f : failing) std::cerr << "\n  " << f;
    std::cerr << '\n';
    return kExitSelftest;
  }
  return 0;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::not_an_autocorrelation_pair:
    case ErrorKind::unsupported_signal:
    case ErrorKind::degenerate_pivot:
      return kExitInconsistent;
    default:
      return kExitInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phase retrieval toolkit"};
  app.require_subcommand(1);

  std::string kind;
  std::size_t m = 0;
  std::string ensemble_path, signal_path, intensities_path;
  std::vector<std::string> checks{"injective", "almost-injective", "full-spark", "untf", "partition"};
  std::string a_text;
  std::int64_t z = 0;
  bool verify = false;
  std::uint64_t seed = 0;

  auto* design = app.add_subcommand("design", "emit a measurement ensemble");
  design->add_option("kind", kind, "ensemble kind")
      ->required()
      ->check(CLI::IsMember({"4m4", "spike-pair", "simplex", "subset-family"}));
  design->add_option("--m", m, "signal dimension")->required();

  auto* meas = app.add_subcommand("measure", "intensities of a signal under an ensemble");
  meas->add_option("--ensemble", ensemble_path, "ensemble JSON file ('-' for stdin)")->required();
  meas->add_option("--signal", signal_path, "signal JSON file ('-' for stdin)")->required();

  auto* recover = app.add_subcommand("recover", "recover a signal from intensities");
  recover->add_option("kind", kind, "ensemble kind")->required()->check(CLI::IsMember({"4m4", "spike-pair"}));
  recover->add_option("--m", m, "signal dimension")->required();
  recover->add_option("--intensities", intensities_path, "intensities JSON file ('-' for stdin)")->required();

  auto* analyze = app.add_subcommand("analyze", "injectivity and frame checks for a real ensemble");
  analyze->add_option("--ensemble", ensemble_path, "ensemble JSON file ('-' for stdin)")->required();
  analyze->add_option("--checks", checks, "checks to run")
      ->delimiter(',')
      ->check(CLI::IsMember({"injective", "almost-injective", "full-spark", "untf", "partition"}));

  auto* reduce = app.add_subcommand("reduce", "SubsetSum to ConsistentIntensities reduction");
  reduce->add_option("--a", a_text, "comma-separated integers")->required();
  reduce->add_option("--z", z, "target sum")->required()->allow_extra_args(false);
  reduce->add_flag("--verify", verify, "run both brute-force oracles");

  auto* self = app.add_subcommand("selftest", "run the acceptance suite");
  self->add_option("--seed", seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*design) return cmd_design(kind, m);
    if (*meas) return cmd_measure(ensemble_path, signal_path);
    if (*recover) return cmd_recover(kind, m, intensities_path);
    if (*analyze) return cmd_analyze(ensemble_path, checks);
    if (*reduce) return cmd_reduce(a_text, z, verify);
    if (*self) return cmd_selftest(seed);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
