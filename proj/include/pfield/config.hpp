#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pfield/fbs.hpp"
#include "pfield/fields.hpp"
#include "pfield/rng.hpp"
#include "pfield/stats.hpp"

namespace pfield {

/// Invalid configuration; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const char* version_string() { return "partition_fields " PFIELD_VERSION; }

struct RenewalRequest {
  double alpha = 0.0;
  std::int64_t kmax = 0;
  std::int64_t n = 0;  // 0: no weights
  friend bool operator==(const RenewalRequest&, const RenewalRequest&) = default;
};

struct RunConfig {
  std::string command;  // simulate | verify | renewal | sample-fbs
  std::optional<ModelSpec> model;
  CornerGrid grid;
  std::size_t R = 1;
  Seed128 seed{};
  std::string output = "pfield_out";
  std::string format = "csv";  // csv | json
  std::string suite;           // verify only
  std::optional<RenewalRequest> renewal;
  std::optional<HurstPair> hurst;
  /// Execution setting only: never echoed into outputs and ignored by ==.
  std::size_t parallelism = 0;

  friend bool operator==(const RunConfig& a, const RunConfig& b);
};

inline bool operator==(const HurstPair& a, const HurstPair& b) { return a.H1 == b.H1 && a.H2 == b.H2; }

/// Parses and validates. Unknown fields anywhere are rejected. Throws ConfigError.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig parse_run_config_text(const std::string& text);
/// Echo form (parallelism omitted); parse_run_config inverts it.
nlohmann::json to_json(const RunConfig& cfg);

nlohmann::json to_json(const ModelSpec& spec);
nlohmann::json to_json(const CornerGrid& grid);
nlohmann::json to_json(const ReplicateReport& rep);
nlohmann::json to_json(const IdentityRecord& rec);

/// 17 significant digits, shortest form that round-trips.
std::string format_double(double v);

struct CheckRow {
  std::string test;
  double analytic = 0.0;
  double estimate = 0.0;
  double se = 0.0;
  bool pass = false;
  /// Diagnostic rows are reported but never fail the suite.
  bool gating = true;
};

struct VerifyResult {
  std::string suite;
  std::vector<CheckRow> checks;
  nlohmann::json report;
  bool all_pass() const;
};

inline const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> s = {"occupancy", "variance", "covariance", "normality",
                                             "renewal-asymptotics"};
  return s;
}

/// Runs a verify suite. Throws ConfigError for preconditions (e.g. R too small).
VerifyResult run_verify(const RunConfig& cfg);

/// CSV "test,analytic,estimate,se,pass,gating".
std::string checks_csv(const std::vector<CheckRow>& rows);

}  // namespace pfield
