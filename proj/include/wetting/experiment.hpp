#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wetting/chalker.hpp"
#include "wetting/error.hpp"
#include "wetting/oracle.hpp"
#include "wetting/sampler.hpp"

namespace wetting {

enum class Mode { Run, Sweep, Oracle, Verify };

std::string to_string(Mode mode);

struct ExperimentConfig {
  Mode mode = Mode::Run;
  int dim = 1;
  std::vector<int> sides;
  std::string interaction = "sos";
  std::string pinning = "none";
  std::vector<double> epsilons;
  std::vector<double> well_depths;   // a
  std::vector<double> well_weights;  // b
  Kernel kernel = Kernel::HeatBath;
  SweepOrder order = SweepOrder::Sequential;
  std::int64_t sweeps = 10000;
  std::int64_t burn_in = 2000;
  std::int64_t thinning = 1;
  std::uint64_t seed = 1;
  double step_width = 1.0;
  Initialization init = Initialization::Exponential;
  double init_height = 1.0;
  int threads = 1;
  int replicates = 1;
  int jobs = 1;
  /// CSV path; "-" writes to stdout and skips the manifest.
  std::string output;
  std::optional<std::int64_t> tail_m;
  std::optional<double> cutoff;
  int nodes_per_unit = 32;
  double target_rel_error = 1e-8;
  VerifyOptions verify;

  /// Resolved key=value echo, in key order, for the manifest.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

struct ConfigIssue {
  /// 1-based line in the config text; 0 for command-line overrides and
  /// whole-config constraints.
  int line = 0;
  std::string key;
  std::string message;
};

class ConfigError : public ParameterError {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Parses key=value lines ('#' starts a comment); `overrides` are applied
/// after the file. Collects every problem before throwing ConfigError.
ExperimentConfig parse_config(std::string_view text, Mode mode, const Overrides& overrides = {});

/// Keys accepted by parse_config, in canonical order.
const std::vector<std::string>& config_keys();

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns{
      "run_id",      "mode",          "method",       "d",              "N",
      "interaction", "pinning",       "epsilon",      "a",              "b",
      "kernel",      "sweeps",        "burn_in",      "thinning",       "seed",
      "rho_mean",    "rho_se",        "nu_mean",      "nu_se",          "mean_height",
      "mean_height_se", "center_height_mean", "max_height_mean", "accept_rate", "tail_M",
      "tail_prob",   "tail_prob_se"};
  return columns;
}

/// One CSV row; empty strings are inapplicable fields.
using CsvRow = std::vector<std::string>;

struct ExperimentResult {
  std::vector<CsvRow> rows;
  std::vector<VerifyRow> verify;
  bool verify_passed = true;
  /// Per-row seeds, aligned with rows.
  std::vector<std::uint64_t> seeds;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

void write_csv(std::ostream& out, const ExperimentResult& result);
void write_verify_table(std::ostream& out, const ExperimentResult& result);

/// Config echo, version, per-row seeds and a UTC timestamp.
nlohmann::json make_manifest(const ExperimentConfig& cfg, const ExperimentResult& result,
                             const std::string& csv_path);

/// Output path after defaults: explicit `output`, else
/// $WETTING_OUT_DIR/wetting_<mode>.csv, else ./wetting_<mode>.csv.
std::string resolve_output_path(const ExperimentConfig& cfg);

/// Manifest path next to a CSV path: foo.csv -> foo.manifest.json.
std::string manifest_path_for(const std::string& csv_path);

const char* version();

}  // namespace wetting
