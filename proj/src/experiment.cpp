#include "wetting/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "wetting/rng.hpp"

#ifndef WETTING_VERSION
#define WETTING_VERSION "0.0.0"
#endif

namespace wetting {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = value.find(',', start);
    out.push_back(trim(std::string_view(value).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
std::optional<T> parse_number(const std::string& s) {
  T value{};
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) return std::nullopt;
  }
  return value;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

struct Parser {
  ExperimentConfig cfg;
  std::vector<ConfigIssue> issues;
  std::map<std::string, int> seen;  // key -> line of the value in force

  void fail(int line, const std::string& key, std::string message) {
    issues.push_back({line, key, std::move(message)});
  }

  template <class T>
  bool number(int line, const std::string& key, const std::string& value, T& out,
              const std::function<bool(T)>& ok, const char* constraint) {
    const auto parsed = parse_number<T>(value);
    if (!parsed) {
      fail(line, key,
           std::string("expected ") + (std::is_floating_point_v<T> ? "a number" : "an integer") +
               ", got '" + value + "'");
      return false;
    }
    if (!ok(*parsed)) {
      fail(line, key, std::string("must be ") + constraint + " (got " + value + ")");
      return false;
    }
    out = *parsed;
    return true;
  }

  template <class T>
  void list(int line, const std::string& key, const std::string& value, std::vector<T>& out,
            const std::function<bool(T)>& ok, const char* constraint) {
    std::vector<T> values;
    for (const auto& item : split_list(value)) {
      T v{};
      if (!number<T>(line, key, item, v, ok, constraint)) return;
      values.push_back(v);
    }
    out = std::move(values);
  }

  void choice(int line, const std::string& key, const std::string& value,
              std::initializer_list<const char*> allowed, const std::function<void(int)>& set) {
    int i = 0;
    for (const char* name : allowed) {
      if (value == name) {
        set(i);
        return;
      }
      ++i;
    }
    std::string names;
    for (const char* name : allowed) names += std::string(names.empty() ? "" : ", ") + name;
    fail(line, key, "expected one of {" + names + "}, got '" + value + "'");
  }

  void apply(int line, const std::string& key, const std::string& value);
  void check();
};

const std::vector<std::string> kKeys{
    "d",         "N",          "interaction", "pinning",     "epsilon",        "a",
    "b",         "kernel",     "order",       "sweeps",      "burn_in",        "thinning",
    "seed",      "step_width", "init",        "init_height", "threads",        "replicates",
    "jobs",      "output",     "tail_M",      "cutoff",      "nodes_per_unit", "target",
    "verify_configs", "verify_adversarial"};

void Parser::apply(int line, const std::string& key, const std::string& value) {
  auto positive_int = [](std::int64_t v) { return v >= 1; };
  auto non_negative_int = [](std::int64_t v) { return v >= 0; };
  std::int64_t i64 = 0;
  if (key == "d") {
    if (number<std::int64_t>(line, key, value, i64, [](std::int64_t v) { return v >= 1 && v <= 3; },
                             "1, 2 or 3"))
      cfg.dim = static_cast<int>(i64);
  } else if (key == "N") {
    list<int>(line, key, value, cfg.sides, [](int v) { return v >= 1 && v <= 4096; },
              "an integer in [1, 4096]");
  } else if (key == "interaction") {
    choice(line, key, value, {"sos", "gaussian"},
           [&](int i) { cfg.interaction = i == 0 ? "sos" : "gaussian"; });
  } else if (key == "pinning") {
    choice(line, key, value, {"none", "square_well", "delta"}, [&](int i) {
      static const char* names[] = {"none", "square_well", "delta"};
      cfg.pinning = names[i];
    });
  } else if (key == "epsilon") {
    list<double>(line, key, value, cfg.epsilons, [](double v) { return v >= 0.0; }, ">= 0");
  } else if (key == "a") {
    list<double>(line, key, value, cfg.well_depths, [](double v) { return v > 0.0; }, "> 0");
  } else if (key == "b") {
    list<double>(line, key, value, cfg.well_weights, [](double v) { return v > 0.0; }, "> 0");
  } else if (key == "kernel") {
    choice(line, key, value, {"heat_bath", "metropolis"},
           [&](int i) { cfg.kernel = i == 0 ? Kernel::HeatBath : Kernel::Metropolis; });
  } else if (key == "order") {
    choice(line, key, value, {"sequential", "checkerboard"}, [&](int i) {
      cfg.order = i == 0 ? SweepOrder::Sequential : SweepOrder::Checkerboard;
    });
  } else if (key == "sweeps") {
    number<std::int64_t>(line, key, value, cfg.sweeps, positive_int, ">= 1");
  } else if (key == "burn_in") {
    number<std::int64_t>(line, key, value, cfg.burn_in, non_negative_int, ">= 0");
  } else if (key == "thinning") {
    number<std::int64_t>(line, key, value, cfg.thinning, positive_int, ">= 1");
  } else if (key == "seed") {
    number<std::uint64_t>(line, key, value, cfg.seed, [](std::uint64_t) { return true; },
                          "an unsigned 64-bit integer");
  } else if (key == "step_width") {
    number<double>(line, key, value, cfg.step_width, [](double v) { return v > 0.0; }, "> 0");
  } else if (key == "init") {
    choice(line, key, value, {"exponential", "flat"}, [&](int i) {
      cfg.init = i == 0 ? Initialization::Exponential : Initialization::Flat;
    });
  } else if (key == "init_height") {
    number<double>(line, key, value, cfg.init_height, [](double v) { return v >= 0.0; }, ">= 0");
  } else if (key == "threads") {
    if (number<std::int64_t>(line, key, value, i64, positive_int, ">= 1"))
      cfg.threads = static_cast<int>(i64);
  } else if (key == "replicates") {
    if (number<std::int64_t>(line, key, value, i64, positive_int, ">= 1"))
      cfg.replicates = static_cast<int>(i64);
  } else if (key == "jobs") {
    if (number<std::int64_t>(line, key, value, i64, positive_int, ">= 1"))
      cfg.jobs = static_cast<int>(i64);
  } else if (key == "output") {
    if (value.empty()) fail(line, key, "must not be empty");
    cfg.output = value;
  } else if (key == "tail_M") {
    if (number<std::int64_t>(line, key, value, i64, non_negative_int, ">= 0")) cfg.tail_m = i64;
  } else if (key == "cutoff") {
    double t = 0.0;
    if (number<double>(line, key, value, t, [](double v) { return v >= 10.0; }, ">= 10"))
      cfg.cutoff = t;
  } else if (key == "nodes_per_unit") {
    if (number<std::int64_t>(line, key, value, i64, [](std::int64_t v) { return v >= 4; }, ">= 4"))
      cfg.nodes_per_unit = static_cast<int>(i64);
  } else if (key == "target") {
    number<double>(line, key, value, cfg.target_rel_error, [](double v) { return v > 0.0; },
                   "> 0");
  } else if (key == "verify_configs") {
    number<std::int64_t>(line, key, value, cfg.verify.random_configs, non_negative_int, ">= 0");
  } else if (key == "verify_adversarial") {
    number<std::int64_t>(line, key, value, cfg.verify.adversarial_configs, non_negative_int,
                         ">= 0");
  } else {
    fail(line, key, "unknown key");
    return;
  }
  seen[key] = line;
}

void Parser::check() {
  auto line_of = [&](const std::string& key) {
    const auto it = seen.find(key);
    return it == seen.end() ? 0 : it->second;
  };
  auto has = [&](const std::string& key) { return seen.count(key) > 0; };
  const Mode mode = cfg.mode;
  if (mode == Mode::Verify) return;

  if (!has("N")) fail(0, "N", "missing required key");
  if (cfg.pinning == "delta") {
    if (!has("epsilon")) fail(line_of("pinning"), "epsilon", "pinning=delta needs epsilon");
    for (const char* k : {"a", "b"})
      if (has(k)) fail(line_of(k), k, "only square_well pinning takes a and b");
  } else if (cfg.pinning == "square_well") {
    for (const char* k : {"a", "b"})
      if (!has(k)) fail(line_of("pinning"), k, "pinning=square_well needs a and b");
    if (has("epsilon"))
      fail(line_of("epsilon"), "epsilon",
           "square_well pinning is set by a and b (epsilon = a * e^b); use pinning=delta for "
           "epsilon");
  } else {
    for (const char* k : {"epsilon", "a", "b"})
      if (has(k)) fail(line_of(k), k, std::string("pinning=none takes no ") + k);
  }

  if (cfg.kernel == Kernel::Metropolis && cfg.pinning == "delta" && mode != Mode::Oracle) {
    fail(line_of("kernel"), "kernel",
         "kernel=metropolis is not available with pinning=delta: a continuous proposal never "
         "lands on the atom at 0, so the chain could neither pin nor unpin sites; use "
         "kernel=heat_bath");
  }
  if (cfg.burn_in > cfg.sweeps) {
    fail(line_of("burn_in"), "burn_in", "must not exceed sweeps (" + std::to_string(cfg.sweeps) +
                                            ")");
  }

  if (mode == Mode::Run) {
    const std::pair<const char*, std::size_t> axes[] = {{"N", cfg.sides.size()},
                                                        {"epsilon", cfg.epsilons.size()},
                                                        {"a", cfg.well_depths.size()},
                                                        {"b", cfg.well_weights.size()}};
    for (const auto& [key, count] : axes) {
      if (count > 1) {
        fail(line_of(key), key,
             "has " + std::to_string(count) + " values; value lists need the sweep subcommand");
      }
    }
  }

  if (mode == Mode::Oracle) {
    if (cfg.dim == 1) {
      for (int n : cfg.sides)
        if (n > 64) fail(line_of("N"), "N", "exact chain evaluation supports N <= 64");
    } else if (cfg.dim == 2) {
      for (int n : cfg.sides)
        if (n * n > static_cast<int>(SubsetExpansion::kMaxSites))
          fail(line_of("N"), "N", "exact evaluation in d=2 supports at most 9 sites (N <= 3)");
      if (cfg.pinning == "square_well")
        fail(line_of("pinning"), "pinning", "exact evaluation in d=2 supports none and delta");
    } else {
      fail(line_of("d"), "d", "no exact method in d=3");
    }
  }
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

struct Point {
  int side;
  PinningSpec pin;
  std::optional<double> eps;
  std::optional<double> a;
  std::optional<double> b;
};

std::vector<Point> points_of(const ExperimentConfig& cfg) {
  std::vector<Point> points;
  for (int side : cfg.sides) {
    if (cfg.pinning == "delta") {
      for (double e : cfg.epsilons) points.push_back({side, DeltaPinning{e}, e, {}, {}});
    } else if (cfg.pinning == "square_well") {
      for (double a : cfg.well_depths)
        for (double b : cfg.well_weights) {
          points.push_back({side, SquareWell{a, b}, epsilon_of(a, b), a, b});
        }
    } else {
      points.push_back({side, NoPinning{}, {}, {}, {}});
    }
  }
  return points;
}

InteractionPotential potential_of(const ExperimentConfig& cfg) {
  return cfg.interaction == "gaussian" ? InteractionPotential::gaussian()
                                       : InteractionPotential::sos();
}

const char* kernel_name(Kernel k) { return k == Kernel::HeatBath ? "heat_bath" : "metropolis"; }

CsvRow base_row(const ExperimentConfig& cfg, std::size_t run_id, const Point& p) {
  CsvRow row(csv_columns().size());
  row[0] = std::to_string(run_id);
  row[1] = to_string(cfg.mode);
  row[3] = std::to_string(cfg.dim);
  row[4] = std::to_string(p.side);
  row[5] = cfg.interaction;
  row[6] = cfg.pinning;
  if (p.eps) row[7] = format_double(*p.eps);
  if (p.a) row[8] = format_double(*p.a);
  if (p.b) row[9] = format_double(*p.b);
  return row;
}

std::string optional_se(const Estimate& e) {
  return e.standard_error ? format_double(*e.standard_error) : std::string();
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Run: return "run";
    case Mode::Sweep: return "sweep";
    case Mode::Oracle: return "oracle";
    case Mode::Verify: return "verify";
  }
  return "?";
}

const char* version() { return WETTING_VERSION; }

const std::vector<std::string>& config_keys() { return kKeys; }

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : ParameterError([&] {
        std::string msg = "invalid configuration:";
        for (const auto& i : issues) {
          msg += "\n  ";
          msg += i.line > 0 ? "line " + std::to_string(i.line) + ": " : std::string();
          msg += i.key + ": " + i.message;
        }
        return msg;
      }()),
      issues_(std::move(issues)) {}

ExperimentConfig parse_config(std::string_view text, Mode mode, const Overrides& overrides) {
  Parser p;
  p.cfg.mode = mode;
  std::set<std::string> in_file;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      p.fail(line_no, line, "expected key=value");
      continue;
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!in_file.insert(key).second) {
      p.fail(line_no, key, "duplicate key");
      continue;
    }
    p.apply(line_no, key, value);
  }
  for (const auto& [key, value] : overrides) p.apply(0, key, value);
  p.check();
  p.cfg.verify.seed = p.cfg.seed;
  if (!p.issues.empty()) throw ConfigError(std::move(p.issues));
  return p.cfg;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("mode", to_string(mode));
  out.emplace_back("d", std::to_string(dim));
  out.emplace_back("N", join(sides));
  out.emplace_back("interaction", interaction);
  out.emplace_back("pinning", pinning);
  if (!epsilons.empty()) out.emplace_back("epsilon", join(epsilons));
  if (!well_depths.empty()) out.emplace_back("a", join(well_depths));
  if (!well_weights.empty()) out.emplace_back("b", join(well_weights));
  out.emplace_back("kernel", kernel_name(kernel));
  out.emplace_back("order", order == SweepOrder::Sequential ? "sequential" : "checkerboard");
  out.emplace_back("sweeps", std::to_string(sweeps));
  out.emplace_back("burn_in", std::to_string(burn_in));
  out.emplace_back("thinning", std::to_string(thinning));
  out.emplace_back("seed", std::to_string(seed));
  out.emplace_back("step_width", format_double(step_width));
  out.emplace_back("init", init == Initialization::Exponential ? "exponential" : "flat");
  out.emplace_back("init_height", format_double(init_height));
  out.emplace_back("threads", std::to_string(threads));
  out.emplace_back("replicates", std::to_string(replicates));
  out.emplace_back("jobs", std::to_string(jobs));
  if (!output.empty()) out.emplace_back("output", output);
  if (tail_m) out.emplace_back("tail_M", std::to_string(*tail_m));
  if (cutoff) out.emplace_back("cutoff", format_double(*cutoff));
  out.emplace_back("nodes_per_unit", std::to_string(nodes_per_unit));
  out.emplace_back("target", format_double(target_rel_error));
  out.emplace_back("verify_configs", std::to_string(verify.random_configs));
  out.emplace_back("verify_adversarial", std::to_string(verify.adversarial_configs));
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result;
  if (cfg.mode == Mode::Verify) {
    result.verify = verify_chalker(cfg.verify);
    for (const auto& row : result.verify)
      if (row.violations > 0) result.verify_passed = false;
    return result;
  }

  const InteractionPotential psi = potential_of(cfg);
  const auto points = points_of(cfg);

  if (cfg.mode == Mode::Oracle) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& p = points[i];
      QuadratureSpec quad = QuadratureSpec::defaults_for(psi, cfg.dim == 1 ? p.side : 1);
      if (cfg.cutoff) quad.cutoff = *cfg.cutoff;
      quad.nodes_per_unit = cfg.nodes_per_unit;
      quad.target_rel_error = cfg.target_rel_error;
      const Lattice lat = build_lattice(cfg.dim, p.side);
      const ExactResult r = cfg.dim == 1
                                ? exact_z_chain(p.side, psi, p.pin, quad)
                                : exact_z_subset_expansion(lat, psi, p.eps.value_or(0.0), quad);
      CsvRow row = base_row(cfg, i, p);
      row[2] = "exact";
      row[15] = format_double(r.rho);
      row[17] = format_double(r.rho * static_cast<double>(lat.size()));
      if (!r.mean_heights.empty()) {
        row[19] = format_double(mean_of(r.mean_heights));
        row[21] = format_double(r.mean_heights[lat.center()]);
      }
      result.rows.push_back(std::move(row));
      result.seeds.push_back(0);
    }
    return result;
  }

  std::vector<ChainParams> params;
  std::vector<std::size_t> point_of;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (int r = 0; r < cfg.replicates; ++r) {
      ChainParams cp;
      cp.dim = cfg.dim;
      cp.side = points[i].side;
      cp.psi = psi;
      cp.pin = points[i].pin;
      cp.kernel = cfg.kernel;
      cp.order = cfg.order;
      cp.sweeps = cfg.sweeps;
      cp.burn_in = cfg.burn_in;
      cp.thinning = cfg.thinning;
      cp.seed = splitmix64(cfg.seed ^ splitmix64(params.size()));
      cp.step_width = cfg.step_width;
      cp.init = cfg.init;
      cp.init_height = cfg.init_height;
      cp.threads = cfg.threads;
      params.push_back(std::move(cp));
      point_of.push_back(i);
    }
  }
  const auto traces = run_chains(params, cfg.jobs);

  for (std::size_t k = 0; k < traces.size(); ++k) {
    const auto& trace = traces[k];
    const auto& cp = params[k];
    const Lattice lat = build_lattice(cp.dim, cp.side);
    CsvRow row = base_row(cfg, k, points[point_of[k]]);
    row[2] = "mcmc";
    row[10] = kernel_name(cp.kernel);
    row[11] = std::to_string(cp.sweeps);
    row[12] = std::to_string(cp.burn_in);
    row[13] = std::to_string(cp.thinning);
    row[14] = std::to_string(cp.seed);
    row[23] = format_double(trace.acceptance_rate());
    if (!trace.snapshots.empty()) {
      const Estimate rho = estimate_rho(trace, lat);
      const Estimate nu = estimate_nu(trace);
      const Estimate height = estimate_mean_height(trace);
      row[15] = format_double(rho.value);
      row[16] = optional_se(rho);
      row[17] = format_double(nu.value);
      row[18] = optional_se(nu);
      row[19] = format_double(height.value);
      row[20] = optional_se(height);
      row[21] = format_double(estimate_center_height(trace).value);
      row[22] = format_double(estimate_max_height(trace).value);
      if (cfg.tail_m) {
        const Estimate tail = tail_probability(trace, *cfg.tail_m);
        row[24] = std::to_string(*cfg.tail_m);
        row[25] = format_double(tail.value);
        row[26] = optional_se(tail);
      }
    }
    result.rows.push_back(std::move(row));
    result.seeds.push_back(cp.seed);
  }
  return result;
}

void write_csv(std::ostream& out, const ExperimentResult& result) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& row : result.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

void write_verify_table(std::ostream& out, const ExperimentResult& result) {
  out << "check,configs,min_slack,violations\n";
  for (const auto& row : result.verify) {
    out << row.name << ',' << row.configs << ',' << format_double(row.min_slack) << ','
        << row.violations << '\n';
  }
}

nlohmann::json make_manifest(const ExperimentConfig& cfg, const ExperimentResult& result,
                             const std::string& csv_path) {
  nlohmann::json j;
  j["program"] = "wetting";
  j["version"] = version();
  j["mode"] = to_string(cfg.mode);
  nlohmann::json config = nlohmann::json::object();
  for (const auto& [k, v] : cfg.echo()) config[k] = v;
  j["config"] = config;
  j["csv"] = csv_path;
  j["rows"] = result.rows.size();
  j["seeds"] = result.seeds;
  if (cfg.mode == Mode::Verify) {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& row : result.verify) {
      table.push_back({{"check", row.name},
                       {"configs", row.configs},
                       {"min_slack", row.min_slack},
                       {"violations", row.violations}});
    }
    j["verify"] = table;
    j["verify_passed"] = result.verify_passed;
  }
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
  j["timestamp"] = stamp;
  return j;
}

std::string resolve_output_path(const ExperimentConfig& cfg) {
  if (!cfg.output.empty()) return cfg.output;
  const std::string name = "wetting_" + to_string(cfg.mode) + ".csv";
  if (const char* dir = std::getenv("WETTING_OUT_DIR"); dir != nullptr && *dir != '\0') {
    std::string d = dir;
    if (d.back() != '/') d += '/';
    return d + name;
  }
  return name;
}

std::string manifest_path_for(const std::string& csv_path) {
  const auto slash = csv_path.find_last_of('/');
  const auto dot = csv_path.find_last_of('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
    return csv_path.substr(0, dot) + ".manifest.json";
  }
  return csv_path + ".manifest.json";
}

}  // namespace wetting
