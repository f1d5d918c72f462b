#include <doctest.h>

#include <sstream>
#include <string>

#include "wetting/experiment.hpp"

using namespace wetting;

namespace {

std::vector<ConfigIssue> issues_of(const std::string& text, Mode mode = Mode::Run,
                                   const Overrides& overrides = {}) {
  try {
    parse_config(text, mode, overrides);
  } catch (const ConfigError& e) {
    return e.issues();
  }
  return {};
}

bool mentions(const std::vector<ConfigIssue>& issues, const std::string& key,
              const std::string& fragment) {
  for (const auto& i : issues) {
    if (i.key == key && i.message.find(fragment) != std::string::npos) return true;
  }
  return false;
}

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream out;
  write_csv(out, r);
  return out.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

TEST_CASE("parse a valid config") {
  const auto cfg = parse_config(
      "d=2\nN=16\ninteraction=sos\npinning=delta\nepsilon=0.01\nsweeps=20000\nseed=7", Mode::Run);
  CHECK(cfg.dim == 2);
  CHECK(cfg.sides == std::vector<int>{16});
  CHECK(cfg.pinning == "delta");
  CHECK(cfg.epsilons == std::vector<double>{0.01});
  CHECK(cfg.sweeps == 20000);
  CHECK(cfg.seed == 7);
}

TEST_CASE("comments, blank lines and overrides") {
  const auto cfg = parse_config("# header\n\nd = 1   # dimension\nN=4\nsweeps=100\nburn_in=10\n",
                                Mode::Run, {{"N", "6"}, {"seed", "99"}});
  CHECK(cfg.sides == std::vector<int>{6});
  CHECK(cfg.seed == 99);
  CHECK(cfg.burn_in == 10);
}

TEST_CASE("config errors name the constraint and line") {
  const auto neg = issues_of("N=2\npinning=delta\nepsilon=-1");
  REQUIRE(neg.size() == 1);
  CHECK(neg[0].line == 3);
  CHECK(neg[0].key == "epsilon");
  CHECK(neg[0].message.find(">= 0") != std::string::npos);

  const auto metro = issues_of("N=2\nkernel=metropolis\npinning=delta\nepsilon=0.1");
  CHECK(mentions(metro, "kernel", "atom"));
  CHECK(metro[0].line == 2);
}

TEST_CASE("all violations are collected") {
  const auto issues =
      issues_of("d=7\nN=abc\nbogus=1\nsweeps=0\npinning=square_well\na=0.1\nkernel=gibbs\nN=3");
  CHECK(mentions(issues, "d", "1, 2 or 3"));
  CHECK(mentions(issues, "N", "integer"));
  CHECK(mentions(issues, "bogus", "unknown key"));
  CHECK(mentions(issues, "sweeps", ">= 1"));
  CHECK(mentions(issues, "b", "needs a and b"));
  CHECK(mentions(issues, "kernel", "heat_bath"));
  CHECK(mentions(issues, "N", "duplicate"));
  CHECK(issues.size() >= 7);
}

TEST_CASE("pinning parameters must match the variant") {
  CHECK(mentions(issues_of("N=2\npinning=none\nepsilon=0.1"), "epsilon", "pinning=none"));
  CHECK(mentions(issues_of("N=2\npinning=delta"), "epsilon", "needs epsilon"));
  CHECK(mentions(issues_of("N=2\npinning=square_well\na=0.1\nb=1\nepsilon=0.2"), "epsilon",
                 "a and b"));
  CHECK(mentions(issues_of("N=2\npinning=delta\nepsilon=0.1\na=0.3"), "a", "square_well"));
  CHECK(issues_of("N=2\npinning=square_well\na=0.1\nb=1").empty());
  CHECK(mentions(issues_of("pinning=none"), "N", "missing"));
  CHECK(mentions(issues_of("N=2\nsweeps=10\nburn_in=11"), "burn_in", "exceed"));
}

TEST_CASE("lists need sweep mode") {
  const std::string text = "N=8,16,32\npinning=delta\nepsilon=0.01,5.0\nsweeps=10\nburn_in=0";
  CHECK(mentions(issues_of(text, Mode::Run), "N", "sweep"));
  const auto cfg = parse_config(text, Mode::Sweep);
  CHECK(cfg.sides == std::vector<int>{8, 16, 32});
  CHECK(cfg.epsilons.size() == 2);
}

TEST_CASE("oracle mode limits") {
  CHECK(mentions(issues_of("d=2\nN=4", Mode::Oracle), "N", "9 sites"));
  CHECK(mentions(issues_of("d=3\nN=2", Mode::Oracle), "d", "d=3"));
  CHECK(mentions(issues_of("d=1\nN=65", Mode::Oracle), "N", "64"));
}

TEST_CASE("run mode: one site, exact pinning frequency") {
  const auto cfg = parse_config("d=1\nN=1\npinning=delta\nepsilon=0.5\nsweeps=100000\nburn_in=100",
                                Mode::Run);
  const auto result = run_experiment(cfg);
  REQUIRE(result.rows.size() == 1);
  const auto& row = result.rows[0];
  CHECK(row.size() == csv_columns().size());
  CHECK(row[2] == "mcmc");
  const double rho = std::stod(row[15]);
  const double se = std::stod(row[16]);
  CHECK(std::abs(rho - 0.5) < 0.01);
  CHECK(std::abs(rho - 0.5) < 3 * se);
  CHECK(row[24].empty());
}

TEST_CASE("sweep mode row count and determinism") {
  const auto cfg = parse_config(
      "d=2\nN=3,4,5\npinning=delta\nepsilon=0.01,5.0\nsweeps=60\nburn_in=20\nreplicates=2\n"
      "jobs=2\ntail_M=1",
      Mode::Sweep);
  const auto a = run_experiment(cfg);
  CHECK(a.rows.size() == 12);
  CHECK(a.seeds.size() == 12);
  const std::string csv = csv_of(a);
  CHECK(csv == csv_of(run_experiment(cfg)));

  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(split(header) == csv_columns());
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const auto fields = split(line);
    CHECK(fields.size() == csv_columns().size());
    CHECK(fields[0] == std::to_string(count));
    CHECK(fields[24] == "1");
    ++count;
  }
  CHECK(count == 12);

  auto other = cfg;
  other.seed = cfg.seed + 1;
  CHECK(csv_of(run_experiment(other)) != csv);
}

TEST_CASE("oracle mode emits exact rows") {
  const auto cfg =
      parse_config("d=1\nN=1,2\npinning=delta\nepsilon=0.5,1.0", Mode::Oracle);
  const auto r = run_experiment(cfg);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.rows[0][2] == "exact");
  CHECK(std::stod(r.rows[0][15]) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.rows[0][16].empty());
  CHECK(r.rows[0][11].empty());
  const auto d2 = run_experiment(parse_config("d=2\nN=2\npinning=delta\nepsilon=0.1", Mode::Oracle));
  REQUIRE(d2.rows.size() == 1);
  CHECK(std::stod(d2.rows[0][15]) > 0.0);
}

TEST_CASE("verify mode") {
  auto cfg = parse_config("verify_configs=500\nverify_adversarial=50", Mode::Verify);
  const auto r = run_experiment(cfg);
  CHECK(r.verify_passed);
  CHECK(r.verify.size() == 5);
  std::ostringstream table;
  write_verify_table(table, r);
  CHECK(table.str().rfind("check,configs,min_slack,violations\n", 0) == 0);
}

TEST_CASE("manifest and output paths") {
  const auto cfg = parse_config("d=1\nN=2\nsweeps=40\nburn_in=8\noutput=out/run.csv", Mode::Run);
  const auto r = run_experiment(cfg);
  const auto m = make_manifest(cfg, r, "out/run.csv");
  CHECK(m["config"]["N"] == "2");
  CHECK(m["seeds"].size() == 1);
  CHECK(m["seeds"][0] == r.seeds[0]);
  CHECK(m.contains("timestamp"));
  CHECK(m["version"] == std::string(version()));
  CHECK(manifest_path_for("out/run.csv") == "out/run.manifest.json");
  CHECK(manifest_path_for("results") == "results.manifest.json");
  CHECK(resolve_output_path(cfg) == "out/run.csv");
  auto unnamed = cfg;
  unnamed.output.clear();
  setenv("WETTING_OUT_DIR", "/tmp/wetting_runs", 1);
  CHECK(resolve_output_path(unnamed) == "/tmp/wetting_runs/wetting_run.csv");
  unsetenv("WETTING_OUT_DIR");
  CHECK(resolve_output_path(unnamed) == "wetting_run.csv");
}
