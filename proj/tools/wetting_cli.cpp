#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "wetting/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerify = 2;

struct Command {
  wetting::Mode mode;
  CLI::App* app;
  std::string config_path;
  std::map<std::string, std::string> flags;
};

void add_common(Command& cmd) {
  cmd.app->add_option("config", cmd.config_path, "key=value config file")->check(CLI::ExistingFile);
  for (const auto& key : wetting::config_keys()) {
    cmd.app->add_option("--" + key, cmd.flags[key], "overrides '" + key + "' from the config file");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

int execute(const Command& cmd) {
  wetting::Overrides overrides;
  for (const auto& key : wetting::config_keys()) {
    if (cmd.app->count("--" + key) > 0) overrides.emplace_back(key, cmd.flags.at(key));
  }
  const std::string text = cmd.config_path.empty() ? std::string() : read_file(cmd.config_path);
  const wetting::ExperimentConfig cfg = wetting::parse_config(text, cmd.mode, overrides);
  const wetting::ExperimentResult result = wetting::run_experiment(cfg);

  std::ostringstream csv;
  if (cfg.mode == wetting::Mode::Verify) {
    wetting::write_verify_table(csv, result);
    std::cout << csv.str();
  } else {
    wetting::write_csv(csv, result);
  }

  const std::string path = wetting::resolve_output_path(cfg);
  if (path == "-") {
    if (cfg.mode != wetting::Mode::Verify) std::cout << csv.str();
  } else {
    write_file(path, csv.str());
    const std::string manifest = wetting::manifest_path_for(path);
    write_file(manifest, wetting::make_manifest(cfg, result, path).dump(2) + "\n");
    std::cerr << "wrote " << result.rows.size() << " rows to " << path << " (manifest "
              << manifest << ")\n";
  }

  if (!result.verify_passed) {
    std::cerr << "verification failed: negative slack or map-count violation\n";
    return kExitVerify;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and exact evaluation of pinned interfaces above a hard wall"};
  app.set_version_flag("--version", std::string(wetting::version()));
  app.require_subcommand(1);

  Command commands[] = {
      {wetting::Mode::Run, app.add_subcommand("run", "one parameter point, MCMC"), {}, {}},
      {wetting::Mode::Sweep, app.add_subcommand("sweep", "grid over N, epsilon, a, b"), {}, {}},
      {wetting::Mode::Oracle, app.add_subcommand("oracle", "exact values on tiny boxes"), {}, {}},
      {wetting::Mode::Verify, app.add_subcommand("verify", "energy inequality checks"), {}, {}},
  };
  for (auto& cmd : commands) add_common(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  for (const auto& cmd : commands) {
    if (!cmd.app->parsed()) continue;
    try {
      return execute(cmd);
    } catch (const wetting::ParameterError& e) {
      std::cerr << "error: " << e.what() << '\n';
    } catch (const wetting::UsageError& e) {
      std::cerr << "error: " << e.what() << '\n';
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
    }
    return kExitUsage;
  }
  return kExitUsage;
}
