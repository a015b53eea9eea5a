// co2fronts: run a scenario file and write its CSV outputs.
//
//   co2fronts <mode> --config <file> --out <dir> [--force]
//   co2fronts <mode> --batch <dir> --out <dir> [--force]
//   co2fronts validate --config <file>
//
// <mode> is riemann, interact, track, characteristics, oracle-compare, or
// "run" to take the mode from the file.
//
// Exit status: 0 ok, 1 usage, 2 unreadable or malformed JSON, 3 scenario
// violations, 4 solver failure, 5 output directory already exists.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "co2fronts/run.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 1, kParse = 2, kInvalid = 3, kRuntime = 4, kExists = 5 };

std::mutex io_mutex;

void report(std::ostream& os, const std::string& msg) {
  std::lock_guard<std::mutex> lock(io_mutex);
  os << msg << '\n';
}

struct Loaded {
  int status = kOk;
  co2fronts::ParseResult parsed;
};

Loaded load(const fs::path& path) {
  Loaded out;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    report(std::cerr, path.string() + ": cannot read");
    out.status = kParse;
    return out;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    report(std::cerr, path.string() + ": " + e.what());
    out.status = kParse;
    return out;
  }
  out.parsed = co2fronts::parse_scenario(doc);
  if (!out.parsed.ok()) out.status = kInvalid;
  return out;
}

int run_one(const std::string& mode, const fs::path& config, const fs::path& out,
            bool force) {
  if (fs::exists(out) && !force) {
    report(std::cerr, out.string() + ": exists (use --force to replace)");
    return kExists;
  }
  auto loaded = load(config);
  if (loaded.status == kParse) return kParse;
  if (loaded.parsed.ok() && mode != "run" && loaded.parsed.scenario->mode != mode) {
    loaded.parsed.violations.push_back("run.mode '" + loaded.parsed.scenario->mode +
                                       "' does not match command '" + mode + "'");
  }
  if (!loaded.parsed.violations.empty()) {
    for (const auto& v : loaded.parsed.violations) {
      report(std::cerr, config.string() + ": " + v);
    }
    return kInvalid;
  }
  const auto& scenario = *loaded.parsed.scenario;
  const auto start = std::chrono::steady_clock::now();
  co2fronts::Artifacts artifacts;
  try {
    artifacts = co2fronts::run_scenario(scenario);
  } catch (const std::exception& e) {
    report(std::cerr, config.string() + ": " + e.what());
    return kRuntime;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::string error;
  switch (co2fronts::write_artifacts(out, artifacts,
                                     co2fronts::manifest(scenario, artifacts, wall), force,
                                     &error)) {
    case co2fronts::WriteStatus::Ok:
      report(std::cout, config.string() + " -> " + out.string());
      return kOk;
    case co2fronts::WriteStatus::Exists:
      report(std::cerr, out.string() + ": exists (use --force to replace)");
      return kExists;
    case co2fronts::WriteStatus::Failed:
      break;
  }
  report(std::cerr, out.string() + ": " + error);
  return kRuntime;
}

int validate(const fs::path& config) {
  const auto loaded = load(config);
  if (loaded.status == kParse) return kParse;
  if (loaded.parsed.ok()) {
    std::cout << config.string() << ": ok\n";
    return kOk;
  }
  for (const auto& v : loaded.parsed.violations) std::cout << config.string() << ": " << v << '\n';
  return kInvalid;
}

int batch(const std::string& mode, const fs::path& dir, const fs::path& out, bool force) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << dir.string() << ": no .json scenarios\n";
    return kUsage;
  }
  std::vector<std::future<int>> jobs;
  jobs.reserve(files.size());
  for (const auto& f : files) {
    jobs.push_back(std::async(std::launch::async, [&, f] {
      return run_one(mode, f, out / f.stem(), force);
    }));
  }
  int worst = kOk;
  for (auto& j : jobs) worst = std::max(worst, j.get());
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Front tracking for the two-flux trapping model"};
  std::string mode;
  std::string config;
  std::string out;
  std::string batch_dir;
  bool force = false;
  app.add_option("mode", mode, "riemann | interact | track | characteristics | "
                               "oracle-compare | run | validate")
      ->required()
      ->check(CLI::IsMember({"riemann", "interact", "track", "characteristics",
                             "oracle-compare", "run", "validate"}));
  app.add_option("--config", config, "scenario JSON file");
  app.add_option("--out", out, "output directory (one per run)");
  app.add_option("--batch", batch_dir, "run every .json file in this directory");
  app.add_flag("--force", force, "replace an existing output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  if (mode == "validate") {
    if (config.empty()) {
      std::cerr << "validate needs --config\n";
      return kUsage;
    }
    return validate(config);
  }
  if (out.empty() || config.empty() == batch_dir.empty()) {
    std::cerr << "need --out and exactly one of --config or --batch\n";
    return kUsage;
  }
  if (!batch_dir.empty()) return batch(mode, batch_dir, out, force);
  return run_one(mode, config, out, force);
}
