// lpsplit: validate, run and batch experiment configs; run the geometry battery.
#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include "lpsplit/errors.hpp"
#include "lpsplit/harness/config.hpp"
#include "lpsplit/harness/probes.hpp"
#include "lpsplit/harness/report.hpp"
#include "lpsplit/harness/runner.hpp"
#include "lpsplit/harness/trace_io.hpp"

namespace fs = std::filesystem;
using namespace lpsplit;
using namespace lpsplit::harness;

namespace {

fs::path OutputDir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("LPSPLIT_OUTPUT_DIR"); env && *env) return env;
  return "lpsplit_out";
}

void PrintConfigError(const std::string& source, const ConfigError& e) {
  std::cerr << source << ": invalid configuration\n";
  for (const auto& m : e.messages()) std::cerr << "  - " << m << "\n";
}

int Finish(const std::vector<RunSummary>& summaries, const fs::path& out) {
  std::cout << ReportTable(summaries);
  try {
    WriteJson(out / "summary.json", ReportJson(summaries));
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return AllPass(summaries) ? 0 : 1;
}

int Validate(const std::string& path) {
  try {
    ExperimentConfig c = LoadConfig(path);
    std::cout << "valid: " << c.id << " (" << ToString(c.algorithm.kind) << ", p = " << c.p
              << ", dim = " << c.dim << ")\n";
    return 0;
  } catch (const ConfigError& e) {
    PrintConfigError(path, e);
    return 1;
  }
}

int RunOne(const std::string& path, const fs::path& out) {
  ExperimentConfig c;
  try {
    c = LoadConfig(path);
  } catch (const ConfigError& e) {
    PrintConfigError(path, e);
    return 2;
  }
  return Finish({Run(c, out)}, out);
}

int Suite(const std::string& dir, const fs::path& out, int threads) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  if (ec) {
    std::cerr << "cannot read " << dir << ": " << ec.message() << "\n";
    return 2;
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "no .json configs in " << dir << "\n";
    return 2;
  }

  std::vector<ExperimentConfig> configs;
  bool bad = false;
  for (const auto& f : files) {
    try {
      configs.push_back(LoadConfig(f));
    } catch (const ConfigError& e) {
      PrintConfigError(f.string(), e);
      bad = true;
    }
  }
  if (bad) return 2;

  // One worker per config, at most `threads` at a time; each writes only its own files.
  std::vector<RunSummary> summaries(configs.size());
  size_t next = 0;
  while (next < configs.size()) {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads && next < configs.size(); ++t, ++next)
      pool.emplace_back([&, i = next] { summaries[i] = Run(configs[i], out); });
    for (auto& th : pool) th.join();
  }
  return Finish(summaries, out);
}

int ProbeGeometry(double p, int dim, int samples, unsigned long long seed) {
  try {
    LpSpace space(p, dim);
    GeometryReport r = GeometryBattery(space, samples, seed);
    std::printf("geometry battery: p = %g, dim = %d, mu = %g, %d samples, seed %llu\n", p, dim,
                r.mu, samples, seed);
    for (const auto& f : r.families)
      std::printf("  %-4s %-32s checked %6d  failures %5d  worst %.3g%s\n",
                  f.pass ? "PASS" : "FAIL", f.name.c_str(), f.checked, f.failures, f.worst,
                  f.witness >= 0 ? (" first at sample " + std::to_string(f.witness)).c_str() : "");
    std::printf("  sampled sup ||x-y||^2/phi(x,y) = %.6g (mu = %.6g)\n", r.mu_hat, r.mu);
    return r.pass() ? 0 : 1;
  } catch (const ConfigError& e) {
    PrintConfigError("probe", e);
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monotone operator splitting in l_p spaces: experiment runner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string config_path, suite_dir, out_flag;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  auto* validate = app.add_subcommand("validate", "Check a config and list every problem");
  validate->add_option("config", config_path, "Config file")->required();

  auto* run = app.add_subcommand("run", "Run one config");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--output-dir", out_flag, "Output directory (default $LPSPLIT_OUTPUT_DIR)");

  auto* suite = app.add_subcommand("suite", "Run every .json config in a directory");
  suite->add_option("dir", suite_dir, "Config directory")->required();
  suite->add_option("--output-dir", out_flag, "Output directory (default $LPSPLIT_OUTPUT_DIR)");
  suite->add_option("--threads", threads, "Concurrent runs")->check(CLI::PositiveNumber);

  auto* probe = app.add_subcommand("probe", "Diagnostics");
  probe->require_subcommand(1);
  double p = 2.0;
  int dim = 2, samples = 10000;
  unsigned long long seed = 0;
  auto* geometry = probe->add_subcommand("geometry", "Geometry invariant battery");
  geometry->add_option("p", p, "Exponent in (1,2]")->required();
  geometry->add_option("dim", dim, "Dimension")->required();
  geometry->add_option("--samples", samples, "Random tuples")->check(CLI::PositiveNumber);
  geometry->add_option("--seed", seed, "Sampler seed");

  CLI11_PARSE(app, argc, argv);

  if (*validate) return Validate(config_path);
  if (*run) return RunOne(config_path, OutputDir(out_flag));
  if (*suite) return Suite(suite_dir, OutputDir(out_flag), threads);
  if (*geometry) return ProbeGeometry(p, dim, samples, seed);
  return 1;
}
