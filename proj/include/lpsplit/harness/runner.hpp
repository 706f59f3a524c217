#pragma once

#include <filesystem>
#include <json.hpp>
#include <map>
#include <string>
#include <vector>

#include "lpsplit/harness/config.hpp"

namespace lpsplit::harness {

inline constexpr const char* kVersion = "0.1.0";

/// Verdict on one invariant family. Failures name the inequality and the first violating step.
struct FamilyVerdict {
  std::string name;
  bool pass = true;
  int witness_step = -1;
  std::string detail;
};

struct RunSummary {
  std::string id;
  std::string algorithm;
  bool pass = false;
  int steps = 0;
  std::vector<FamilyVerdict> families;
  std::map<std::string, double> fitted_rates;
  /// Claimed rates, step band, sampled moduli and similar numbers worth logging.
  std::map<std::string, double> metrics;
  std::vector<std::string> notes;
  std::string error;
  double wall_time_s = 0.0;
  nlohmann::json config_echo;
  std::string version = kVersion;
  std::vector<std::string> outputs;
};

nlohmann::json ToJson(const RunSummary& s);

/// Runs the configured algorithm and its certificates, writing traces and the certificate to
/// `output_dir`. Operation errors are captured in the summary; partial traces are still
/// written.
RunSummary Run(const ExperimentConfig& cfg, const std::filesystem::path& output_dir);

}  // namespace lpsplit::harness
