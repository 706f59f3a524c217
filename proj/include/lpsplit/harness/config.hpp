#pragma once

#include <filesystem>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lpsplit/algorithms.hpp"
#include "lpsplit/operators.hpp"
#include "lpsplit/space.hpp"

namespace lpsplit::harness {

enum class AlgorithmKind { kPpa, kRegularizedPpa, kFrb };
const char* ToString(AlgorithmKind kind);

struct ScheduleSection {
  std::string kind = "constant";  // constant | cyclic
  std::optional<double> lambda;   // constant value; defaults to the band midpoint
  std::vector<double> values;     // cyclic values
  std::optional<double> lambda_minus1;
};

struct AlgorithmSection {
  AlgorithmKind kind = AlgorithmKind::kPpa;
  std::string op_a;  // operator name for ppa / regularized_ppa, or A for frb
  std::string op_b;  // frb only
  double r = 1.0;
  int n_steps = 0;
  std::vector<double> x0;
  std::optional<std::vector<double>> x_minus1;
  // frb
  double epsilon = 0.0;
  std::optional<double> lipschitz;  // fixed L; estimated from op_b when absent
  int lipschitz_samples = 2000;
  ScheduleSection schedule;
  double target_distance = 1e-6;
  bool hilbert_reference = false;
  // regularized_ppa
  std::string weight = "inverse_sqrt";  // inverse_sqrt | zero
  // strongly monotone runs: compare two independent zero searches
  bool zero_check = true;
};

struct SolverSection {
  std::optional<double> tol_residual;
  int max_iter = 100;
  double damping = 1.0;
  std::string method = "auto";
};

struct OutputSection {
  bool csv = true;
  bool jsonl = true;
  bool certificate = true;
  bool coordinates = false;
};

/// Fully validated experiment. `echo` is the normalized document (defaults filled in);
/// loading it again yields the same configuration.
struct ExperimentConfig {
  std::string id;
  unsigned long long seed = 0;
  double p = 2.0;
  int dim = 1;
  std::optional<double> mu;
  nlohmann::json operators;  // name -> operator description
  std::optional<std::vector<double>> reference_zero;
  double alpha = 0.0;  // declared duality-based modulus of the (first) operator
  double beta = 0.0;   // declared modulus of B (frb)
  AlgorithmSection algorithm;
  SolverSection solver;
  OutputSection outputs;
  nlohmann::json echo;

  LpSpace Space() const { return LpSpace(p, dim, mu); }
};

/// Operators of a config, built in the config's space.
struct BuiltOperators {
  std::map<std::string, Operator> by_name;
  const Operator& at(const std::string& name) const;
};
BuiltOperators BuildOperators(const ExperimentConfig& cfg, const LpSpace& space);

/// L used in the frb step interval: the configured value, or kLipschitzSafetyFactor times
/// the sampled estimate for B.
double FrbLipschitz(const ExperimentConfig& cfg, const LpSpace& space, const Operator& b);

/// Step interval and lambda schedule of an frb config.
struct FrbSteps {
  StepInterval band;
  LambdaSchedule schedule;
  double lipschitz = 0.0;
};
FrbSteps ResolveFrbSteps(const ExperimentConfig& cfg, const LpSpace& space, const Operator& b);

/// Reads and validates a config file. Throws ConfigError listing every problem found;
/// syntax errors report the line.
ExperimentConfig LoadConfig(const std::filesystem::path& path);
/// Same for an in-memory document; `default_id` is used when the document has no id.
ExperimentConfig ParseConfig(const nlohmann::json& doc, const std::string& default_id = "run");
ExperimentConfig ParseConfigText(const std::string& text, const std::string& default_id = "run");

}  // namespace lpsplit::harness
