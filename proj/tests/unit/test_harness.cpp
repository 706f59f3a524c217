#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lpsplit/errors.hpp"
#include "lpsplit/harness/config.hpp"
#include "lpsplit/harness/probes.hpp"
#include "lpsplit/harness/report.hpp"
#include "lpsplit/harness/runner.hpp"
#include "lpsplit/harness/trace_io.hpp"

using namespace lpsplit;
using namespace lpsplit::harness;
namespace fs = std::filesystem;

namespace {

const char* kPpaConfig = R"({
  "id": "ppa_small",
  "space": {"p": 1.5, "dim": 4},
  "operators": {
    "A": {"type": "anchored", "alpha": 0.5, "coeffs": 0.01, "exponent": 3,
          "zero": "reference_zero"}
  },
  "reference_zero": [0.8, -0.5, 0.3, 1.2],
  "moduli": {"alpha": 0.5},
  "algorithm": {"name": "ppa", "operator": "A", "n_steps": 15, "x0": [2.0, 1.0, -1.0, 0.5]}
})";

const char* kBadStep = R"({
  "space": {"p": 1.5, "dim": 2, "mu": 2.0},
  "operators": {
    "A": {"type": "duality_multiple", "beta": 1.0},
    "B": {"type": "linear", "matrix": [[0.0, 1.0], [-1.0, 0.0]]}
  },
  "moduli": {"alpha": 1.0, "beta": 0.0},
  "algorithm": {"name": "frb", "operator": "A", "operator_b": "B", "epsilon": 0.4,
                "lipschitz": 1.0, "n_steps": 10, "x0": [1.0, 0.0]}
})";

std::vector<std::string> ConfigErrors(const std::string& text) {
  try {
    ParseConfigText(text);
  } catch (const ConfigError& e) {
    return e.messages();
  }
  return {};
}

bool AnyContains(const std::vector<std::string>& msgs, const std::string& needle) {
  for (const auto& m : msgs)
    if (m.find(needle) != std::string::npos) return true;
  return false;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path TempDir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("lpsplit_test_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("config defaults and echo") {
  ExperimentConfig c = ParseConfigText(kPpaConfig);
  CHECK(c.id == "ppa_small");
  CHECK(c.p == 1.5);
  CHECK(c.dim == 4);
  CHECK(c.algorithm.kind == AlgorithmKind::kPpa);
  CHECK(c.algorithm.r == 1.0);
  CHECK(c.solver.max_iter == 100);
  CHECK(c.outputs.csv);
  CHECK_FALSE(c.outputs.coordinates);

  ExperimentConfig again = ParseConfig(c.echo);
  CHECK(again.echo == c.echo);
}

TEST_CASE("config errors") {
  CHECK(AnyContains(ConfigErrors(kBadStep), "empty step interval: 0.4 > 0.05"));

  std::string bad_p = kPpaConfig;
  bad_p.replace(bad_p.find("\"p\": 1.5"), 8, "\"p\": 2.5");
  CHECK(AnyContains(ConfigErrors(bad_p), "p must lie in (1,2]"));

  std::string two = kPpaConfig;
  two.replace(two.find("\"n_steps\": 15"), 13, "\"n_steps\": -1");
  two.replace(two.find("\"id\""), 4, "\"idx\"");
  std::vector<std::string> errs = ConfigErrors(two);
  CHECK(errs.size() >= 2);
  CHECK(AnyContains(errs, "unknown field"));
  CHECK(AnyContains(errs, "n_steps"));

  CHECK(AnyContains(ConfigErrors("{\n  \"id\": \"x\",\n  oops\n}"), "parse error at line 3"));

  std::string weak = kBadStep;
  weak.replace(weak.find("\"alpha\": 1.0"), 12, "\"alpha\": 0.01");
  CHECK(AnyContains(ConfigErrors(weak), "alpha + beta must exceed epsilon"));

  std::string wrong_zero = kPpaConfig;
  wrong_zero.replace(wrong_zero.find("\"zero\": \"reference_zero\""), 24, "\"zero\": [0, 0, 0, 0]");
  CHECK(AnyContains(ConfigErrors(wrong_zero), "reference_zero"));
}

TEST_CASE("run writes deterministic traces") {
  ExperimentConfig c = ParseConfigText(kPpaConfig);
  fs::path d1 = TempDir("run1"), d2 = TempDir("run2");
  RunSummary s1 = Run(c, d1);
  RunSummary s2 = Run(c, d2);
  CHECK(s1.pass);
  CHECK(s1.error.empty());
  CHECK(s1.steps == 15);
  CHECK(s1.fitted_rates.count("phi_to_ref") == 1);
  for (const char* ext : {".trace.csv", ".trace.jsonl"}) {
    std::string a = Slurp(d1 / ("ppa_small" + std::string(ext)));
    CHECK_FALSE(a.empty());
    CHECK(a == Slurp(d2 / ("ppa_small" + std::string(ext))));
  }
  std::string csv = Slurp(d1 / "ppa_small.trace.csv");
  CHECK(csv.rfind(kTraceCsvHeader, 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);

  nlohmann::json cert = nlohmann::json::parse(Slurp(d1 / "ppa_small.certificate.json"));
  CHECK(cert.at("config") == c.echo);
  CHECK(cert.at("families").size() == s1.families.size());
  CHECK(cert.contains("contraction"));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("zero steps") {
  std::string text = kPpaConfig;
  text.replace(text.find("\"n_steps\": 15"), 13, "\"n_steps\": 0");
  ExperimentConfig c = ParseConfigText(text);
  c.outputs.csv = c.outputs.jsonl = c.outputs.certificate = false;
  RunSummary s = Run(c, TempDir("zero"));
  CHECK(s.steps == 0);
  bool noted = false;
  for (const auto& n : s.notes) noted |= n.find("no iterations requested") != std::string::npos;
  CHECK(noted);
}

TEST_CASE("report ordering") {
  RunSummary a, b, c;
  a.id = "b_pass";
  a.pass = true;
  b.id = "a_pass";
  b.pass = true;
  c.id = "z_fail";
  c.pass = false;
  c.families.push_back({"ppa_contraction", false, 3, "violated"});
  std::string t = ReportTable({a, b, c});
  size_t fail = t.find("z_fail"), p1 = t.find("a_pass"), p2 = t.find("b_pass");
  CHECK(fail < p1);
  CHECK(p1 < p2);
  CHECK(t.find("ppa_contraction@3") != std::string::npos);
  CHECK(t.find("2 passed, 1 failed") != std::string::npos);
  CHECK(t == ReportTable({c, a, b}));
  CHECK_FALSE(AllPass({a, c}));
  CHECK(ReportJson({a, b, c}).at("runs").at(0).at("id") == "z_fail");
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5e-17, 5e-324}) {
    std::string s = FormatDouble(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(FormatDouble(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(FormatDouble(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("small geometry battery") {
  GeometryReport r = GeometryBattery(LpSpace(1.5, 5), 500, 3);
  CHECK(r.pass());
  CHECK(r.families.size() == 10);
  CHECK(r.mu_hat <= r.mu);
  CHECK(r.mu_hat > 1.0);
}
