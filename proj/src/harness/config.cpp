#include "lpsplit/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "lpsplit/errors.hpp"
#include "lpsplit/sampling.hpp"

namespace lpsplit::harness {

using nlohmann::json;

namespace {

// Collects validation errors with a dotted field path.
class Checker {
 public:
  void Error(const std::string& path, const std::string& msg) {
    errors_.push_back(path.empty() ? msg : path + ": " + msg);
  }
  const std::vector<std::string>& errors() const { return errors_; }
  bool ok() const { return errors_.empty(); }

  void Known(const json& obj, const std::string& path, const std::set<std::string>& keys) {
    if (!obj.is_object()) return;
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!keys.count(it.key())) Error(Join(path, it.key()), "unknown field");
  }

  std::optional<double> Number(const json& obj, const std::string& key, const std::string& path,
                               bool required) {
    if (!obj.contains(key)) {
      if (required) Error(Join(path, key), "missing required field");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
      Error(Join(path, key), "must be a number");
      return std::nullopt;
    }
    double d = v.get<double>();
    if (!std::isfinite(d)) {
      Error(Join(path, key), "must be finite");
      return std::nullopt;
    }
    return d;
  }

  std::optional<long long> Integer(const json& obj, const std::string& key,
                                   const std::string& path, bool required) {
    if (!obj.contains(key)) {
      if (required) Error(Join(path, key), "missing required field");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      Error(Join(path, key), "must be an integer");
      return std::nullopt;
    }
    return v.get<long long>();
  }

  std::optional<std::string> String(const json& obj, const std::string& key,
                                    const std::string& path, bool required) {
    if (!obj.contains(key)) {
      if (required) Error(Join(path, key), "missing required field");
      return std::nullopt;
    }
    if (!obj.at(key).is_string()) {
      Error(Join(path, key), "must be a string");
      return std::nullopt;
    }
    return obj.at(key).get<std::string>();
  }

  std::optional<bool> Bool(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj.at(key).is_boolean()) {
      Error(Join(path, key), "must be true or false");
      return std::nullopt;
    }
    return obj.at(key).get<bool>();
  }

  std::optional<std::vector<double>> Vector(const json& v, const std::string& path) {
    if (!v.is_array()) {
      Error(path, "must be an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        Error(path, "must be an array of finite numbers");
        return std::nullopt;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  static std::string Join(const std::string& a, const std::string& b) {
    return a.empty() ? b : a + "." + b;
  }

 private:
  std::vector<std::string> errors_;
};

Eigen::VectorXd ToEigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string Fmt(const char* fmt, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

// ------------------------------------------------------------------------------------------
// Operator descriptions.

class OperatorBuilder {
 public:
  OperatorBuilder(const json& specs, const LpSpace& space,
                  const std::optional<std::vector<double>>& reference_zero)
      : specs_(specs), space_(space), reference_zero_(reference_zero) {}

  Operator Named(const std::string& name) {
    if (auto it = built_.find(name); it != built_.end()) return it->second;
    if (!specs_.contains(name)) throw ConfigError("operators: no operator named '" + name + "'");
    if (active_.count(name)) throw ConfigError("operators: cyclic reference through '" + name + "'");
    active_.insert(name);
    Operator op = Build(specs_.at(name), "operators." + name);
    active_.erase(name);
    built_.emplace(name, op);
    return op;
  }

  std::map<std::string, Operator> All() {
    for (auto it = specs_.begin(); it != specs_.end(); ++it) Named(it.key());
    return built_;
  }

 private:
  Eigen::VectorXd PerCoordinate(const json& v, const std::string& path) {
    if (v.is_number()) return Eigen::VectorXd::Constant(space_.dim(), v.get<double>());
    return Coords(v, path);
  }

  Eigen::VectorXd Coords(const json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path + ": must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(path + ": must be an array of numbers");
      out.push_back(e.get<double>());
    }
    if (static_cast<int>(out.size()) != space_.dim())
      throw ConfigError(path + ": expected " + std::to_string(space_.dim()) + " entries, got " +
                        std::to_string(out.size()));
    return ToEigen(out);
  }

  static const json& Field(const json& spec, const std::string& key, const std::string& path) {
    if (!spec.contains(key)) throw ConfigError(path + "." + key + ": missing required field");
    return spec.at(key);
  }

  static double Num(const json& spec, const std::string& key, const std::string& path) {
    const json& v = Field(spec, key, path);
    if (!v.is_number()) throw ConfigError(path + "." + key + ": must be a number");
    return v.get<double>();
  }

  Point ZeroField(const json& v, const std::string& path) {
    if (v.is_string() && v.get<std::string>() == "reference_zero") {
      if (!reference_zero_) throw ConfigError(path + ": reference_zero is not set");
      return Point(ToEigen(*reference_zero_));
    }
    return Point(Coords(v, path));
  }

  Operator Build(const json& spec, const std::string& path) {
    try {
      return BuildUnchecked(spec, path);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }

  Operator BuildUnchecked(const json& spec, const std::string& path) {
    if (!spec.is_object()) throw ConfigError(path + ": operator description must be an object");
    if (!spec.contains("type") || !spec.at("type").is_string())
      throw ConfigError(path + ".type: missing operator type");
    const std::string type = spec.at("type").get<std::string>();
    if (type == "linear") {
      if (spec.contains("diagonal"))
        return Operator::Linear(PerCoordinate(spec.at("diagonal"), path + ".diagonal").asDiagonal());
      const json& m = Field(spec, "matrix", path);
      if (!m.is_array() || static_cast<int>(m.size()) != space_.dim())
        throw ConfigError(path + ".matrix: expected " + std::to_string(space_.dim()) + " rows");
      Eigen::MatrixXd mat(space_.dim(), space_.dim());
      for (int i = 0; i < space_.dim(); ++i) mat.row(i) = Coords(m[i], path + ".matrix").transpose();
      return Operator::Linear(mat);
    }
    if (type == "duality_multiple") return Operator::DualityMultiple(Num(spec, "beta", path));
    if (type == "diagonal_power")
      return Operator::DiagonalPower(PerCoordinate(Field(spec, "coeffs", path), path + ".coeffs"),
                                     Num(spec, "exponent", path));
    if (type == "abs_subgradient")
      return Operator::AbsSubgradient(PerCoordinate(Field(spec, "weights", path), path + ".weights"));
    if (type == "sum") {
      const json& terms = Field(spec, "terms", path);
      if (!terms.is_array() || terms.empty())
        throw ConfigError(path + ".terms: must be a nonempty array");
      std::vector<Operator> ops;
      for (size_t i = 0; i < terms.size(); ++i)
        ops.push_back(Build(terms[i], path + ".terms[" + std::to_string(i) + "]"));
      return Operator::Sum(std::move(ops));
    }
    if (type == "scaled")
      return Operator::Scaled(Num(spec, "factor", path), Build(Field(spec, "inner", path), path + ".inner"));
    if (type == "shifted_zero")
      return Operator::ShiftedZero(ZeroField(Field(spec, "zero", path), path + ".zero"),
                                   Build(Field(spec, "inner", path), path + ".inner"));
    if (type == "ref") {
      const json& n = Field(spec, "name", path);
      if (!n.is_string()) throw ConfigError(path + ".name: must be a string");
      return Named(n.get<std::string>());
    }
    if (type == "anchored") {
      double alpha = Num(spec, "alpha", path);
      Eigen::VectorXd coeffs = PerCoordinate(Field(spec, "coeffs", path), path + ".coeffs");
      double exponent = Num(spec, "exponent", path);
      Point zero = ZeroField(Field(spec, "zero", path), path + ".zero");
      DualPoint offset = space_.DualZero();
      if (spec.contains("offset")) offset = DualPoint(Coords(spec.at("offset"), path + ".offset"));
      if (spec.contains("balance")) {
        const json& n = spec.at("balance");
        if (!n.is_string()) throw ConfigError(path + ".balance: must be an operator name");
        offset += Apply(Named(n.get<std::string>()), space_, zero);
      }
      return MakeAnchoredOperator(space_, alpha, coeffs, exponent, zero, offset);
    }
    if (type == "random_skew") {
      // Skew-symmetric matrix from seed, scaled to a sampled Lipschitz constant `lipschitz`.
      const json& s = Field(spec, "seed", path);
      if (!s.is_number_unsigned()) throw ConfigError(path + ".seed: must be a nonnegative integer");
      double target = spec.contains("lipschitz") ? Num(spec, "lipschitz", path) : 1.0;
      if (!(target > 0.0)) throw ConfigError(path + ".lipschitz: must be > 0");
      PointSampler sampler(space_.dim(), s.get<unsigned long long>());
      Eigen::MatrixXd m(space_.dim(), space_.dim());
      for (int i = 0; i < space_.dim(); ++i)
        for (int j = 0; j < space_.dim(); ++j) m(i, j) = sampler.Normal();
      Eigen::MatrixXd k = m - m.transpose();
      if (k.isZero(0.0)) throw ConfigError(path + ": a skew matrix needs dim >= 2");
      double l0 = LipschitzConstant(Operator::Linear(k), space_, 2000, s.get<unsigned long long>());
      return Operator::Linear(k * (target / l0));
    }
    throw ConfigError(path + ".type: unknown operator type '" + type + "'");
  }

  const json& specs_;
  const LpSpace& space_;
  const std::optional<std::vector<double>>& reference_zero_;
  std::map<std::string, Operator> built_;
  std::set<std::string> active_;
};

json EchoOf(const ExperimentConfig& c) {
  json e;
  e["id"] = c.id;
  e["seed"] = c.seed;
  e["space"] = {{"p", c.p}, {"dim", c.dim}};
  if (c.mu) e["space"]["mu"] = *c.mu;
  e["operators"] = c.operators;
  if (c.reference_zero) e["reference_zero"] = *c.reference_zero;
  e["moduli"] = {{"alpha", c.alpha}, {"beta", c.beta}};
  const auto& a = c.algorithm;
  json al;
  al["name"] = ToString(a.kind);
  al["operator"] = a.op_a;
  al["n_steps"] = a.n_steps;
  al["x0"] = a.x0;
  al["zero_check"] = a.zero_check;
  if (a.kind == AlgorithmKind::kFrb) {
    al["operator_b"] = a.op_b;
    al["epsilon"] = a.epsilon;
    if (a.x_minus1) al["x_minus1"] = *a.x_minus1;
    if (a.lipschitz) al["lipschitz"] = *a.lipschitz;
    al["lipschitz_samples"] = a.lipschitz_samples;
    json s = {{"kind", a.schedule.kind}};
    if (a.schedule.lambda) s["lambda"] = *a.schedule.lambda;
    if (a.schedule.kind == "cyclic") s["values"] = a.schedule.values;
    if (a.schedule.lambda_minus1) s["lambda_minus1"] = *a.schedule.lambda_minus1;
    al["schedule"] = s;
    al["target_distance"] = a.target_distance;
    al["hilbert_reference"] = a.hilbert_reference;
  } else {
    al["r"] = a.r;
    if (a.kind == AlgorithmKind::kRegularizedPpa) al["weight"] = a.weight;
  }
  e["algorithm"] = al;
  json so = {{"max_iter", c.solver.max_iter}, {"damping", c.solver.damping},
             {"method", c.solver.method}};
  if (c.solver.tol_residual) so["tol_residual"] = *c.solver.tol_residual;
  e["solver"] = so;
  e["outputs"] = {{"csv", c.outputs.csv},
                  {"jsonl", c.outputs.jsonl},
                  {"certificate", c.outputs.certificate},
                  {"coordinates", c.outputs.coordinates}};
  return e;
}

}  // namespace

const char* ToString(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::kPpa: return "ppa";
    case AlgorithmKind::kRegularizedPpa: return "regularized_ppa";
    case AlgorithmKind::kFrb: return "frb";
  }
  return "?";
}

const Operator& BuiltOperators::at(const std::string& name) const {
  auto it = by_name.find(name);
  if (it == by_name.end()) throw ConfigError("no operator named '" + name + "'");
  return it->second;
}

BuiltOperators BuildOperators(const ExperimentConfig& cfg, const LpSpace& space) {
  OperatorBuilder b(cfg.operators, space, cfg.reference_zero);
  return {b.All()};
}

double FrbLipschitz(const ExperimentConfig& cfg, const LpSpace& space, const Operator& b) {
  if (cfg.algorithm.lipschitz) return *cfg.algorithm.lipschitz;
  return kLipschitzSafetyFactor *
         LipschitzConstant(b, space, cfg.algorithm.lipschitz_samples, cfg.seed);
}

FrbSteps ResolveFrbSteps(const ExperimentConfig& cfg, const LpSpace& space, const Operator& b) {
  FrbSteps out;
  out.lipschitz = FrbLipschitz(cfg, space, b);
  out.band = StepSizeBounds(cfg.algorithm.epsilon, space.mu(), out.lipschitz);
  const auto& s = cfg.algorithm.schedule;
  if (s.kind == "cyclic") out.schedule = LambdaSchedule::Cyclic(s.values);
  else out.schedule = LambdaSchedule::Constant(s.lambda.value_or(out.band.Midpoint()));
  out.schedule.minus1 = s.lambda_minus1;
  return out;
}

ExperimentConfig ParseConfig(const json& doc, const std::string& default_id) {
  Checker ck;
  ExperimentConfig c;
  if (!doc.is_object()) throw ConfigError("config must be an object");
  ck.Known(doc, "", {"id", "seed", "space", "operators", "reference_zero", "moduli", "algorithm",
                     "solver", "outputs"});

  c.id = ck.String(doc, "id", "", false).value_or(default_id);
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) ck.Error("seed", "must be a nonnegative integer");
    else c.seed = doc.at("seed").get<unsigned long long>();
  }

  // space
  bool space_ok = false;
  if (!doc.contains("space") || !doc.at("space").is_object()) {
    ck.Error("space", "missing required section");
  } else {
    const json& s = doc.at("space");
    ck.Known(s, "space", {"p", "dim", "mu"});
    auto p = ck.Number(s, "p", "space", true);
    auto dim = ck.Integer(s, "dim", "space", true);
    c.mu = ck.Number(s, "mu", "space", false);
    if (p && dim) {
      c.p = *p;
      c.dim = static_cast<int>(*dim);
      try {
        if (*dim > 1000000) throw ConfigError("dim must be a positive integer");
        (void)LpSpace(c.p, c.dim, c.mu);
        space_ok = true;
      } catch (const ConfigError& e) {
        for (const auto& m : e.messages()) ck.Error("space", m);
      }
    }
  }

  auto dim_vector = [&](const json& v, const std::string& path) -> std::optional<std::vector<double>> {
    auto vec = ck.Vector(v, path);
    if (vec && space_ok && static_cast<int>(vec->size()) != c.dim) {
      ck.Error(path, "expected " + std::to_string(c.dim) + " entries, got " +
                         std::to_string(vec->size()));
      return std::nullopt;
    }
    return vec;
  };

  if (!doc.contains("operators") || !doc.at("operators").is_object() || doc.at("operators").empty())
    ck.Error("operators", "must be a nonempty object of named operators");
  else
    c.operators = doc.at("operators");

  if (doc.contains("reference_zero")) c.reference_zero = dim_vector(doc.at("reference_zero"), "reference_zero");

  if (doc.contains("moduli")) {
    const json& m = doc.at("moduli");
    ck.Known(m, "moduli", {"alpha", "beta"});
    c.alpha = ck.Number(m, "alpha", "moduli", false).value_or(0.0);
    c.beta = ck.Number(m, "beta", "moduli", false).value_or(0.0);
  }

  // algorithm
  auto& a = c.algorithm;
  bool alg_ok = false;
  if (!doc.contains("algorithm") || !doc.at("algorithm").is_object()) {
    ck.Error("algorithm", "missing required section");
  } else {
    const json& j = doc.at("algorithm");
    const std::string P = "algorithm";
    auto name = ck.String(j, "name", P, true);
    if (name) {
      alg_ok = true;
      if (*name == "ppa") a.kind = AlgorithmKind::kPpa;
      else if (*name == "regularized_ppa") a.kind = AlgorithmKind::kRegularizedPpa;
      else if (*name == "frb") a.kind = AlgorithmKind::kFrb;
      else {
        ck.Error("algorithm.name", "must be one of ppa, regularized_ppa, frb");
        alg_ok = false;
      }
    }
    std::set<std::string> keys{"name", "operator", "n_steps", "x0", "zero_check"};
    if (alg_ok && a.kind == AlgorithmKind::kFrb)
      keys.insert({"operator_b", "epsilon", "x_minus1", "lipschitz", "lipschitz_samples",
                   "schedule", "target_distance", "hilbert_reference"});
    else if (alg_ok)
      keys.insert({"r", "weight"});
    if (alg_ok) ck.Known(j, P, keys);

    a.op_a = ck.String(j, "operator", P, true).value_or("");
    auto n = ck.Integer(j, "n_steps", P, true);
    if (n) {
      if (*n < 0 || *n > 100000000) ck.Error("algorithm.n_steps", "must be a nonnegative integer");
      else a.n_steps = static_cast<int>(*n);
    }
    if (!j.contains("x0")) ck.Error("algorithm.x0", "missing required field");
    else if (auto v = dim_vector(j.at("x0"), "algorithm.x0")) a.x0 = *v;
    a.zero_check = ck.Bool(j, "zero_check", P).value_or(true);

    if (alg_ok && a.kind == AlgorithmKind::kFrb) {
      a.op_b = ck.String(j, "operator_b", P, true).value_or("");
      a.epsilon = ck.Number(j, "epsilon", P, true).value_or(0.0);
      if (j.contains("x_minus1")) a.x_minus1 = dim_vector(j.at("x_minus1"), "algorithm.x_minus1");
      a.lipschitz = ck.Number(j, "lipschitz", P, false);
      if (a.lipschitz && !(*a.lipschitz > 0.0)) ck.Error("algorithm.lipschitz", "must be > 0");
      if (auto ls = ck.Integer(j, "lipschitz_samples", P, false)) {
        if (*ls < 2 || *ls > 10000000) ck.Error("algorithm.lipschitz_samples", "must be >= 2");
        else a.lipschitz_samples = static_cast<int>(*ls);
      }
      a.target_distance = ck.Number(j, "target_distance", P, false).value_or(1e-6);
      a.hilbert_reference = ck.Bool(j, "hilbert_reference", P).value_or(false);
      if (j.contains("schedule")) {
        const json& s = j.at("schedule");
        const std::string SP = "algorithm.schedule";
        ck.Known(s, SP, {"kind", "lambda", "values", "lambda_minus1"});
        a.schedule.kind = ck.String(s, "kind", SP, false).value_or("constant");
        if (a.schedule.kind != "constant" && a.schedule.kind != "cyclic")
          ck.Error(SP + ".kind", "must be constant or cyclic");
        a.schedule.lambda = ck.Number(s, "lambda", SP, false);
        a.schedule.lambda_minus1 = ck.Number(s, "lambda_minus1", SP, false);
        if (a.schedule.kind == "cyclic") {
          if (!s.contains("values")) ck.Error(SP + ".values", "missing required field");
          else if (auto v = ck.Vector(s.at("values"), SP + ".values")) {
            if (v->empty()) ck.Error(SP + ".values", "must be nonempty");
            a.schedule.values = *v;
          }
        }
      }
    } else if (alg_ok) {
      a.r = ck.Number(j, "r", P, false).value_or(1.0);
      if (!(a.r > 0.0)) ck.Error("algorithm.r", "must be > 0");
      if (a.kind == AlgorithmKind::kRegularizedPpa) {
        a.weight = ck.String(j, "weight", P, false).value_or("inverse_sqrt");
        if (a.weight != "inverse_sqrt" && a.weight != "zero")
          ck.Error("algorithm.weight", "must be inverse_sqrt or zero");
      }
    }
  }

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    ck.Known(s, "solver", {"tol_residual", "max_iter", "damping", "method"});
    c.solver.tol_residual = ck.Number(s, "tol_residual", "solver", false);
    if (c.solver.tol_residual && !(*c.solver.tol_residual > 0.0))
      ck.Error("solver.tol_residual", "must be > 0");
    if (auto m = ck.Integer(s, "max_iter", "solver", false)) {
      if (*m < 1 || *m > 1000000) ck.Error("solver.max_iter", "must be >= 1");
      else c.solver.max_iter = static_cast<int>(*m);
    }
    c.solver.damping = ck.Number(s, "damping", "solver", false).value_or(1.0);
    if (!(c.solver.damping > 0.0 && c.solver.damping <= 1.0))
      ck.Error("solver.damping", "must lie in (0,1]");
    c.solver.method = ck.String(s, "method", "solver", false).value_or("auto");
    if (c.solver.method != "auto" && c.solver.method != "structured" && c.solver.method != "newton")
      ck.Error("solver.method", "must be auto, structured or newton");
  }

  if (doc.contains("outputs")) {
    const json& o = doc.at("outputs");
    ck.Known(o, "outputs", {"csv", "jsonl", "certificate", "coordinates"});
    c.outputs.csv = ck.Bool(o, "csv", "outputs").value_or(true);
    c.outputs.jsonl = ck.Bool(o, "jsonl", "outputs").value_or(true);
    c.outputs.certificate = ck.Bool(o, "certificate", "outputs").value_or(true);
    c.outputs.coordinates = ck.Bool(o, "coordinates", "outputs").value_or(false);
  }

  // Semantic checks that need the space and the operators.
  if (ck.ok()) {
    LpSpace space = c.Space();
    std::optional<BuiltOperators> ops;
    try {
      ops = BuildOperators(c, space);
    } catch (const ConfigError& e) {
      for (const auto& m : e.messages()) ck.Error("", m);
    }
    auto find = [&](const std::string& name, const std::string& path) -> const Operator* {
      if (!ops) return nullptr;
      auto it = ops->by_name.find(name);
      if (it == ops->by_name.end()) {
        ck.Error(path, "no operator named '" + name + "'");
        return nullptr;
      }
      return &it->second;
    };
    const Operator* op_a = find(a.op_a, "algorithm.operator");
    const Operator* op_b = a.kind == AlgorithmKind::kFrb ? find(a.op_b, "algorithm.operator_b") : nullptr;

    if (a.kind == AlgorithmKind::kPpa || a.kind == AlgorithmKind::kRegularizedPpa) {
      if (!(c.alpha > 0.0)) ck.Error("moduli.alpha", "must be > 0 (strongly monotone operator)");
      else if (!(1.0 + a.r * c.alpha > 0.0)) ck.Error("algorithm.r", "1 + r*alpha must be > 0");
    }
    if (a.kind == AlgorithmKind::kRegularizedPpa && !c.reference_zero)
      ck.Error("reference_zero", "required by regularized_ppa");
    if (a.kind == AlgorithmKind::kFrb) {
      if (!(a.epsilon > 0.0)) {
        ck.Error("algorithm.epsilon", "must be > 0");
      } else if (!(a.epsilon < c.alpha + c.beta)) {
        ck.Error("algorithm.epsilon",
                 Fmt("alpha + beta must exceed epsilon: %g <= %g", c.alpha + c.beta, a.epsilon));
      }
      if (op_b && a.epsilon > 0.0) {
        try {
          FrbSteps steps = ResolveFrbSteps(c, space, *op_b);
          steps.schedule.CheckWithin(steps.band);
        } catch (const ConfigError& e) {
          for (const auto& m : e.messages()) ck.Error("algorithm", m);
        }
      }
      if (a.hilbert_reference) {
        if (!space.IsHilbert()) ck.Error("algorithm.hilbert_reference", "requires p = 2");
        else if (op_a && op_b && (!LinearMatrix(*op_a, space) || !LinearMatrix(*op_b, space)))
          ck.Error("algorithm.hilbert_reference", "requires linear operators");
      }
    }
    if (c.reference_zero && op_a && (a.kind != AlgorithmKind::kFrb || op_b)) {
      Point z(ToEigen(*c.reference_zero));
      DualPoint v = Apply(*op_a, space, z);
      if (op_b) v += Apply(*op_b, space, z);
      double res = space.DualNorm(v);
      if (!(res <= 1e-9 * (1.0 + space.Norm(z))))
        ck.Error("reference_zero",
                 Fmt("is not a zero of the configured operators (residual %g, allowed %g)", res,
                     1e-9 * (1.0 + space.Norm(z))));
    }
  }

  if (!ck.ok()) throw ConfigError(ck.errors());
  c.echo = EchoOf(c);
  return c;
}

ExperimentConfig ParseConfigText(const std::string& text, const std::string& default_id) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    size_t line = 1;
    for (size_t i = 0; i < e.byte && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    throw ConfigError("parse error at line " + std::to_string(line) + ": " + e.what());
  }
  return ParseConfig(doc, default_id);
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfigText(ss.str(), path.stem().string());
}

}  // namespace lpsplit::harness
