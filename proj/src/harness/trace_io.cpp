#include "lpsplit/harness/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "lpsplit/errors.hpp"

namespace lpsplit::harness {

namespace {

struct Row {
  std::optional<double> dist, phi, a, b, residual, lambda;
};

Row RowAt(const IterationTrace& t, size_t n) {
  Row r;
  if (n < t.dist_to_ref.size()) r.dist = t.dist_to_ref[n];
  if (n < t.phi_to_ref.size()) r.phi = t.phi_to_ref[n];
  if (n < t.lyapunov.size()) {
    r.a = t.lyapunov[n].a;
    r.b = t.lyapunov[n].b;
  }
  if (n >= 1 && n - 1 < t.resolvent_residuals.size()) r.residual = t.resolvent_residuals[n - 1];
  if (n >= 1 && n - 1 < t.step_sizes.size()) r.lambda = t.step_sizes[n - 1];
  return r;
}

std::string Csv(const std::optional<double>& v) { return v ? FormatDouble(*v) : ""; }
std::string Js(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? FormatDouble(*v) : "null";
}

}  // namespace

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string TraceCsv(const IterationTrace& trace, bool coordinates) {
  std::string out = kTraceCsvHeader;
  int dim = trace.iterates.empty() ? 0 : static_cast<int>(trace.iterates.front().size());
  if (coordinates)
    for (int i = 0; i < dim; ++i) out += ",x" + std::to_string(i);
  out += '\n';
  for (size_t n = 0; n < trace.iterates.size(); ++n) {
    Row r = RowAt(trace, n);
    out += std::to_string(n) + ',' + Csv(r.dist) + ',' + Csv(r.phi) + ',' + Csv(r.a) + ',' +
           Csv(r.b) + ',' + Csv(r.residual) + ',' + Csv(r.lambda);
    if (coordinates)
      for (int i = 0; i < dim; ++i) out += ',' + FormatDouble(trace.iterates[n][i]);
    out += '\n';
  }
  return out;
}

std::string TraceJsonl(const IterationTrace& trace, bool coordinates) {
  std::string out;
  for (size_t n = 0; n < trace.iterates.size(); ++n) {
    Row r = RowAt(trace, n);
    out += "{\"iter\":" + std::to_string(n) + ",\"dist_to_ref\":" + Js(r.dist) +
           ",\"phi_to_ref\":" + Js(r.phi) + ",\"a\":" + Js(r.a) + ",\"b\":" + Js(r.b) +
           ",\"residual\":" + Js(r.residual) + ",\"lambda\":" + Js(r.lambda);
    if (coordinates) {
      out += ",\"x\":[";
      for (Eigen::Index i = 0; i < trace.iterates[n].size(); ++i)
        out += (i ? "," : "") + Js(trace.iterates[n][i]);
      out += ']';
    }
    out += "}\n";
  }
  return out;
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

void WriteJson(const std::filesystem::path& path, const nlohmann::json& doc) {
  WriteText(path, doc.dump(2) + "\n");
}

}  // namespace lpsplit::harness
