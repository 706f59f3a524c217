#include "lpsplit/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace lpsplit::harness {

namespace {

std::vector<const RunSummary*> Ordered(const std::vector<RunSummary>& summaries) {
  std::vector<const RunSummary*> out;
  for (const auto& s : summaries) out.push_back(&s);
  std::stable_sort(out.begin(), out.end(), [](const RunSummary* a, const RunSummary* b) {
    if (a->pass != b->pass) return !a->pass;
    return a->id < b->id;
  });
  return out;
}

std::string Detail(const RunSummary& s) {
  std::string d;
  auto add = [&](const std::string& t) { d += (d.empty() ? "" : "; ") + t; };
  if (!s.pass) {
    for (const auto& f : s.families)
      if (!f.pass)
        add(f.name + (f.witness_step >= 0 ? "@" + std::to_string(f.witness_step) : "") + ": " +
            f.detail);
  } else {
    for (const auto& [k, v] : s.fitted_rates) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%s rate %.4g", k.c_str(), v);
      add(buf);
    }
  }
  for (const auto& n : s.notes) add(n);
  return d;
}

}  // namespace

std::string ReportTable(const std::vector<RunSummary>& summaries) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-6s %-28s %-16s %6s  %s\n", "status", "id", "algorithm",
                "steps", "detail");
  out += line;
  for (const RunSummary* s : Ordered(summaries)) {
    std::snprintf(line, sizeof line, "%-6s %-28s %-16s %6d  ", s->pass ? "PASS" : "FAIL",
                  s->id.c_str(), s->algorithm.c_str(), s->steps);
    out += line + Detail(*s) + "\n";
  }
  int failed = static_cast<int>(std::count_if(summaries.begin(), summaries.end(),
                                               [](const RunSummary& s) { return !s.pass; }));
  out += std::to_string(summaries.size() - failed) + " passed, " + std::to_string(failed) +
         " failed\n";
  return out;
}

nlohmann::json ReportJson(const std::vector<RunSummary>& summaries) {
  nlohmann::json runs = nlohmann::json::array();
  for (const RunSummary* s : Ordered(summaries)) runs.push_back(ToJson(*s));
  return {{"version", kVersion}, {"all_pass", AllPass(summaries)}, {"runs", runs}};
}

bool AllPass(const std::vector<RunSummary>& summaries) {
  return !summaries.empty() && std::all_of(summaries.begin(), summaries.end(),
                                           [](const RunSummary& s) { return s.pass; });
}

}  // namespace lpsplit::harness
