#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "lpsplit/harness/runner.hpp"

namespace lpsplit::harness {

/// Fixed-order table: failing runs first (with the failed families and their witness
/// steps), then passing runs, each group sorted by id. Deterministic for given summaries.
std::string ReportTable(const std::vector<RunSummary>& summaries);

/// Machine-readable counterpart, in the same order.
nlohmann::json ReportJson(const std::vector<RunSummary>& summaries);

bool AllPass(const std::vector<RunSummary>& summaries);

}  // namespace lpsplit::harness
