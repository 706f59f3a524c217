#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>

#include "lpsplit/algorithms.hpp"

namespace lpsplit::harness {

/// %.17g; "nan"/"inf" spelled out. Round-trips every finite double through strtod.
std::string FormatDouble(double v);

inline constexpr const char* kTraceCsvHeader = "iter,dist_to_ref,phi_to_ref,a,b,residual,lambda";

/// One row per iterate x_n. Row n carries the residual and step of the transition that
/// produced x_n (empty on row 0); columns without data (no reference, no Lyapunov terms) are
/// empty. With `coordinates`, columns x0..x{dim-1} follow.
std::string TraceCsv(const IterationTrace& trace, bool coordinates);
/// The same rows as JSON Lines; missing values are null.
std::string TraceJsonl(const IterationTrace& trace, bool coordinates);

/// Writes `text` to `path`, creating parent directories. Throws Error on I/O failure.
void WriteText(const std::filesystem::path& path, const std::string& text);
/// Pretty-printed JSON with a trailing newline.
void WriteJson(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace lpsplit::harness
