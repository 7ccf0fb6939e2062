#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "json.hpp"

#include "tpnl/axioms.hpp"
#include "tpnl/core.hpp"
#include "tpnl/corpus.hpp"

namespace tpnl {

using Json = nlohmann::ordered_json;

/// JSON document for a system: dimension, basis, product, brackets, derivations.
Json system_to_json(const AlgebraSystem& sys);
/// Shape-validated system. Errors carry the offending field path.
AlgebraSystem system_from_json(const Json& doc);

/// Canonical text of a system file (compact innermost arrays, trailing newline).
std::string format_system(const AlgebraSystem& sys);
AlgebraSystem parse_system(const std::string& text);

void save_system(const AlgebraSystem& sys, const std::filesystem::path& path);
AlgebraSystem load_system(const std::filesystem::path& path);

/// {"identity", "status", "tuples_checked", "counterexample", "residual"}
Json report_to_json(const CheckReport& report);
Json reports_to_json(std::span<const CheckReport> reports);
Json finding_to_json(const Finding& finding);

/// Pretty printer that keeps arrays of scalars on one line.
std::string format_json(const Json& doc);

}  // namespace tpnl
