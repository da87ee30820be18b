#pragma once

#include <string>

#include <json.hpp>

#include "lab/suite.hpp"

namespace cartan::lab {

inline constexpr int kSchemaVersion = 1;

nlohmann::json config_to_json(const RunConfig& cfg);
/// Reads the RunConfig mirror; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

nlohmann::json record_to_json(const CheckRecord& r);
nlohmann::json report_to_json(const VerificationReport& rep);

/// JSON (indented, trailing newline) or the flattened per-check CSV.
std::string render_report(const VerificationReport& rep, Format format);

std::string fingerprint_hex(std::uint64_t fp);

}  // namespace cartan::lab
