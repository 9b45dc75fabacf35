#pragma once

// JSON forms of the public types. Field names follow the report schemas used
// by the CLI; parsing is strict and rejects unknown keys with ConfigError.

#include "ruinkit/cascade.hpp"
#include "ruinkit/distributions.hpp"
#include "ruinkit/fragility.hpp"
#include "ruinkit/inference_pitfalls.hpp"
#include "ruinkit/ruin_engine.hpp"
#include "ruinkit/sensitivity.hpp"
#include "ruinkit/tail_diagnostics.hpp"

#include <json.hpp>

namespace ruinkit {

void to_json(nlohmann::json& j, const DistributionSpec& spec);
void from_json(const nlohmann::json& j, DistributionSpec& spec);

void to_json(nlohmann::json& j, const RuinReport& report);
void to_json(nlohmann::json& j, const TailDiagnosticsReport& report);
void to_json(nlohmann::json& j, const QuadrantVerdict& verdict);
void to_json(nlohmann::json& j, const SweepRow& row);
void to_json(nlohmann::json& j, const SkepticismEntry& entry);
void to_json(nlohmann::json& j, const ComparisonReport& report);
void to_json(nlohmann::json& j, const TwoTestReport& report);
void to_json(nlohmann::json& j, const LuckReport& report);

// Throws ConfigError naming the first key of `j` not in `allowed`.
void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                         std::string_view context);

}  // namespace ruinkit
