#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "lemmings/evaluation.hpp"

namespace lemmings {

// Structured form of an evaluation report. Wall-clock fields are only
// included with `with_timing`, so the timing-free form is reproducible.
nlohmann::json report_to_json(const EvalReport& report, bool with_timing);

// Human-readable table rendered from the structured form; every number is
// printed exactly as it appears in the JSON.
std::string render_report(const nlohmann::json& report);


}  // namespace lemmings
