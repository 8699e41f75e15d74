#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "lemmings/model.hpp"

namespace lemmings {

inline constexpr std::string_view kModelMagic = "LEMMINGS-MODEL";
inline constexpr std::string_view kModelVersion = "v1";

// Plain-text model file:
//
//   LEMMINGS-MODEL v1
//   kind=<linear|local>-<class|rank> dim=.. anchors=.. lambda=.. sigma=.. ...
//   W:             one row (linear) or d rows of K values (local)
//   ANCHORS:       K rows of d values (local only)
//   SCALER:        mean row, stddev row (only when scaled=1)
//   CHECKSUM sha256=<hex of every preceding byte>
//
// Values are space-separated with 17 significant digits, so
// serialize(parse(serialize(m))) is byte-identical and parse(serialize(m)) == m.
std::string serialize_model(const Model& model);
Model parse_model(std::string_view text, const std::string& source = "<memory>");

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

// Throw FormatError on a kind mismatch.
LinearModel load_linear_model(const std::filesystem::path& path);
LocalModel load_local_model(const std::filesystem::path& path);

}  // namespace lemmings
