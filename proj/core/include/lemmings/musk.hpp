#pragma once

#include <filesystem>
#include <istream>
#include <string>

#include "lemmings/types.hpp"

namespace lemmings {

inline constexpr std::size_t kMuskFeatures = 166;

// UCI MUSK layout: molecule_name,conformation_name,f1,...,f166,class with
// class 0 or 1. Rows are grouped into bags by molecule name (first
// occurrence order); class 0 -> -1, 1 -> +1.
Dataset read_musk(std::istream& in, const std::string& source = "<stream>");
Dataset load_musk(const std::filesystem::path& path);

}  // namespace lemmings
