#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lemmings/types.hpp"

namespace lemmings {

// Generic bag file: UTF-8 lines `bag_id<TAB>label<TAB>f1,f2,...,fd`, one
// instance per line. Lines starting with '#' and blank lines are skipped.
// Lines sharing a bag id join one bag (placed at its first occurrence),
// instances in file order; their labels must agree.
std::vector<Bag> read_bags(std::istream& in, const std::string& source = "<stream>");
std::vector<Bag> read_bag_file(const std::filesystem::path& path);

// Classification when every label is -1 or +1, ranking otherwise.
Task infer_task(std::span<const Bag> bags);

Dataset load_bags(const std::filesystem::path& path);

// Features are written with 17 significant digits, so load(save(d)) == d.
void write_bags(std::span<const Bag> bags, std::ostream& out);
void save_bags(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace lemmings
