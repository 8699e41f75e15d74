#include "lemmings/bag_file.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "lemmings/errors.hpp"
#include "text_util.hpp"

namespace lemmings {

std::vector<Bag> read_bags(std::istream& in, const std::string& source) {
  struct Pending {
    int label;
    std::vector<double> features;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Pending> pending;
  std::size_t dim = 0;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw FormatError(source + ":" + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string_view view = text::trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto cols = text::split(line, '\t');
    if (cols.size() != 3) fail("expected bag_id<TAB>label<TAB>features");
    const std::string id(cols[0]);
    if (id.empty()) fail("empty bag id");
    int label = 0;
    if (!text::parse_int(text::trim(cols[1]), label)) {
      fail("label '" + std::string(cols[1]) + "' is not an integer");
    }
    const auto values = text::split(text::trim(cols[2]), ',');
    if (dim == 0) dim = values.size();
    if (values.size() != dim) {
      fail("instance has " + std::to_string(values.size()) + " features, expected " +
           std::to_string(dim));
    }
    auto [it, inserted] = pending.try_emplace(id, Pending{label, {}});
    if (inserted) {
      order.push_back(id);
    } else if (it->second.label != label) {
      fail("bag '" + id + "' has conflicting labels");
    }
    for (std::string_view v : values) {
      double x = 0.0;
      if (!text::parse_double(text::trim(v), x)) fail("bad feature value '" + std::string(v) + "'");
      if (!std::isfinite(x)) fail("non-finite feature value '" + std::string(v) + "'");
      it->second.features.push_back(x);
    }
  }
  std::vector<Bag> bags;
  bags.reserve(order.size());
  for (const std::string& id : order) {
    Pending& p = pending.at(id);
    bags.emplace_back(id, p.label, dim, std::move(p.features));
  }
  return bags;
}

std::vector<Bag> read_bag_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  return read_bags(in, path.string());
}

Task infer_task(std::span<const Bag> bags) {
  const bool binary = std::all_of(bags.begin(), bags.end(),
                                  [](const Bag& b) { return b.label() == 1 || b.label() == -1; });
  return binary ? Task::kClassification : Task::kRanking;
}

Dataset load_bags(const std::filesystem::path& path) {
  std::vector<Bag> bags = read_bag_file(path);
  const Task task = infer_task(bags);
  return Dataset(std::move(bags), task);
}

void write_bags(std::span<const Bag> bags, std::ostream& out) {
  for (const Bag& bag : bags) {
    if (bag.id().find_first_of("\t\n") != std::string::npos) {
      throw FormatError("bag id '" + bag.id() + "' contains a tab or newline");
    }
    for (std::size_t i = 0; i < bag.size(); ++i) {
      out << bag.id() << '\t' << bag.label() << '\t';
      const auto x = bag.instance(i);
      for (std::size_t j = 0; j < x.size(); ++j) {
        if (j) out << ',';
        out << text::format_double(x[j]);
      }
      out << '\n';
    }
  }
}

void save_bags(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  write_bags(std::span(dataset.bags()), out);
  if (!out) throw FormatError("write to '" + path.string() + "' failed");
}

}  // namespace lemmings
