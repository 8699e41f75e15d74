#include "lemmings/musk.hpp"

#include <cmath>
#include <fstream>
#include <unordered_map>

#include "lemmings/errors.hpp"
#include "text_util.hpp"

namespace lemmings {

Dataset read_musk(std::istream& in, const std::string& source) {
  struct Pending {
    int label;
    std::vector<double> features;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Pending> bags;
  std::string line;
  std::size_t row = 0;
  auto fail = [&](const std::string& what) {
    throw FormatError(source + ":" + std::to_string(row) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++row;
    const std::string_view trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    const auto fields = text::split(trimmed, ',');
    if (fields.size() != kMuskFeatures + 3) {
      fail("expected " + std::to_string(kMuskFeatures + 3) + " columns, found " +
           std::to_string(fields.size()));
    }
    double cls = 0.0;
    if (!text::parse_double(text::trim(fields.back()), cls) || (cls != 0.0 && cls != 1.0)) {
      fail("class must be 0 or 1, found '" + std::string(fields.back()) + "'");
    }
    const int label = cls == 1.0 ? 1 : -1;
    const std::string name(text::trim(fields[0]));
    if (name.empty()) fail("empty molecule name");
    auto [it, inserted] = bags.try_emplace(name, Pending{label, {}});
    if (inserted) {
      order.push_back(name);
    } else if (it->second.label != label) {
      fail("molecule '" + name + "' has inconsistent class");
    }
    for (std::size_t j = 2; j < 2 + kMuskFeatures; ++j) {
      double v = 0.0;
      if (!text::parse_double(text::trim(fields[j]), v)) {
        fail("non-numeric feature " + std::to_string(j - 1) + ": '" + std::string(fields[j]) + "'");
      }
      if (!std::isfinite(v)) fail("non-finite feature " + std::to_string(j - 1));
      it->second.features.push_back(v);
    }
  }
  if (order.empty()) throw FormatError(source + ": no MUSK rows");
  std::vector<Bag> out;
  out.reserve(order.size());
  for (const std::string& name : order) {
    Pending& p = bags.at(name);
    out.emplace_back(name, p.label, kMuskFeatures, std::move(p.features));
  }
  return Dataset(std::move(out), Task::kClassification);
}

Dataset load_musk(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  return read_musk(in, path.string());
}

}  // namespace lemmings
