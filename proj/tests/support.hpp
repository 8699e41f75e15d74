#pragma once

#include <cstdint>
#include <filesystem>
#include <unistd.h>
#include <random>
#include <string>
#include <vector>

#include "lemmings/types.hpp"

namespace lemmings::testing {

using Rows = std::vector<std::vector<double>>;

inline Bag make_bag(std::string id, int label, const Rows& rows) {
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return Bag(std::move(id), label, rows.front().size(), std::move(flat));
}

// Small hand-rolled generator for property tests; independent of the
// library's own Rng.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(engine_() >> 11) * 0x1.0p-53);
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  int integer(int lo, int hi) { return lo + static_cast<int>(index(static_cast<std::size_t>(hi - lo + 1))); }
  bool coin() { return (engine_() & 1U) != 0; }

  std::vector<double> vec(std::size_t d, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(d);
    for (double& x : v) x = uniform(lo, hi);
    return v;
  }

  Bag bag(std::string id, int label, std::size_t d, std::size_t max_instances) {
    const std::size_t n = 1 + index(max_instances);
    return Bag(std::move(id), label, d, vec(n * d));
  }

  // Classification dataset; the first two bags fix one of each class.
  Dataset classification(std::size_t n, std::size_t d, std::size_t max_instances) {
    std::vector<Bag> bags;
    for (std::size_t i = 0; i < n; ++i) {
      const int label = i == 0 ? 1 : i == 1 ? -1 : (coin() ? 1 : -1);
      bags.push_back(bag("b" + std::to_string(i), label, d, max_instances));
    }
    return Dataset(std::move(bags), Task::kClassification);
  }

  Dataset ranking(std::size_t n, std::size_t d, std::size_t max_instances, int max_rank) {
    std::vector<Bag> bags;
    for (std::size_t i = 0; i < n; ++i) {
      const int rank = i < 2 ? static_cast<int>(i) + 1 : integer(1, max_rank);
      bags.push_back(bag("r" + std::to_string(i), rank, d, max_instances));
    }
    return Dataset(std::move(bags), Task::kRanking);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("lemmings-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::filesystem::path data_file(const std::string& name) {
  return std::filesystem::path(LEMMINGS_TEST_DATA_DIR) / name;
}

}  // namespace lemmings::testing
