#include "lemmings/sequence.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "lemmings/errors.hpp"
#include "text_util.hpp"

namespace lemmings {

namespace {

std::string describe(const Region& r) {
  return "(" + std::to_string(r.start) + "," + std::to_string(r.end) + ")";
}

int residue_index(char c) {
  const auto pos = kAminoAcids.find(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return pos == std::string_view::npos ? -1 : static_cast<int>(pos);
}

}  // namespace

void SequenceAnnotation::validate() const {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const Region& r = regions[i];
    if (r.start < 1 || r.start > r.end || r.end > sequence.size()) {
      throw ParameterError("region " + describe(r) + " is outside 1.." +
                           std::to_string(sequence.size()));
    }
    if (i > 0 && regions[i - 1].end >= r.start) {
      throw ParameterError("regions " + describe(regions[i - 1]) + " and " + describe(r) +
                           " overlap or are unsorted");
    }
  }
}

WindowSplit split_windows(const SequenceAnnotation& annotated, std::size_t window_len,
                          std::size_t stride) {
  annotated.validate();
  if (window_len == 0) throw ParameterError("window length must be at least 1");
  if (stride == 0) throw ParameterError("stride must be at least 1");
  const std::size_t n = annotated.sequence.size();
  if (window_len > n) {
    throw ParameterError("window length " + std::to_string(window_len) +
                         " exceeds sequence length " + std::to_string(n));
  }
  WindowSplit split;
  split.positive.resize(annotated.regions.size());
  for (std::size_t start = 1; start + window_len - 1 <= n; start += stride) {
    const std::size_t end = start + window_len - 1;
    bool touches = false;
    for (std::size_t k = 0; k < annotated.regions.size(); ++k) {
      const Region& r = annotated.regions[k];
      if (start >= r.start && end <= r.end) split.positive[k].push_back(start);
      if (start <= r.end && end >= r.start) touches = true;
    }
    if (!touches) split.negative.push_back(start);
  }
  return split;
}

std::array<double, 20> aac_features(std::string_view window, bool skip_unknown) {
  if (window.empty()) throw ParameterError("empty window");
  std::array<std::size_t, 20> counts{};
  std::size_t total = 0;
  for (char c : window) {
    const int k = residue_index(c);
    if (k < 0) {
      if (skip_unknown) continue;
      throw ParameterError(std::string("unknown residue '") + c + "'");
    }
    ++counts[static_cast<std::size_t>(k)];
    ++total;
  }
  if (total == 0) throw ParameterError("window has no standard residues");
  std::array<double, 20> out{};
  for (std::size_t k = 0; k < 20; ++k) {
    out[k] = static_cast<double>(counts[k]) / static_cast<double>(total);
  }
  return out;
}

SequenceBags windows_to_bags(const SequenceAnnotation& annotated, const std::string& seq_id,
                             std::size_t window_len, std::size_t stride, bool skip_unknown) {
  const WindowSplit split = split_windows(annotated, window_len, stride);
  auto features = [&](const std::vector<std::size_t>& starts) {
    std::vector<double> out;
    out.reserve(starts.size() * 20);
    for (std::size_t s : starts) {
      const auto aac =
          aac_features(std::string_view(annotated.sequence).substr(s - 1, window_len), skip_unknown);
      out.insert(out.end(), aac.begin(), aac.end());
    }
    return out;
  };
  SequenceBags bags;
  for (std::size_t k = 0; k < split.positive.size(); ++k) {
    if (split.positive[k].empty()) {
      const Region& r = annotated.regions[k];
      if (r.length() < window_len) {
        throw ParameterError("region " + describe(r) + " is shorter than window " +
                             std::to_string(window_len));
      }
      throw ParameterError("region " + describe(r) + " holds no window start at stride " +
                           std::to_string(stride));
    }
    bags.positive.emplace_back(seq_id + "/pos" + std::to_string(k + 1), 1, 20,
                               features(split.positive[k]));
  }
  if (split.negative.empty()) {
    if (!annotated.regions.empty()) {
      throw ParameterError("no window lies outside every region, negative bag would be empty");
    }
  } else {
    bags.negative.emplace(seq_id + "/neg", -1, 20, features(split.negative));
  }
  return bags;
}

std::vector<FastaRecord> read_fasta(std::istream& in, const std::string& source) {
  std::vector<FastaRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view view = text::trim(line);
    if (view.empty() || view.front() == ';') continue;
    if (view.front() == '>') {
      const std::string_view header = text::trim(view.substr(1));
      const std::string_view id = header.substr(0, header.find_first_of(" \t"));
      if (id.empty()) {
        throw FormatError(source + ":" + std::to_string(lineno) + ": empty FASTA header");
      }
      records.push_back({std::string(id), {}});
      continue;
    }
    if (records.empty()) {
      throw FormatError(source + ":" + std::to_string(lineno) + ": sequence data before header");
    }
    for (char c : view) {
      if (!std::isspace(static_cast<unsigned char>(c))) records.back().sequence.push_back(c);
    }
  }
  return records;
}

std::map<std::string, std::vector<Region>> read_annotations(std::istream& in,
                                                            const std::string& source) {
  std::map<std::string, std::vector<Region>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view view = text::trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto cols = text::split(view, '\t');
    Region r;
    if (cols.size() != 3 || cols[0].empty() || !text::parse_int(text::trim(cols[1]), r.start) ||
        !text::parse_int(text::trim(cols[2]), r.end)) {
      throw FormatError(source + ":" + std::to_string(lineno) +
                        ": expected seq_id<TAB>start<TAB>end");
    }
    out[std::string(cols[0])].push_back(r);
  }
  for (auto& [id, regions] : out) {
    std::sort(regions.begin(), regions.end(),
              [](const Region& a, const Region& b) { return a.start < b.start; });
  }
  return out;
}

std::vector<Bag> bags_from_fasta(const std::vector<FastaRecord>& records,
                                 const std::map<std::string, std::vector<Region>>& annotations,
                                 std::size_t window_len, std::size_t stride, bool skip_unknown) {
  std::vector<Bag> bags;
  for (const FastaRecord& rec : records) {
    SequenceAnnotation annotated{rec.sequence, {}};
    if (auto it = annotations.find(rec.id); it != annotations.end()) annotated.regions = it->second;
    try {
      SequenceBags sb = windows_to_bags(annotated, rec.id, window_len, stride, skip_unknown);
      for (Bag& b : sb.positive) bags.push_back(std::move(b));
      if (sb.negative) bags.push_back(std::move(*sb.negative));
    } catch (const ParameterError& e) {
      throw ParameterError("sequence '" + rec.id + "': " + e.what());
    }
  }
  for (const auto& [id, regions] : annotations) {
    const bool known = std::any_of(records.begin(), records.end(),
                                   [&](const FastaRecord& r) { return r.id == id; });
    if (!known) throw ParameterError("annotation for unknown sequence '" + id + "'");
  }
  return bags;
}

std::vector<Bag> bags_from_fasta_files(const std::filesystem::path& fasta,
                                       const std::filesystem::path& annotations,
                                       std::size_t window_len, std::size_t stride,
                                       bool skip_unknown) {
  std::ifstream fin(fasta);
  if (!fin) throw FormatError("cannot open '" + fasta.string() + "'");
  std::ifstream ain(annotations);
  if (!ain) throw FormatError("cannot open '" + annotations.string() + "'");
  return bags_from_fasta(read_fasta(fin, fasta.string()), read_annotations(ain, annotations.string()),
                         window_len, stride, skip_unknown);
}

}  // namespace lemmings
