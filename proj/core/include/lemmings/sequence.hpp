#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lemmings/types.hpp"

namespace lemmings {

inline constexpr std::string_view kAminoAcids = "ACDEFGHIKLMNPQRSTVWY";

// 1-based inclusive span.
struct Region {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start + 1; }
  bool operator==(const Region&) const = default;
};

struct SequenceAnnotation {
  std::string sequence;
  std::vector<Region> regions;  // sorted, non-overlapping

  // Throws ParameterError unless 1 <= start <= end <= length and the regions
  // are sorted and disjoint.
  void validate() const;
};

// Window start positions (1-based) of every length-`window_len` window
// advancing by `stride`. A window fully inside region k goes to positive[k];
// a window touching no region goes to negative; any other window is dropped.
struct WindowSplit {
  std::vector<std::vector<std::size_t>> positive;
  std::vector<std::size_t> negative;
};

WindowSplit split_windows(const SequenceAnnotation& annotated, std::size_t window_len,
                          std::size_t stride = 1);

// Residue frequencies over kAminoAcids, summing to 1. Lower-case letters are
// accepted. Unknown residues throw unless `skip_unknown`, in which case they
// are left out of the counts.
std::array<double, 20> aac_features(std::string_view window, bool skip_unknown = false);

struct SequenceBags {
  std::vector<Bag> positive;  // ids "<seq_id>/pos<k>", label +1, k from 1
  std::optional<Bag> negative;  // id "<seq_id>/neg", label -1
};

// AAC bags for one annotated sequence. Throws if the window is longer than
// the sequence, a region is shorter than the window, or the sequence has
// regions but no zero-overlap window. A sequence without regions yields only
// its negative bag.
SequenceBags windows_to_bags(const SequenceAnnotation& annotated, const std::string& seq_id,
                             std::size_t window_len, std::size_t stride = 1,
                             bool skip_unknown = false);

struct FastaRecord {
  std::string id;  // first whitespace-delimited token of the header
  std::string sequence;
};

std::vector<FastaRecord> read_fasta(std::istream& in, const std::string& source = "<stream>");

// Sidecar lines `seq_id<TAB>start<TAB>end`; '#' comments and blank lines are
// skipped. Regions come back sorted by start.
std::map<std::string, std::vector<Region>> read_annotations(std::istream& in,
                                                            const std::string& source = "<stream>");

// Every FASTA record in file order, positive bags first then the negative
// bag. Errors are prefixed with the sequence id.
std::vector<Bag> bags_from_fasta(const std::vector<FastaRecord>& records,
                                 const std::map<std::string, std::vector<Region>>& annotations,
                                 std::size_t window_len, std::size_t stride = 1,
                                 bool skip_unknown = false);

std::vector<Bag> bags_from_fasta_files(const std::filesystem::path& fasta,
                                       const std::filesystem::path& annotations,
                                       std::size_t window_len, std::size_t stride = 1,
                                       bool skip_unknown = false);

}  // namespace lemmings
