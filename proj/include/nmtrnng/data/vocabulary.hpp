#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nmtrnng/model/model.hpp"

namespace nmtrnng::data {

using Sentence = std::vector<std::string>;

inline constexpr std::string_view kUnkToken = "UNK";
inline constexpr std::string_view kEosToken = "EOS";

// Token <-> id map. Ids 0 and 1 are always UNK and EOS; the remaining ids
// follow descending frequency, ties broken lexicographically.
class Vocabulary {
 public:
  Vocabulary();

  // Keeps tokens seen at least `min_frequency` times.
  static Vocabulary build(const std::vector<Sentence>& corpus, std::size_t min_frequency);
  // Reads "token<TAB>count" lines as written by save().
  static Vocabulary load(std::istream& in);

  void save(std::ostream& out) const;

  int id(std::string_view token) const;
  const std::string& token(int id) const;
  std::size_t size() const { return tokens_.size(); }
  std::size_t count(int id) const { return counts_.at(static_cast<std::size_t>(id)); }
  std::size_t min_frequency() const { return min_frequency_; }

  // Maps each token (UNK for unknowns) and appends EOS.
  std::vector<int> encode(const Sentence& sentence) const;
  // Drops a trailing EOS.
  Sentence decode(std::span<const int> ids) const;

 private:
  void add(std::string token, std::size_t count);

  std::vector<std::string> tokens_;
  std::vector<std::size_t> counts_;
  std::unordered_map<std::string, int> ids_;
  std::size_t min_frequency_ = 1;
};

// Dependency labels, no reserved entries; ids in descending frequency,
// ties lexicographic.
class LabelSet {
 public:
  static LabelSet build(const std::vector<std::pair<std::string, std::size_t>>& counts);
  static LabelSet load(std::istream& in);
  void save(std::ostream& out) const;

  // -1 when absent.
  int find(std::string_view label) const;
  int id(std::string_view label) const;
  const std::string& name(int id) const;
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::vector<std::size_t> counts_;
  std::unordered_map<std::string, int> ids_;
};

// 64-bit FNV-1a; stable across platforms and runs.
std::uint64_t content_hash(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::vector<Sentence> read_sentences(std::istream& in);
Sentence split_tokens(std::string_view line);

}  // namespace nmtrnng::data
