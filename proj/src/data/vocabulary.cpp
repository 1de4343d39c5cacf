#include "nmtrnng/data/vocabulary.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "nmtrnng/core/errors.hpp"

namespace nmtrnng::data {

namespace {

bool frequency_order(const std::pair<std::string, std::size_t>& a,
                     const std::pair<std::string, std::size_t>& b) {
  if (a.second != b.second) return a.second > b.second;
  return a.first < b.first;
}

std::vector<std::pair<std::string, std::size_t>> read_counts(std::istream& in,
                                                             const char* what) {
  std::vector<std::pair<std::string, std::size_t>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ParseError(std::string(what) + " line " + std::to_string(line_no) +
                       ": expected token<TAB>count");
    }
    std::size_t count = 0;
    try {
      count = std::stoul(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw ParseError(std::string(what) + " line " + std::to_string(line_no) +
                       ": bad count");
    }
    rows.emplace_back(line.substr(0, tab), count);
  }
  return rows;
}

}  // namespace

Vocabulary::Vocabulary() {
  add(std::string(kUnkToken), 0);
  add(std::string(kEosToken), 0);
}

void Vocabulary::add(std::string token, std::size_t count) {
  ids_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(std::move(token));
  counts_.push_back(count);
}

Vocabulary Vocabulary::build(const std::vector<Sentence>& corpus, std::size_t min_frequency) {
  if (corpus.empty()) throw VocabularyError("cannot build a vocabulary from an empty corpus");
  std::map<std::string, std::size_t> freq;
  for (const auto& sentence : corpus) {
    for (const auto& token : sentence) ++freq[token];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [token, count] : freq) {
    if (token == kUnkToken || token == kEosToken) continue;
    if (count >= std::max<std::size_t>(min_frequency, 1)) kept.emplace_back(token, count);
  }
  std::sort(kept.begin(), kept.end(), frequency_order);
  Vocabulary v;
  v.min_frequency_ = min_frequency;
  v.counts_[model::kEosId] = corpus.size();
  for (auto& [token, count] : kept) v.add(token, count);
  return v;
}

Vocabulary Vocabulary::load(std::istream& in) {
  Vocabulary v;
  for (auto& [token, count] : read_counts(in, "vocabulary")) {
    if (v.ids_.count(token)) {
      throw ParseError("vocabulary: duplicate token '" + token + "'");
    }
    v.add(token, count);
  }
  return v;
}

void Vocabulary::save(std::ostream& out) const {
  for (std::size_t i = 2; i < tokens_.size(); ++i) {
    out << tokens_[i] << '\t' << counts_[i] << '\n';
  }
}

int Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? model::kUnkId : it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw VocabularyError("token id " + std::to_string(id) + " out of range");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<int> Vocabulary::encode(const Sentence& sentence) const {
  std::vector<int> ids;
  ids.reserve(sentence.size() + 1);
  for (const auto& token : sentence) ids.push_back(id(token));
  ids.push_back(model::kEosId);
  return ids;
}

Sentence Vocabulary::decode(std::span<const int> ids) const {
  Sentence out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i + 1 == ids.size() && ids[i] == model::kEosId) break;
    out.push_back(token(ids[i]));
  }
  return out;
}

LabelSet LabelSet::build(const std::vector<std::pair<std::string, std::size_t>>& counts) {
  std::map<std::string, std::size_t> merged;
  for (const auto& [name, count] : counts) merged[name] += count;
  std::vector<std::pair<std::string, std::size_t>> sorted(merged.begin(), merged.end());
  std::sort(sorted.begin(), sorted.end(), frequency_order);
  LabelSet set;
  for (auto& [name, count] : sorted) {
    set.ids_.emplace(name, static_cast<int>(set.names_.size()));
    set.names_.push_back(name);
    set.counts_.push_back(count);
  }
  return set;
}

LabelSet LabelSet::load(std::istream& in) {
  LabelSet set;
  for (auto& [name, count] : read_counts(in, "label set")) {
    if (set.ids_.count(name)) throw ParseError("label set: duplicate label '" + name + "'");
    set.ids_.emplace(name, static_cast<int>(set.names_.size()));
    set.names_.push_back(name);
    set.counts_.push_back(count);
  }
  return set;
}

void LabelSet::save(std::ostream& out) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    out << names_[i] << '\t' << counts_[i] << '\n';
  }
}

int LabelSet::find(std::string_view label) const {
  auto it = ids_.find(std::string(label));
  return it == ids_.end() ? -1 : it->second;
}

int LabelSet::id(std::string_view label) const {
  const int found = find(label);
  if (found < 0) throw VocabularyError("unknown dependency label '" + std::string(label) + "'");
  return found;
}

const std::string& LabelSet::name(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= names_.size()) {
    throw VocabularyError("label id " + std::to_string(id) + " out of range");
  }
  return names_[static_cast<std::size_t>(id)];
}

std::uint64_t content_hash(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Sentence split_tokens(std::string_view line) {
  Sentence out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<Sentence> read_sentences(std::istream& in) {
  std::vector<Sentence> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(split_tokens(line));
  return out;
}

}  // namespace nmtrnng::data
