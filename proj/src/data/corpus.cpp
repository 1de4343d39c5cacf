#include "nmtrnng/data/corpus.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "nmtrnng/core/errors.hpp"

namespace nmtrnng::data {

FilterResult filter_corpus(std::vector<RawPair> pairs, std::size_t max_length) {
  FilterResult result;
  for (auto& pair : pairs) {
    if (pair.source.empty() || pair.target.empty()) {
      ++result.dropped_empty;
    } else if (pair.source.size() > max_length || pair.target.size() > max_length) {
      ++result.dropped_length;
    } else {
      result.kept.push_back(std::move(pair));
    }
  }
  return result;
}

std::vector<RawPair> align_corpus(std::vector<Sentence> source, std::vector<Sentence> target,
                                  const std::vector<ConllSentence>* parses) {
  if (source.size() != target.size()) {
    throw ParseError("source has " + std::to_string(source.size()) + " lines but target has " +
                     std::to_string(target.size()));
  }
  std::vector<RawPair> pairs(source.size());
  std::size_t next_parse = 0;
  for (std::size_t i = 0; i < source.size(); ++i) {
    RawPair& p = pairs[i];
    p.line = i + 1;
    p.source = std::move(source[i]);
    p.target = std::move(target[i]);
    if (!parses || p.target.empty()) continue;
    if (next_parse >= parses->size()) {
      throw ParseError("target line " + std::to_string(p.line) + " has no parse block");
    }
    const ConllSentence& parse = (*parses)[next_parse++];
    const bool same = parse.words() == p.target.size() &&
                      std::equal(p.target.begin(), p.target.end(), parse.forms.begin());
    if (!same) {
      throw ParseError("target line " + std::to_string(p.line) +
                       " does not match the parse block at line " +
                       std::to_string(parse.first_line));
    }
    p.parse = parse;
  }
  if (parses && next_parse != parses->size()) {
    throw ParseError("parse file has " + std::to_string(parses->size()) +
                     " blocks for " + std::to_string(next_parse) + " non-empty target lines");
  }
  return pairs;
}

std::vector<std::vector<int>> read_id_lines(std::istream& in) {
  std::vector<std::vector<int>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<int> ids;
    for (const auto& tok : split_tokens(line)) {
      try {
        ids.push_back(std::stoi(tok));
      } catch (const std::exception&) {
        throw ParseError("id file line " + std::to_string(line_no) + ": bad id '" + tok + "'");
      }
    }
    out.push_back(std::move(ids));
  }
  return out;
}

void write_id_lines(std::ostream& out, const std::vector<std::vector<int>>& lines) {
  for (const auto& ids : lines) {
    for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? " " : "") << ids[i];
    out << '\n';
  }
}

std::vector<rnng::ActionSequence> read_action_lines(std::istream& in, const LabelSet& labels) {
  std::vector<rnng::ActionSequence> out;
  std::string line;
  while (std::getline(in, line)) {
    rnng::ActionSequence actions;
    for (const auto& tok : split_tokens(line)) actions.push_back(parse_action(tok, labels));
    out.push_back(std::move(actions));
  }
  return out;
}

void write_action_line(std::ostream& out, std::span<const rnng::Action> actions,
                       const LabelSet& labels) {
  for (std::size_t i = 0; i < actions.size(); ++i) {
    out << (i ? " " : "") << format_action(actions[i], labels);
  }
  out << '\n';
}

}  // namespace nmtrnng::data
