#include "readlevel/lexicons.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "readlevel/error.hpp"
#include "readlevel/text.hpp"

namespace readlevel {

namespace {

constexpr std::array<std::string_view, kCefrLexiconLevels> kLexiconLevels = {"A1", "A2", "B1", "B2", "C1", "C2"};

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  return in;
}

// Strips a trailing '\r' and '#' comments; returns false for lines that are
// blank afterwards.
bool clean_line(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
  return !text::trim(line).empty();
}

}  // namespace

WordList::WordList(std::set<std::string, std::less<>> entries) : entries_(std::move(entries)) {}

bool WordList::contains(std::string_view word) const { return entries_.find(text::to_lower(word)) != entries_.end(); }

WordList read_wordlist(std::istream& in, const std::string& source_name) {
  std::set<std::string, std::less<>> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!clean_line(line)) continue;
    entries.insert(text::to_lower(text::trim(line)));
  }
  if (entries.empty()) throw DataError(fmt::format("word list '{}' is empty", source_name));
  return WordList(std::move(entries));
}

WordList load_wordlist(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_wordlist(in, path.string());
}

int parse_cefr_lexicon_level(std::string_view s) {
  const std::string t = text::trim(s);
  for (std::size_t i = 0; i < kLexiconLevels.size(); ++i) {
    if (text::to_lower(t) == text::to_lower(kLexiconLevels[i])) return static_cast<int>(i) + 1;
  }
  throw DataError(fmt::format("unknown CEFR level '{}'", s));
}

std::string_view cefr_lexicon_level_name(int level) {
  return kLexiconLevels.at(static_cast<std::size_t>(level - 1));
}

int CefrLexicon::Entry::level() const {
  int best = kCefrLexiconLevels;
  for (const auto& [sense, lvl] : senses) best = std::min(best, lvl);
  return best;
}

void CefrLexicon::add(Row row) {
  if (row.level < 1 || row.level > kCefrLexiconLevels) {
    throw DataError(fmt::format("CEFR level {} outside [1, 6] for '{}'", row.level, row.lemma));
  }
  row.lemma = text::to_lower(row.lemma);
  row.pos = text::to_lower(row.pos);
  auto& entry = rows_[{row.lemma, row.pos}];
  auto [it, inserted] = entry.senses.emplace(row.sense, row.level);
  if (!inserted && it->second != row.level) {
    throw DataError(fmt::format("conflicting levels {} and {} for '{}' ({})", cefr_lexicon_level_name(it->second),
                                cefr_lexicon_level_name(row.level), row.lemma, row.pos));
  }
}

std::optional<int> CefrLexicon::lookup(std::string_view lemma, std::string_view pos) const {
  const std::string key = text::to_lower(lemma);
  if (!pos.empty() && pos != "*") {
    if (auto it = rows_.find({key, text::to_lower(pos)}); it != rows_.end()) return it->second.level();
  }
  if (auto it = rows_.find({key, "*"}); it != rows_.end()) return it->second.level();
  return std::nullopt;
}

std::vector<CefrLexicon::Row> CefrLexicon::rows() const {
  std::vector<Row> out;
  for (const auto& [key, entry] : rows_) {
    for (const auto& [sense, level] : entry.senses) out.push_back(Row{key.first, key.second, level, sense});
  }
  std::sort(out.begin(), out.end());
  return out;
}

CefrLexicon read_cefr_lexicon(std::istream& in, const std::string& source_name) {
  CefrLexicon lexicon;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!clean_line(line)) continue;
    const auto cols = text::split(line, '\t');
    if (cols.size() != 3 && cols.size() != 4) {
      throw DataError(fmt::format("{}:{}: expected lemma, pos, level[, sense]", source_name, line_no));
    }
    try {
      CefrLexicon::Row row{text::trim(cols[0]), text::trim(cols[1]), parse_cefr_lexicon_level(cols[2]),
                           cols.size() == 4 ? text::trim(cols[3]) : std::string()};
      if (row.lemma.empty() || row.pos.empty()) throw DataError("empty lemma or pos");
      lexicon.add(std::move(row));
    } catch (const DataError& e) {
      throw DataError(fmt::format("{}:{}: {}", source_name, line_no, e.what()));
    }
  }
  if (lexicon.size() == 0) throw DataError(fmt::format("CEFR lexicon '{}' is empty", source_name));
  return lexicon;
}

CefrLexicon load_cefr_lexicon(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_cefr_lexicon(in, path.string());
}

void write_cefr_lexicon(const CefrLexicon& lexicon, std::ostream& out) {
  for (const auto& row : lexicon.rows()) {
    out << row.lemma << '\t' << row.pos << '\t' << cefr_lexicon_level_name(row.level);
    if (!row.sense.empty()) out << '\t' << row.sense;
    out << '\n';
  }
}

std::string_view lexicon_pos_for_upos(std::string_view upos) {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 13> table = {{
      {"NOUN", "noun"},
      {"PROPN", "noun"},
      {"VERB", "verb"},
      {"AUX", "verb"},
      {"ADJ", "adjective"},
      {"ADV", "adverb"},
      {"ADP", "preposition"},
      {"PRON", "pronoun"},
      {"DET", "determiner"},
      {"CCONJ", "conjunction"},
      {"SCONJ", "conjunction"},
      {"NUM", "number"},
      {"INTJ", "exclamation"},
  }};
  for (const auto& [tag, name] : table) {
    if (tag == upos) return name;
  }
  return {};
}

Relation parse_relation(std::string_view s) {
  const std::string t = text::to_lower(text::trim(s));
  if (t == "synonym") return Relation::Synonym;
  if (t == "hypernym") return Relation::Hypernym;
  if (t == "hyponym") return Relation::Hyponym;
  throw DataError(fmt::format("unknown relation '{}'", s));
}

std::string_view relation_name(Relation r) {
  switch (r) {
    case Relation::Synonym:
      return "synonym";
    case Relation::Hypernym:
      return "hypernym";
    case Relation::Hyponym:
      return "hyponym";
  }
  return "";
}

void RelationTable::add(std::string a, Relation rel, std::string b) {
  a = text::to_lower(a);
  b = text::to_lower(b);
  switch (rel) {
    case Relation::Synonym:
      triples_.emplace(a, Relation::Synonym, b);
      triples_.emplace(b, Relation::Synonym, a);
      break;
    case Relation::Hypernym:
      triples_.emplace(a, Relation::Hypernym, b);
      triples_.emplace(b, Relation::Hyponym, a);
      break;
    case Relation::Hyponym:
      triples_.emplace(a, Relation::Hyponym, b);
      triples_.emplace(b, Relation::Hypernym, a);
      break;
  }
  linked_.emplace(a, b);
  linked_.emplace(b, a);
}

bool RelationTable::contains(const std::string& a, Relation rel, const std::string& b) const {
  return triples_.count({a, rel, b}) != 0;
}

RelationTable read_relation_table(std::istream& in, const std::string& source_name) {
  RelationTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!clean_line(line)) continue;
    const auto cols = text::split(line, '\t');
    if (cols.size() != 3) throw DataError(fmt::format("{}:{}: expected word, relation, word", source_name, line_no));
    try {
      table.add(text::trim(cols[0]), parse_relation(cols[1]), text::trim(cols[2]));
    } catch (const DataError& e) {
      throw DataError(fmt::format("{}:{}: {}", source_name, line_no, e.what()));
    }
  }
  return table;
}

RelationTable load_relation_table(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_relation_table(in, path.string());
}

bool related(std::string_view a, std::string_view b, const RelationTable& table) {
  if (a == b) return true;
  return table.linked_.count({std::string(a), std::string(b)}) != 0;
}

}  // namespace readlevel
