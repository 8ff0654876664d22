#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace readlevel {

/// A set of lowercase words, e.g. the Academic Word List.
class WordList {
 public:
  WordList() = default;
  explicit WordList(std::set<std::string, std::less<>> entries);

  /// Case-insensitive.
  bool contains(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }
  const std::set<std::string, std::less<>>& entries() const { return entries_; }

 private:
  std::set<std::string, std::less<>> entries_;
};

/// One line per word, '#' starts a comment. Entries are lowercased and
/// deduplicated; an empty list is an error.
WordList load_wordlist(const std::filesystem::path& path);
WordList read_wordlist(std::istream& in, const std::string& source_name);

/// CEFR level of a lemma: 1 = A1 ... 6 = C2.
inline constexpr int kCefrLexiconLevels = 6;

int parse_cefr_lexicon_level(std::string_view s);
std::string_view cefr_lexicon_level_name(int level);

/// EVP-style vocabulary lexicon. Rows are lemma, part of speech ("*" for a
/// bare entry) and CEFR level, with an optional fourth sense column. When a
/// lemma+pos has several senses, the lowest level wins. Lookup prefers the
/// POS-qualified entry over the bare one.
class CefrLexicon {
 public:
  struct Row {
    std::string lemma;
    std::string pos;  // lowercase; "*" for bare entries
    int level = 1;
    std::string sense;

    friend auto operator<=>(const Row&, const Row&) = default;
  };

  void add(Row row);
  std::optional<int> lookup(std::string_view lemma, std::string_view pos) const;
  /// Rows as stored, sorted.
  std::vector<Row> rows() const;
  std::size_t size() const { return rows_.size(); }

 private:
  struct Entry {
    std::map<std::string, int> senses;  // sense -> level
    int level() const;
  };
  std::map<std::pair<std::string, std::string>, Entry> rows_;
};

CefrLexicon load_cefr_lexicon(const std::filesystem::path& path);
CefrLexicon read_cefr_lexicon(std::istream& in, const std::string& source_name);
void write_cefr_lexicon(const CefrLexicon& lexicon, std::ostream& out);

/// Lexicon POS name for a universal POS tag ("NOUN" -> "noun"); empty when
/// the tag has no lexicon counterpart.
std::string_view lexicon_pos_for_upos(std::string_view upos);

enum class Relation { Synonym, Hypernym, Hyponym };

Relation parse_relation(std::string_view s);
std::string_view relation_name(Relation r);

/// Lexical relations between lemmas. Synonyms are stored in both directions
/// and every hypernym(a, b) has its hyponym(b, a) counterpart.
class RelationTable {
 public:
  void add(std::string a, Relation rel, std::string b);
  bool contains(const std::string& a, Relation rel, const std::string& b) const;
  const std::set<std::tuple<std::string, Relation, std::string>>& triples() const { return triples_; }

 private:
  std::set<std::tuple<std::string, Relation, std::string>> triples_;
  std::set<std::pair<std::string, std::string>> linked_;

  friend bool related(std::string_view a, std::string_view b, const RelationTable& table);
};

RelationTable load_relation_table(const std::filesystem::path& path);
RelationTable read_relation_table(std::istream& in, const std::string& source_name);

/// True for identical lemmas or when one triple links them directly.
bool related(std::string_view a, std::string_view b, const RelationTable& table);

}  // namespace readlevel
