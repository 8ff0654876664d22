#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace readlevel {

/// Labelling scheme a level was read under. Both map onto the integers 1..5;
/// for CEFR, 1 is A2 and 5 is C2.
enum class LevelScheme { WeeBitAge, Cefr };

struct Level {
  int value = 1;
  LevelScheme scheme = LevelScheme::WeeBitAge;

  friend bool operator==(const Level&, const Level&) = default;
};

inline constexpr int kMinLevel = 1;
inline constexpr int kMaxLevel = 5;
inline constexpr int kNumLevels = kMaxLevel - kMinLevel + 1;

/// Accepts "1".."5", "level1".."level5" and the CEFR names "A2".."C2"
/// (case-insensitive). Throws DataError for anything else.
Level parse_level(std::string_view s);
std::string level_name(const Level& level);

enum class Domain { Native, L2 };

Domain parse_domain(std::string_view s);
std::string_view domain_name(Domain d);

inline constexpr int kNoHead = -1;

/// One token of an annotated sentence. Empty strings mean "not annotated";
/// head is kNoHead when the document carries no dependency layer.
struct Token {
  std::string surface;
  std::string lemma;
  std::string pos;  // universal POS tag
  int head = kNoHead;
  std::string deprel;
  std::string ne = "O";

  friend bool operator==(const Token&, const Token&) = default;
};

using Sentence = std::vector<Token>;

/// An immutable annotated text. The constructor validates the annotation
/// layers: every sentence is nonempty, POS and dependency layers are either
/// present on every token or on none, heads stay inside their sentence, and
/// each sentence has exactly one root.
class Document {
 public:
  Document(std::string id, std::vector<Sentence> sentences, std::optional<Level> label = std::nullopt,
           Domain domain = Domain::Native);

  const std::string& id() const { return id_; }
  const std::vector<Sentence>& sentences() const { return sentences_; }
  const std::optional<Level>& label() const { return label_; }
  Domain domain() const { return domain_; }

  std::size_t sentence_count() const { return sentences_.size(); }
  /// Number of tokens, punctuation included.
  std::size_t word_count() const { return word_count_; }

  bool has_pos() const { return has_pos_; }
  bool has_syntax() const { return has_syntax_; }
  bool surface_only() const { return !has_pos_ && !has_syntax_; }

  /// Same text with different metadata.
  Document relabeled(std::optional<Level> label, Domain domain) const;

  friend bool operator==(const Document&, const Document&) = default;

 private:
  std::string id_;
  std::vector<Sentence> sentences_;
  std::optional<Level> label_;
  Domain domain_ = Domain::Native;
  std::size_t word_count_ = 0;
  bool has_pos_ = false;
  bool has_syntax_ = false;
};

/// The closed universal POS tagset accepted in annotation files.
bool is_known_upos(std::string_view tag);

/// Reads one document from a 10-column CoNLL-U style file. Multiword-token
/// ranges ("3-4") and empty nodes ("5.1") are skipped. The NE tag is taken
/// from a "NE=<tag>" entry of the MISC column.
Document read_annotation_file(const std::filesystem::path& path, std::string id,
                              std::optional<Level> label, Domain domain);
Document read_annotation(std::istream& in, const std::string& source_name, std::string id,
                         std::optional<Level> label, Domain domain);

void write_annotation(const Document& doc, std::ostream& out);
void write_annotation_file(const Document& doc, const std::filesystem::path& path);

/// Loads every document named in a manifest TSV (columns: id, file, level,
/// domain; an optional header row starting with "id"). Files are resolved
/// relative to `dir`. A level of "-" or "" leaves the document unlabelled.
std::vector<Document> load_corpus(const std::filesystem::path& dir, const std::filesystem::path& manifest);

/// Abbreviations that do not end a sentence when followed by a period.
const std::vector<std::string_view>& sentence_abbreviations();

/// Splits raw text into sentences and word tokens. The result has no POS or
/// dependency layer. Punctuation is dropped; apostrophes and hyphens between
/// letters stay inside the word.
Document tokenize_plaintext(std::string_view text, std::string id = "plaintext");

/// Vowel-group syllable estimate (vowels a,e,i,o,u,y) with a silent final
/// "e" rule. Always at least 1; words without letters count as 1.
int count_syllables(std::string_view word);

}  // namespace readlevel
