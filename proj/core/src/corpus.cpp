#include "readlevel/corpus.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>

#include "readlevel/error.hpp"
#include "readlevel/text.hpp"

namespace readlevel {

namespace {

constexpr std::array<std::string_view, 5> kCefrNames = {"A2", "B1", "B2", "C1", "C2"};

constexpr std::array<std::string_view, 17> kUpos = {
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};

std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

// Checks the head layer of one sentence; returns an error message or "".
std::string check_heads(const Sentence& sentence) {
  const int n = static_cast<int>(sentence.size());
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const int head = sentence[static_cast<std::size_t>(i)].head;
    if (head < 0 || head > n) {
      return fmt::format("token {} has head {} outside [0, {}]", i + 1, head, n);
    }
    if (head == i + 1) return fmt::format("token {} is its own head", i + 1);
    if (head == 0) ++roots;
  }
  if (roots != 1) return fmt::format("sentence has {} root tokens, expected exactly 1", roots);
  for (int i = 0; i < n; ++i) {
    int node = i + 1;
    int steps = 0;
    while (node != 0 && steps <= n) {
      node = sentence[static_cast<std::size_t>(node - 1)].head;
      ++steps;
    }
    if (node != 0) return fmt::format("token {} is on a head cycle", i + 1);
  }
  return {};
}

}  // namespace

Level parse_level(std::string_view s) {
  const std::string t = text::to_lower(text::trim(s));
  for (std::size_t i = 0; i < kCefrNames.size(); ++i) {
    if (t == text::to_lower(kCefrNames[i])) return Level{static_cast<int>(i) + 1, LevelScheme::Cefr};
  }
  std::string_view digits = t;
  if (digits.starts_with("level")) digits.remove_prefix(5);
  if (auto v = parse_int(digits); v && *v >= kMinLevel && *v <= kMaxLevel) {
    return Level{*v, LevelScheme::WeeBitAge};
  }
  throw DataError(fmt::format("unknown level '{}'", s));
}

std::string level_name(const Level& level) {
  if (level.scheme == LevelScheme::Cefr) return std::string(kCefrNames.at(static_cast<std::size_t>(level.value - 1)));
  return std::to_string(level.value);
}

Domain parse_domain(std::string_view s) {
  const std::string t = text::to_lower(text::trim(s));
  if (t == "native") return Domain::Native;
  if (t == "l2") return Domain::L2;
  throw DataError(fmt::format("unknown domain '{}' (expected native or L2)", s));
}

std::string_view domain_name(Domain d) { return d == Domain::Native ? "native" : "L2"; }

bool is_known_upos(std::string_view tag) {
  return std::find(kUpos.begin(), kUpos.end(), tag) != kUpos.end();
}

Document::Document(std::string id, std::vector<Sentence> sentences, std::optional<Level> label, Domain domain)
    : id_(std::move(id)), sentences_(std::move(sentences)), label_(label), domain_(domain) {
  if (sentences_.empty()) throw DataError(fmt::format("document '{}' has no sentences", id_));
  if (label_ && (label_->value < kMinLevel || label_->value > kMaxLevel)) {
    throw DataError(fmt::format("document '{}' has level {} outside [1, 5]", id_, label_->value));
  }
  std::size_t with_pos = 0;
  std::size_t with_head = 0;
  for (const auto& sentence : sentences_) {
    if (sentence.empty()) throw DataError(fmt::format("document '{}' has an empty sentence", id_));
    for (const auto& tok : sentence) {
      if (tok.surface.empty()) throw DataError(fmt::format("document '{}' has a token with empty surface", id_));
      if (!tok.pos.empty()) ++with_pos;
      if (tok.head != kNoHead) ++with_head;
    }
    word_count_ += sentence.size();
  }
  if (with_pos != 0 && with_pos != word_count_) {
    throw DataError(fmt::format("document '{}': POS tags present on only some tokens", id_));
  }
  if (with_head != 0 && with_head != word_count_) {
    throw DataError(fmt::format("document '{}': dependency heads present on only some tokens", id_));
  }
  has_pos_ = with_pos != 0;
  has_syntax_ = with_head != 0;
  if (has_syntax_) {
    for (std::size_t s = 0; s < sentences_.size(); ++s) {
      if (auto msg = check_heads(sentences_[s]); !msg.empty()) {
        throw DataError(fmt::format("document '{}', sentence {}: {}", id_, s + 1, msg));
      }
    }
  }
}

Document Document::relabeled(std::optional<Level> label, Domain domain) const {
  Document copy = *this;
  copy.label_ = label;
  copy.domain_ = domain;
  return copy;
}

Document read_annotation(std::istream& in, const std::string& source_name, std::string id,
                         std::optional<Level> label, Domain domain) {
  std::vector<Sentence> sentences;
  Sentence current;
  std::size_t sentence_first_line = 0;
  std::size_t line_no = 0;
  std::string line;

  auto fail = [&](std::size_t at, const std::string& msg) -> DataError {
    return DataError(fmt::format("{}:{}: {}", source_name, at, msg));
  };
  auto flush = [&]() {
    if (current.empty()) return;
    const bool any_head = std::any_of(current.begin(), current.end(), [](const Token& t) { return t.head != kNoHead; });
    if (any_head) {
      if (auto msg = check_heads(current); !msg.empty()) throw fail(sentence_first_line, msg);
    }
    sentences.push_back(std::move(current));
    current.clear();
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') continue;
    const auto cols = text::split(line, '\t');
    if (cols.size() != 10) {
      throw fail(line_no, fmt::format("expected 10 tab-separated columns, found {}", cols.size()));
    }
    if (cols[0].find_first_of("-.") != std::string::npos) continue;
    const auto token_id = parse_int(cols[0]);
    if (!token_id) throw fail(line_no, fmt::format("bad token id '{}'", cols[0]));
    if (*token_id != static_cast<int>(current.size()) + 1) {
      throw fail(line_no, fmt::format("token id {} out of sequence (expected {})", *token_id, current.size() + 1));
    }
    if (current.empty()) sentence_first_line = line_no;

    Token tok;
    tok.surface = cols[1];
    if (tok.surface.empty()) throw fail(line_no, "empty FORM column");
    tok.lemma = cols[2] == "_" ? "" : cols[2];
    if (cols[3] != "_") {
      if (!is_known_upos(cols[3])) throw fail(line_no, fmt::format("unknown UPOS tag '{}'", cols[3]));
      tok.pos = cols[3];
    }
    if (cols[6] != "_") {
      const auto head = parse_int(cols[6]);
      if (!head) throw fail(line_no, fmt::format("bad HEAD '{}'", cols[6]));
      tok.head = *head;
      // Range check against the finished sentence length happens at flush;
      // negative values are rejected immediately.
      if (*head < 0) throw fail(line_no, fmt::format("negative HEAD {}", *head));
    }
    tok.deprel = cols[7] == "_" ? "" : cols[7];
    if (cols[9] != "_") {
      for (const auto& item : text::split(cols[9], '|')) {
        if (item.starts_with("NE=")) tok.ne = item.substr(3);
      }
      if (tok.ne.empty()) throw fail(line_no, "empty NE tag in MISC");
    }
    current.push_back(std::move(tok));
  }
  flush();
  if (sentences.empty()) throw DataError(fmt::format("{}: no sentences found", source_name));
  try {
    return Document(std::move(id), std::move(sentences), label, domain);
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", source_name, e.what()));
  }
}

Document read_annotation_file(const std::filesystem::path& path, std::string id, std::optional<Level> label,
                              Domain domain) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open annotation file '{}'", path.string()));
  return read_annotation(in, path.string(), std::move(id), label, domain);
}

void write_annotation(const Document& doc, std::ostream& out) {
  out << "# doc_id = " << doc.id() << '\n';
  for (const auto& sentence : doc.sentences()) {
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      const Token& t = sentence[i];
      const auto or_blank = [](const std::string& s) -> const std::string& {
        static const std::string blank = "_";
        return s.empty() ? blank : s;
      };
      out << (i + 1) << '\t' << t.surface << '\t' << or_blank(t.lemma) << '\t' << or_blank(t.pos) << "\t_\t_\t";
      if (t.head == kNoHead) {
        out << '_';
      } else {
        out << t.head;
      }
      out << '\t' << or_blank(t.deprel) << "\t_\t";
      if (t.ne == "O") {
        out << '_';
      } else {
        out << "NE=" << t.ne;
      }
      out << '\n';
    }
    out << '\n';
  }
}

void write_annotation_file(const Document& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  write_annotation(doc, out);
}

std::vector<Document> load_corpus(const std::filesystem::path& dir, const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw DataError(fmt::format("cannot open manifest '{}'", manifest.string()));

  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto cols = text::split(line, '\t');
    if (line_no == 1 && text::to_lower(text::trim(cols[0])) == "id") continue;
    if (cols.size() != 4) {
      throw DataError(fmt::format("{}:{}: expected 4 columns (id, file, level, domain), found {}", manifest.string(),
                                  line_no, cols.size()));
    }
    const std::string id = text::trim(cols[0]);
    if (id.empty()) throw DataError(fmt::format("{}:{}: empty document id", manifest.string(), line_no));
    if (!seen.insert(id).second) {
      throw DataError(fmt::format("{}:{}: duplicate document id '{}'", manifest.string(), line_no, id));
    }
    std::optional<Level> label;
    const std::string level_str = text::trim(cols[2]);
    try {
      if (!level_str.empty() && level_str != "-") label = parse_level(level_str);
      const Domain domain = parse_domain(cols[3]);
      const auto path = dir / text::trim(cols[1]);
      if (!std::filesystem::exists(path)) throw DataError(fmt::format("missing annotation file '{}'", path.string()));
      docs.push_back(read_annotation_file(path, id, label, domain));
    } catch (const DataError& e) {
      throw DataError(fmt::format("{}:{}: {}", manifest.string(), line_no, e.what()));
    }
  }
  return docs;
}

const std::vector<std::string_view>& sentence_abbreviations() {
  static const std::vector<std::string_view> list = {
      "mr", "mrs", "ms", "dr", "prof", "rev", "gen", "sen", "rep", "st", "jr", "sr", "vs",
      "e.g", "i.e", "cf", "fig", "no", "approx", "dept", "est", "inc", "ltd", "co", "corp", "mt"};
  return list;
}

namespace {

bool ends_with_abbreviation(std::string_view text, std::size_t period_pos) {
  std::size_t start = period_pos;
  while (start > 0 && text[start - 1] != ' ' && text[start - 1] != '\t' && text[start - 1] != '\n' &&
         text[start - 1] != '\r') {
    --start;
  }
  std::string_view chunk = text.substr(start, period_pos - start);
  while (!chunk.empty() && !text::is_word_byte(chunk.front())) chunk.remove_prefix(1);
  if (chunk.empty()) return false;
  if (chunk.size() == 1 && chunk[0] >= 'A' && chunk[0] <= 'Z') return true;  // initial
  const std::string lower = text::to_lower(chunk);
  const auto& abbr = sentence_abbreviations();
  return std::find(abbr.begin(), abbr.end(), lower) != abbr.end();
}

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}'; }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

}  // namespace

Document tokenize_plaintext(std::string_view input, std::string id) {
  if (text::trim(input).empty()) throw DataError("cannot tokenize empty text");

  std::vector<Sentence> sentences;
  Sentence current;
  auto end_sentence = [&]() {
    if (!current.empty()) sentences.push_back(std::move(current));
    current.clear();
  };

  const std::size_t n = input.size();
  std::size_t i = 0;
  while (i < n) {
    const char c = input[i];
    if (text::is_word_byte(c)) {
      std::size_t j = i;
      while (j < n) {
        if (text::is_word_byte(input[j])) {
          ++j;
        } else if ((input[j] == '\'' || input[j] == '-') && j + 1 < n && text::is_word_byte(input[j + 1])) {
          j += 2;
        } else {
          break;
        }
      }
      Token tok;
      tok.surface = std::string(input.substr(i, j - i));
      current.push_back(std::move(tok));
      i = j;
      continue;
    }
    if (c == '.' || c == '!' || c == '?') {
      std::size_t j = i;
      while (j < n && (input[j] == '.' || input[j] == '!' || input[j] == '?')) ++j;
      std::size_t k = j;
      while (k < n && is_closer(input[k])) ++k;
      const bool boundary = k == n || is_space(input[k]);
      const bool single_period = (j - i == 1) && c == '.';
      if (boundary && !(single_period && ends_with_abbreviation(input, i))) end_sentence();
      i = j;
      continue;
    }
    ++i;
  }
  end_sentence();
  if (sentences.empty()) throw DataError("text contains no words");
  return Document(std::move(id), std::move(sentences));
}

int count_syllables(std::string_view word) {
  std::string w;
  for (char c : word) {
    w.push_back(text::is_ascii_alpha(c) ? static_cast<char>(c | 0x20) : (text::is_word_byte(c) ? '#' : ' '));
  }
  // '#' marks non-ASCII letters and digits: consonant-like. ' ' breaks groups.
  const auto is_vowel = [](char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
  };
  if (std::none_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; })) return 1;

  int groups = 0;
  bool in_group = false;
  for (char c : w) {
    if (is_vowel(c)) {
      if (!in_group) ++groups;
      in_group = true;
    } else {
      in_group = false;
    }
  }
  while (!w.empty() && !(w.back() >= 'a' && w.back() <= 'z')) w.pop_back();
  const std::size_t len = w.size();
  const bool silent_e = len >= 2 && w[len - 1] == 'e' && !is_vowel(w[len - 2]);
  if (silent_e && groups > 1) --groups;
  return std::max(groups, 1);
}

}  // namespace readlevel
