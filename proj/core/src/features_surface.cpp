#include "readlevel/features_surface.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>
#include <vector>

#include <fmt/format.h>

#include "readlevel/error.hpp"
#include "readlevel/text.hpp"

namespace readlevel {

namespace {

constexpr std::array<std::string_view, kTraditionalFeatureCount> kTraditionalNames = {
    "trad_sentences",       "trad_words_per_sentence", "trad_max_words_per_sentence", "trad_chars_per_word",
    "trad_syllables_per_word", "trad_flesch_kincaid",  "trad_coleman_liau"};

constexpr std::array<std::string_view, kTtrFeatureCount> kTtrNames = {"lex_ttr", "lex_root_ttr",
                                                                      "lex_corrected_ttr", "lex_bilog_ttr"};

constexpr std::array<std::string_view, kPosLexicalFeatureCount> kPosLexicalNames = {
    "lex_variation_noun", "lex_variation_adjective", "lex_variation_verb", "lex_variation_adverb",
    "lex_variation_preposition", "lex_density_noun", "lex_density_adjective", "lex_density_verb",
    "lex_density_adverb", "lex_density_preposition", "lex_content_word_share", "lex_function_word_share",
    "lex_lexical_density"};

constexpr std::array<std::string_view, kWordlistFeatureCount> kWordlistNames = {
    "lex_awl_share", "lex_evp_a1", "lex_evp_a2", "lex_evp_b1", "lex_evp_b2", "lex_evp_c1", "lex_evp_c2",
    "lex_evp_oov"};

std::size_t count_words(const Document& doc) {
  std::size_t n = 0;
  for (const auto& s : doc.sentences()) {
    for (const auto& t : s) n += text::is_word(t.surface) ? 1 : 0;
  }
  return n;
}

std::size_t require_words(const Document& doc) {
  const std::size_t n = count_words(doc);
  if (n == 0) throw DataError(fmt::format("document '{}' has no word tokens", doc.id()));
  return n;
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

double flesch_kincaid_grade(double words, double sentences, double syllables) {
  return 0.39 * (words / sentences) + 11.8 * (syllables / words) - 15.59;
}

double coleman_liau_index(double letters, double words, double sentences) {
  const double l = letters / words * 100.0;
  const double s = sentences / words * 100.0;
  return 0.0588 * l - 0.296 * s - 15.8;
}

std::array<double, kTraditionalFeatureCount> traditional_features(const Document& doc) {
  const double words = static_cast<double>(require_words(doc));
  const double sentences = static_cast<double>(doc.sentence_count());
  double chars = 0;
  double letters = 0;
  double syllables = 0;
  double max_len = 0;
  for (const auto& s : doc.sentences()) {
    double len = 0;
    for (const auto& t : s) {
      if (!text::is_word(t.surface)) continue;
      ++len;
      chars += static_cast<double>(text::codepoint_count(t.surface));
      letters += static_cast<double>(text::letter_count(t.surface));
      syllables += count_syllables(t.surface);
    }
    max_len = std::max(max_len, len);
  }
  return {sentences,
          words / sentences,
          max_len,
          chars / words,
          syllables / words,
          flesch_kincaid_grade(words, sentences, syllables),
          coleman_liau_index(letters, words, sentences)};
}

std::span<const std::string_view> traditional_feature_names() { return kTraditionalNames; }

std::array<double, kTtrFeatureCount> ttr_features(std::span<const std::string> words) {
  if (words.empty()) throw DataError("type-token ratios need at least one word");
  std::unordered_set<std::string> types;
  for (const auto& w : words) types.insert(text::to_lower(w));
  const double t = static_cast<double>(types.size());
  const double n = static_cast<double>(words.size());
  const double bilog = words.size() == 1 ? 1.0 : std::log(t) / std::log(n);
  return {t / n, t / std::sqrt(n), t / std::sqrt(2.0 * n), bilog};
}

std::array<double, kTtrFeatureCount> ttr_features(const Document& doc) {
  std::vector<std::string> words;
  for (const auto& s : doc.sentences()) {
    for (const auto& t : s) {
      if (text::is_word(t.surface)) words.push_back(t.surface);
    }
  }
  if (words.empty()) throw DataError(fmt::format("document '{}' has no word tokens", doc.id()));
  return ttr_features(words);
}

std::span<const std::string_view> ttr_feature_names() { return kTtrNames; }

std::optional<LexicalClass> lexical_class(std::string_view upos) {
  if (upos == "NOUN" || upos == "PROPN") return LexicalClass::Noun;
  if (upos == "ADJ") return LexicalClass::Adjective;
  if (upos == "VERB") return LexicalClass::Verb;
  if (upos == "ADV") return LexicalClass::Adverb;
  if (upos == "ADP") return LexicalClass::Preposition;
  return std::nullopt;
}

bool is_content_upos(std::string_view upos) {
  auto c = lexical_class(upos);
  return c && *c != LexicalClass::Preposition;
}

std::array<double, kPosLexicalFeatureCount> pos_lexical_features(const Document& doc) {
  if (!doc.has_pos()) throw DataError(fmt::format("document '{}' has no POS tags", doc.id()));
  const double words = static_cast<double>(require_words(doc));

  std::array<std::set<std::string>, kLexicalClassCount> types;
  std::array<double, kLexicalClassCount> tokens{};
  double content = 0;
  for (const auto& s : doc.sentences()) {
    for (const auto& t : s) {
      if (!text::is_word(t.surface)) continue;
      if (is_content_upos(t.pos)) ++content;
      if (auto c = lexical_class(t.pos)) {
        const auto k = static_cast<std::size_t>(*c);
        ++tokens[k];
        types[k].insert(text::to_lower(t.surface));
      }
    }
  }
  std::array<double, kPosLexicalFeatureCount> out{};
  double pooled = 0;
  for (std::size_t k = 0; k < kLexicalClassCount; ++k) {
    out[k] = safe_ratio(static_cast<double>(types[k].size()), tokens[k]);
    out[kLexicalClassCount + k] = tokens[k] / words;
    pooled += tokens[k];
  }
  out[10] = content / words;
  out[11] = 1.0 - out[10];
  out[12] = pooled / words;
  return out;
}

std::span<const std::string_view> pos_lexical_feature_names() { return kPosLexicalNames; }

std::array<double, kWordlistFeatureCount> wordlist_features(const Document& doc, const WordList& awl,
                                                            const CefrLexicon& evp) {
  const double words = static_cast<double>(require_words(doc));
  std::array<double, kWordlistFeatureCount> counts{};
  for (const auto& s : doc.sentences()) {
    for (const auto& t : s) {
      if (!text::is_word(t.surface)) continue;
      const std::string surface = text::to_lower(t.surface);
      const std::string lemma = t.lemma.empty() ? surface : text::to_lower(t.lemma);
      if (awl.contains(lemma) || awl.contains(surface)) ++counts[0];

      const std::string_view pos = lexicon_pos_for_upos(t.pos);
      std::optional<int> level = evp.lookup(lemma, pos);
      if (!level) level = evp.lookup(surface, pos);
      if (level) {
        ++counts[static_cast<std::size_t>(*level)];
      } else {
        ++counts[7];
      }
    }
  }
  for (double& c : counts) c /= words;
  return counts;
}

std::span<const std::string_view> wordlist_feature_names() { return kWordlistNames; }

}  // namespace readlevel
