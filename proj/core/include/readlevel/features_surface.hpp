#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "readlevel/corpus.hpp"
#include "readlevel/lexicons.hpp"

namespace readlevel {

inline constexpr std::size_t kTraditionalFeatureCount = 7;
inline constexpr std::size_t kTtrFeatureCount = 4;
inline constexpr std::size_t kPosLexicalFeatureCount = 13;
inline constexpr std::size_t kWordlistFeatureCount = 8;

// Word tokens are tokens containing at least one letter or digit; every
// count and proportion below is taken over them.

/// [sentences, mean words/sentence, max words/sentence, mean chars/word,
///  mean syllables/word, Flesch-Kincaid grade, Coleman-Liau index]
std::array<double, kTraditionalFeatureCount> traditional_features(const Document& doc);
std::span<const std::string_view> traditional_feature_names();

/// 0.39 * words/sentence + 11.8 * syllables/word - 15.59
double flesch_kincaid_grade(double words, double sentences, double syllables);
/// 0.0588 * letters per 100 words - 0.296 * sentences per 100 words - 15.8
double coleman_liau_index(double letters, double words, double sentences);

/// [TTR, Root TTR = T/sqrt(N), Corrected TTR = T/sqrt(2N), Bilogarithmic
///  TTR = ln T / ln N] over lowercased word forms. Bilog is 1 when N = 1.
std::array<double, kTtrFeatureCount> ttr_features(const Document& doc);
std::array<double, kTtrFeatureCount> ttr_features(std::span<const std::string> words);
std::span<const std::string_view> ttr_feature_names();

/// The five lexical classes, in feature order.
enum class LexicalClass { Noun, Adjective, Verb, Adverb, Preposition };
inline constexpr std::size_t kLexicalClassCount = 5;

/// Lexical class of a universal POS tag, if any (NOUN/PROPN, ADJ, VERB, ADV, ADP).
std::optional<LexicalClass> lexical_class(std::string_view upos);
/// Content words are nouns, verbs, adjectives and adverbs.
bool is_content_upos(std::string_view upos);

/// [variation x5 (per-class type/token), density x5 (per-class share of
///  words), content-word share, function-word share, pooled lexical density]
/// Classes in LexicalClass order. Requires POS tags.
std::array<double, kPosLexicalFeatureCount> pos_lexical_features(const Document& doc);
std::span<const std::string_view> pos_lexical_feature_names();

/// [AWL share, CEFR A1..C2 shares, CEFR out-of-vocabulary share]. Lookup
/// tries the lemma, then the lowercased surface form.
std::array<double, kWordlistFeatureCount> wordlist_features(const Document& doc, const WordList& awl,
                                                            const CefrLexicon& evp);
std::span<const std::string_view> wordlist_feature_names();

}  // namespace readlevel
