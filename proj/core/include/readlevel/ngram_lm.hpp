#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "readlevel/corpus.hpp"

namespace readlevel {

enum class LmSource { Surface, Pos };

std::string_view lm_source_name(LmSource source);
LmSource parse_lm_source(std::string_view s);

inline constexpr int kMaxLmOrder = 5;
inline constexpr std::string_view kSentenceStart = "<s>";
inline constexpr std::string_view kSentenceEnd = "</s>";
inline constexpr std::string_view kUnknownWord = "<unk>";

/// Witten-Bell backoff n-gram model over a closed vocabulary.
///
/// For a context h seen in training with c(h) tokens and T(h) distinct
/// successors, a seen successor w gets c(h,w) / (c(h) + T(h)); the reserved
/// mass T(h) / (c(h) + T(h)) is spread over unseen successors in proportion
/// to the next-shorter context's distribution. The empty context backs off to
/// the uniform distribution over the vocabulary (training types, "</s>" and
/// one "<unk>" type), so every probability is positive and each conditional
/// distribution sums to one. Contexts never seen in training back off
/// directly.
class NgramModel {
 public:
  struct NgramCount {
    std::vector<std::uint32_t> ids;  // context followed by the predicted word
    std::uint64_t count = 0;
  };

  /// Rebuilds a model from raw n-gram counts (as produced by ngram_counts()).
  static NgramModel from_counts(int order, LmSource source, std::vector<std::string> vocabulary,
                                const std::vector<NgramCount>& counts);

  int order() const { return order_; }
  LmSource source() const { return source_; }

  /// Every id-mapped symbol: "<s>", "</s>", "<unk>" and the training types.
  const std::vector<std::string>& symbols() const { return symbols_; }
  /// Symbols that can be predicted (everything except "<s>").
  std::size_t vocabulary_size() const { return symbols_.size() - 1; }

  /// Id for a token already normalised for this model's source; unknown
  /// tokens map to "<unk>".
  std::uint32_t id_of(std::string_view token) const;

  /// P(word | context). Only the last order()-1 context ids are used.
  double prob(std::span<const std::uint32_t> context, std::uint32_t word) const;
  double prob(const std::vector<std::string>& context, std::string_view word) const;

  /// Raw training count of an n-gram (context + word), 0 if unseen.
  std::uint64_t count(const std::vector<std::string>& ngram) const;
  /// Total training tokens following a context, and how many distinct types.
  std::uint64_t context_total(const std::vector<std::string>& context) const;
  std::uint64_t context_types(const std::vector<std::string>& context) const;

  /// All stored contexts of a given length (0 .. order()-1).
  std::vector<std::vector<std::uint32_t>> contexts(std::size_t length) const;

  std::vector<NgramCount> ngram_counts() const;

 private:
  struct Key {
    std::vector<std::uint32_t> ids;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  struct ContextStats {
    std::uint64_t total = 0;
    std::unordered_map<std::uint32_t, std::uint64_t> followers;
    double backoff_weight = 1.0;
  };

  NgramModel(int order, LmSource source, std::vector<std::string> symbols);
  void add(std::span<const std::uint32_t> context, std::uint32_t word, std::uint64_t n);
  void finalize();
  std::vector<std::uint32_t> ids_of(const std::vector<std::string>& tokens) const;
  const ContextStats* find(std::span<const std::uint32_t> context) const;

  int order_ = 1;
  LmSource source_ = LmSource::Surface;
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::uint32_t> index_;
  // levels_[k] holds the contexts of length k.
  std::vector<std::unordered_map<Key, ContextStats, KeyHash>> levels_;

  friend NgramModel train_lm_sentences(const std::vector<std::vector<std::string>>& sentences, int order,
                                       LmSource source);
};

inline constexpr std::uint32_t kStartId = 0;
inline constexpr std::uint32_t kEndId = 1;
inline constexpr std::uint32_t kUnknownId = 2;

/// Tokens a document contributes to a model: lowercased word tokens for the
/// surface source (punctuation skipped), every token's POS tag for the POS source.
std::vector<std::vector<std::string>> lm_sentences(const Document& doc, LmSource source);

/// Trains from already-normalised token sentences; sentences are padded with
/// order-1 "<s>" markers and one "</s>".
NgramModel train_lm_sentences(const std::vector<std::vector<std::string>>& sentences, int order, LmSource source);

/// Throws DataError for an order outside [1, 5], an empty training set, or
/// documents without POS tags when source is Pos.
NgramModel train_lm(std::span<const Document> docs, int order, LmSource source);
NgramModel train_lm(std::span<const Document* const> docs, int order, LmSource source);

struct LmScore {
  double log_likelihood = 0.0;  // natural log
  double perplexity = 1.0;
  std::size_t scored_tokens = 0;  // tokens plus one end marker per sentence
};

LmScore score(const NgramModel& model, const std::vector<std::vector<std::string>>& sentences);
LmScore score(const NgramModel& model, const Document& doc);

}  // namespace readlevel
