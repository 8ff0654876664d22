#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "readlevel/corpus.hpp"

namespace readlevel {

/// Rooted dependency tree over one sentence. Construction validates a single
/// root, in-range heads, acyclicity and connectedness.
class DepTree {
 public:
  explicit DepTree(const Sentence& sentence);

  std::size_t size() const { return heads_.size(); }
  /// 1-based head of 0-based token i; 0 for the root.
  int head(std::size_t i) const { return heads_[i]; }
  std::size_t root() const { return root_; }
  std::size_t dependents(std::size_t i) const { return child_counts_[i]; }
  /// Nodes on the longest root-to-leaf path; the root alone has depth 1.
  std::size_t depth() const { return depth_; }

 private:
  std::vector<int> heads_;
  std::vector<std::size_t> child_counts_;
  std::size_t root_ = 0;
  std::size_t depth_ = 0;
};

inline constexpr std::size_t kTreeFeatureCount = 8;
inline constexpr std::size_t kGrFeatureCount = 6;

/// Base relations (the part before ':') that open a clause.
std::span<const std::string_view> clausal_relations();

/// Per-sentence averages of [tree depth, noun phrases, verb phrases,
/// adjective phrases, adverb phrases, prepositional phrases, clauses,
/// dependents per token]. Phrases are approximated from heads: every
/// NOUN/PROPN/PRON is a noun phrase, every VERB a verb phrase, ADJ/ADV head
/// a phrase when they govern at least one dependent, every ADP opens a
/// prepositional phrase, clauses are 1 + tokens bearing a clausal relation.
std::array<double, kTreeFeatureCount> tree_features(const Document& doc);
std::span<const std::string_view> tree_feature_names();

/// Grammatical-relation distance statistics, distance = |head - dependent|:
/// [document max distance, mean over sentences of the mean distance, mean
///  relations per sentence, max relations in a sentence, mean over sentences
///  of the per-sentence longest distance, mean over sentences of the share of
///  relations longer than 4].
std::array<double, kGrFeatureCount> gr_complexity(const Document& doc);
std::span<const std::string_view> gr_feature_names();

}  // namespace readlevel
