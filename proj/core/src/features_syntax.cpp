#include "readlevel/features_syntax.hpp"

#include <algorithm>
#include <cstdlib>

#include <fmt/format.h>

#include "readlevel/error.hpp"

namespace readlevel {

namespace {

constexpr std::array<std::string_view, 6> kClausal = {"csubj", "ccomp", "xcomp", "advcl", "acl", "parataxis"};

constexpr std::array<std::string_view, kTreeFeatureCount> kTreeNames = {
    "syn_tree_depth", "syn_noun_phrases",  "syn_verb_phrases", "syn_adjective_phrases",
    "syn_adverb_phrases", "syn_prep_phrases", "syn_clauses",      "syn_dependents_per_token"};

constexpr std::array<std::string_view, kGrFeatureCount> kGrNames = {
    "gr_max_distance", "gr_mean_distance", "gr_per_sentence", "gr_max_per_sentence", "gr_mean_longest_distance",
    "gr_long_share"};

std::string_view base_relation(std::string_view deprel) {
  const auto colon = deprel.find(':');
  return colon == std::string_view::npos ? deprel : deprel.substr(0, colon);
}

void require_syntax(const Document& doc) {
  if (!doc.has_syntax()) throw DataError(fmt::format("document '{}' has no dependency annotation", doc.id()));
}

}  // namespace

DepTree::DepTree(const Sentence& sentence) {
  const std::size_t n = sentence.size();
  if (n == 0) throw DataError("empty sentence has no dependency tree");
  heads_.reserve(n);
  child_counts_.assign(n, 0);
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int h = sentence[i].head;
    if (h < 0 || h > static_cast<int>(n) || h == static_cast<int>(i) + 1) {
      throw DataError(fmt::format("token {} has invalid head {}", i + 1, h));
    }
    heads_.push_back(h);
    if (h == 0) {
      root_ = i;
      ++roots;
    } else {
      ++child_counts_[static_cast<std::size_t>(h - 1)];
    }
  }
  if (roots != 1) throw DataError(fmt::format("dependency tree has {} roots", roots));

  // Depth by walking to the root with memoisation; a walk longer than n
  // means a cycle, which also rules out disconnected components.
  std::vector<std::size_t> depth(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> path;
    std::size_t node = i;
    while (depth[node] == 0) {
      path.push_back(node);
      if (path.size() > n) throw DataError("dependency tree contains a cycle");
      if (heads_[node] == 0) break;
      node = static_cast<std::size_t>(heads_[node] - 1);
    }
    std::size_t d = depth[node] == 0 ? 0 : depth[node];
    for (auto it = path.rbegin(); it != path.rend(); ++it) depth[*it] = ++d;
  }
  depth_ = *std::max_element(depth.begin(), depth.end());
}

std::span<const std::string_view> clausal_relations() { return kClausal; }

std::array<double, kTreeFeatureCount> tree_features(const Document& doc) {
  require_syntax(doc);
  std::array<double, kTreeFeatureCount> sum{};
  for (const auto& sentence : doc.sentences()) {
    const DepTree tree(sentence);
    std::array<double, kTreeFeatureCount> v{};
    v[0] = static_cast<double>(tree.depth());
    v[6] = 1.0;
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      const auto& pos = sentence[i].pos;
      const bool governs = tree.dependents(i) > 0;
      if (pos == "NOUN" || pos == "PROPN" || pos == "PRON") ++v[1];
      if (pos == "VERB") ++v[2];
      if (pos == "ADJ" && governs) ++v[3];
      if (pos == "ADV" && governs) ++v[4];
      if (pos == "ADP") ++v[5];
      const auto rel = base_relation(sentence[i].deprel);
      if (std::find(kClausal.begin(), kClausal.end(), rel) != kClausal.end()) ++v[6];
    }
    v[7] = static_cast<double>(sentence.size() - 1) / static_cast<double>(sentence.size());
    for (std::size_t k = 0; k < kTreeFeatureCount; ++k) sum[k] += v[k];
  }
  const double n = static_cast<double>(doc.sentence_count());
  for (double& x : sum) x /= n;
  return sum;
}

std::span<const std::string_view> tree_feature_names() { return kTreeNames; }

std::array<double, kGrFeatureCount> gr_complexity(const Document& doc) {
  require_syntax(doc);
  double doc_max = 0;
  double sum_mean = 0;
  double sum_count = 0;
  double max_count = 0;
  double sum_longest = 0;
  double sum_long_share = 0;
  for (const auto& sentence : doc.sentences()) {
    const DepTree tree(sentence);  // validates
    double total = 0;
    double longest = 0;
    double count = 0;
    double long_ones = 0;
    for (std::size_t i = 0; i < tree.size(); ++i) {
      if (tree.head(i) == 0) continue;
      const double d = std::abs(tree.head(i) - static_cast<int>(i + 1));
      total += d;
      longest = std::max(longest, d);
      ++count;
      if (d > 4) ++long_ones;
    }
    doc_max = std::max(doc_max, longest);
    sum_count += count;
    max_count = std::max(max_count, count);
    sum_longest += longest;
    if (count > 0) {
      sum_mean += total / count;
      sum_long_share += long_ones / count;
    }
  }
  const double n = static_cast<double>(doc.sentence_count());
  return {doc_max, sum_mean / n, sum_count / n, max_count, sum_longest / n, sum_long_share / n};
}

std::span<const std::string_view> gr_feature_names() { return kGrNames; }

}  // namespace readlevel
