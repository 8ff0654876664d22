#include "readlevel/featurizer.hpp"

#include <fmt/format.h>

#include "readlevel/error.hpp"
#include "readlevel/features_discourse.hpp"
#include "readlevel/features_surface.hpp"
#include "readlevel/features_syntax.hpp"
#include "readlevel/text.hpp"

namespace readlevel {

namespace {

template <std::size_t N>
void push(std::vector<double>& out, const std::array<double, N>& values) {
  out.insert(out.end(), values.begin(), values.end());
}

void push_score(std::vector<double>& out, const LmScore& s) {
  out.push_back(s.log_likelihood / static_cast<double>(s.scored_tokens));
  out.push_back(s.perplexity);
}

}  // namespace

FeatureGroups FeatureGroups::parse(std::string_view list) {
  FeatureGroups g{false, false, false, false, false};
  for (const auto& raw : text::split(list, ',')) {
    const std::string name = text::to_lower(text::trim(raw));
    if (name.empty()) continue;
    if (name == "all") {
      g = FeatureGroups{};
    } else if (name == "traditional") {
      g.traditional = true;
    } else if (name == "lexical") {
      g.lexical = true;
    } else if (name == "syntactic") {
      g.syntactic = true;
    } else if (name == "lm") {
      g.lm = true;
    } else if (name == "discourse") {
      g.discourse = true;
    } else {
      throw ConfigError(fmt::format(
          "unknown feature group '{}' (expected traditional, lexical, syntactic, lm, discourse or all)", name));
    }
  }
  if (!g.any()) throw ConfigError("no feature group selected");
  return g;
}

std::string FeatureGroups::to_string() const {
  std::vector<std::string_view> on;
  if (traditional) on.push_back("traditional");
  if (lexical) on.push_back("lexical");
  if (syntactic) on.push_back("syntactic");
  if (lm) on.push_back("lm");
  if (discourse) on.push_back("discourse");
  return fmt::format("{}", fmt::join(on, ","));
}

std::vector<NgramModel> train_reference_lms(std::span<const Document> corpus) {
  std::vector<std::vector<std::string>> sentences;
  for (const auto& doc : corpus) {
    auto s = lm_sentences(doc, LmSource::Surface);
    sentences.insert(sentences.end(), s.begin(), s.end());
  }
  std::vector<NgramModel> models;
  for (int order = 1; order <= kMaxLmOrder; ++order) {
    models.push_back(train_lm_sentences(sentences, order, LmSource::Surface));
  }
  return models;
}

PosLmBank PosLmBank::train(std::span<const Document* const> docs) {
  std::vector<std::vector<std::vector<std::string>>> by_level(kNumLevels);
  for (const Document* doc : docs) {
    if (!doc->label()) throw DataError(fmt::format("document '{}' has no level for POS LM training", doc->id()));
    auto s = lm_sentences(*doc, LmSource::Pos);
    auto& bucket = by_level[static_cast<std::size_t>(doc->label()->value - kMinLevel)];
    bucket.insert(bucket.end(), s.begin(), s.end());
  }
  PosLmBank bank;
  for (int level = kMinLevel; level <= kMaxLevel; ++level) {
    const auto& sentences = by_level[static_cast<std::size_t>(level - kMinLevel)];
    if (sentences.empty()) throw DataError(fmt::format("no training documents at level {} for POS LMs", level));
    for (int order = 1; order <= kMaxLmOrder; ++order) {
      bank.models.push_back(train_lm_sentences(sentences, order, LmSource::Pos));
    }
  }
  return bank;
}

const NgramModel& PosLmBank::model(int level, int order) const {
  return models.at(static_cast<std::size_t>((level - kMinLevel) * kMaxLmOrder + (order - 1)));
}

FeatureCatalog document_catalog(const FeatureGroups& groups, bool has_reference) {
  FeatureCatalog c;
  if (groups.traditional) c.append(traditional_feature_names());
  if (groups.lexical) {
    c.append(ttr_feature_names());
    c.append(pos_lexical_feature_names());
    c.append(wordlist_feature_names());
  }
  if (groups.syntactic) {
    c.append(tree_feature_names());
    c.append(gr_feature_names());
  }
  if (groups.discourse) {
    c.append(entity_density_feature_names());
    c.append(chain_feature_names());
    c.append(entity_grid_feature_names());
  }
  if (groups.lm && has_reference) {
    for (int order = 1; order <= kMaxLmOrder; ++order) {
      c.append(fmt::format("lm_ref_o{}_ll", order));
      c.append(fmt::format("lm_ref_o{}_ppl", order));
    }
  }
  return c;
}

FeatureCatalog pos_lm_catalog() {
  FeatureCatalog c;
  for (int level = kMinLevel; level <= kMaxLevel; ++level) {
    for (int order = 1; order <= kMaxLmOrder; ++order) {
      c.append(fmt::format("lm_pos_l{}_o{}_ll", level, order));
      c.append(fmt::format("lm_pos_l{}_o{}_ppl", level, order));
    }
  }
  return c;
}

FeatureCatalog feature_catalog(const FeatureGroups& groups, bool has_reference) {
  FeatureCatalog c = document_catalog(groups, has_reference);
  if (groups.lm) c.append(pos_lm_catalog());
  return c;
}

std::vector<double> document_features(const Document& doc, const FeatureGroups& groups, const Resources& resources) {
  std::vector<double> out;
  if (groups.traditional) push(out, traditional_features(doc));
  if (groups.lexical) {
    push(out, ttr_features(doc));
    push(out, pos_lexical_features(doc));
    push(out, wordlist_features(doc, resources.awl, resources.evp));
  }
  if (groups.syntactic) {
    push(out, tree_features(doc));
    push(out, gr_complexity(doc));
  }
  if (groups.discourse) {
    push(out, entity_density(doc));
    const auto chains = build_chains(doc, resources.relations);
    push(out, chain_features(doc, chains));
    push(out, entity_grid_features(doc));
  }
  if (groups.lm && !resources.reference_lms.empty()) {
    const auto ref = reference_lm_features(doc, resources.reference_lms);
    out.insert(out.end(), ref.begin(), ref.end());
  }
  check_finite(out, document_catalog(groups, !resources.reference_lms.empty()), doc.id());
  return out;
}

Matrix document_feature_matrix(std::span<const Document> docs, const FeatureGroups& groups,
                               const Resources& resources) {
  const std::size_t f = document_catalog(groups, !resources.reference_lms.empty()).size();
  Matrix x(0, f);
  for (const auto& doc : docs) x.append_row(document_features(doc, groups, resources));
  return x;
}

std::vector<double> reference_lm_features(const Document& doc, std::span<const NgramModel> models) {
  const auto sentences = lm_sentences(doc, LmSource::Surface);
  std::vector<double> out;
  for (const auto& m : models) push_score(out, score(m, sentences));
  return out;
}

std::vector<double> pos_lm_features(const Document& doc, const PosLmBank& bank) {
  const auto sentences = lm_sentences(doc, LmSource::Pos);
  std::vector<double> out;
  out.reserve(kPosLmFeatures);
  for (const auto& m : bank.models) push_score(out, score(m, sentences));
  return out;
}

Matrix pos_lm_matrix(std::span<const Document* const> docs, const PosLmBank& bank) {
  Matrix x(0, kPosLmFeatures);
  for (const Document* doc : docs) x.append_row(pos_lm_features(*doc, bank));
  return x;
}

}  // namespace readlevel
