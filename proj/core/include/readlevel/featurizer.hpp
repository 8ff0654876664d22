#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "readlevel/corpus.hpp"
#include "readlevel/feature_vector.hpp"
#include "readlevel/lexicons.hpp"
#include "readlevel/matrix.hpp"
#include "readlevel/ngram_lm.hpp"

namespace readlevel {

struct FeatureGroups {
  bool traditional = true;
  bool lexical = true;
  bool syntactic = true;
  bool lm = true;
  bool discourse = true;

  bool any() const { return traditional || lexical || syntactic || lm || discourse; }
  /// Comma-separated group names, e.g. "traditional,lm". "all" selects
  /// every group; an empty selection is a ConfigError.
  static FeatureGroups parse(std::string_view list);
  std::string to_string() const;

  friend bool operator==(const FeatureGroups&, const FeatureGroups&) = default;
};

inline constexpr std::size_t kTraditionalGroupSize = 7;
inline constexpr std::size_t kLexicalGroupSize = 25;
inline constexpr std::size_t kSyntacticGroupSize = 14;
inline constexpr std::size_t kDiscourseGroupSize = 32;
inline constexpr std::size_t kReferenceLmFeatures = 2 * kMaxLmOrder;
inline constexpr std::size_t kPosLmFeatures = 2 * kNumLevels * kMaxLmOrder;

/// Lexicons and reference language models the extractors read.
struct Resources {
  WordList awl;
  CefrLexicon evp;
  RelationTable relations;
  /// Word models of orders 1..5 on a reference corpus; empty when none.
  std::vector<NgramModel> reference_lms;
};

/// Orders 1..5 on the given corpus.
std::vector<NgramModel> train_reference_lms(std::span<const Document> corpus);

/// POS models per level and order, trained on labelled documents. Every
/// level 1..5 must be present.
struct PosLmBank {
  std::vector<NgramModel> models;  // index (level - 1) * 5 + (order - 1)

  static PosLmBank train(std::span<const Document* const> docs);
  const NgramModel& model(int level, int order) const;
};

/// Names of the document-level columns: traditional, lexical, syntactic,
/// discourse, then the reference LM block when the LM group is on and a
/// reference corpus exists.
FeatureCatalog document_catalog(const FeatureGroups& groups, bool has_reference);
/// The 50 per-level POS LM columns.
FeatureCatalog pos_lm_catalog();
/// document_catalog followed by the POS LM block when the LM group is on.
FeatureCatalog feature_catalog(const FeatureGroups& groups, bool has_reference);

/// Values for document_catalog. Throws DataError for missing annotation
/// layers the groups need and for non-finite values.
std::vector<double> document_features(const Document& doc, const FeatureGroups& groups, const Resources& resources);
Matrix document_feature_matrix(std::span<const Document> docs, const FeatureGroups& groups,
                               const Resources& resources);

/// [normalised log-likelihood, perplexity] per model.
std::vector<double> reference_lm_features(const Document& doc, std::span<const NgramModel> models);
std::vector<double> pos_lm_features(const Document& doc, const PosLmBank& bank);
Matrix pos_lm_matrix(std::span<const Document* const> docs, const PosLmBank& bank);

}  // namespace readlevel
