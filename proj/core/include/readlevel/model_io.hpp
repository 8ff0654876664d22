#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "readlevel/corpus.hpp"
#include "readlevel/experiment.hpp"
#include "readlevel/feature_vector.hpp"
#include "readlevel/featurizer.hpp"
#include "readlevel/matrix.hpp"

namespace readlevel {

inline constexpr int kModelFormatVersion = 1;
inline constexpr int kFeaturesFormatVersion = 1;

/// A trained system together with what is needed to featurize new text the
/// same way: feature groups, the input catalog and the language models.
struct SavedModel {
  System system;
  FeatureGroups groups;
  FeatureCatalog catalog;
  std::vector<NgramModel> reference_lms;
  std::optional<PosLmBank> pos_lms;
};

/// JSON text with a "format"/"version" header. Doubles are written with
/// round-trip precision.
void save_model(const SavedModel& model, std::ostream& out);
SavedModel load_model(std::istream& in, const std::string& source_name = "model");
void save_model_file(const SavedModel& model, const std::filesystem::path& path);
SavedModel load_model_file(const std::filesystem::path& path);

/// Throws DataError when the catalog differs from the one the model was
/// trained on.
void check_catalog(const SavedModel& model, const FeatureCatalog& catalog);

/// The lexicons with the model's reference LMs swapped in.
Resources model_resources(const SavedModel& model, Resources lexicons);
/// Feature row of a document under the model's groups and POS LMs, with
/// resources from model_resources.
std::vector<double> model_features(const SavedModel& model, const Document& doc, const Resources& resources);

/// Rows of a feature matrix file. Labels may be absent.
struct FeatureTable {
  std::vector<std::string> ids;
  std::vector<std::optional<int>> labels;
  std::vector<Domain> domains;
  Matrix x;
  FeatureCatalog catalog;
};

/// "#format readlevel-features 1", then a header "id label domain <names>",
/// then one row per instance. Missing labels are written as "-".
void write_features_tsv(const FeatureTable& table, std::ostream& out);
FeatureTable read_features_tsv(std::istream& in, const std::string& source_name = "features");

}  // namespace readlevel
