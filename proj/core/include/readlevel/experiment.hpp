#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "readlevel/adapt.hpp"
#include "readlevel/corpus.hpp"
#include "readlevel/eval.hpp"
#include "readlevel/feature_vector.hpp"
#include "readlevel/featurizer.hpp"
#include "readlevel/learn.hpp"
#include "readlevel/mapping.hpp"
#include "readlevel/matrix.hpp"

namespace readlevel {

enum class ModelKind { Classify, Rank };
enum class TransferMode { None, Generalize, EasyAdapt, SelfTrain };

ModelKind parse_model_kind(std::string_view s);
std::string_view model_kind_name(ModelKind k);
TransferMode parse_transfer_mode(std::string_view s);
std::string_view transfer_mode_name(TransferMode t);

/// Labelled instances with their document-level features. When `documents`
/// is filled and `pos_lm` is set, the per-level POS LM block is computed
/// inside each fitting step and appended after `x`.
struct Dataset {
  std::vector<std::string> ids;
  std::vector<int> labels;  // 0 when unlabelled
  std::vector<Domain> domains;
  Matrix x;
  FeatureCatalog catalog;
  std::vector<const Document*> documents;
  bool pos_lm = false;

  std::size_t size() const { return ids.size(); }
  /// catalog plus the POS LM names when pos_lm is set.
  FeatureCatalog full_catalog() const;
  /// Throws DataError on inconsistent lengths, or on a missing label when
  /// labels are required.
  void validate(bool require_labels = true) const;
};

/// Featurizes documents; unlabelled ones get label 0. The POS LM block is deferred to fitting
/// time when the LM group is on.
Dataset make_dataset(std::span<const Document> docs, const FeatureGroups& groups, const Resources& resources);

struct ExperimentConfig {
  ModelKind model = ModelKind::Classify;
  MapperVariant mapper = MapperVariant::LinearSVM1D;
  MapperOptions mapper_options;
  SvmParams svm;
  TransferMode transfer = TransferMode::None;
  SelfTrainConfig selftrain;
  bool same_domain_only = false;
  std::size_t folds = 5;
  std::uint64_t seed = 1;
  /// Train POS LMs on each fold's fitting documents. When off, they are
  /// trained once on the primary corpus and the guard skips that step.
  bool lm_inside_folds = true;
  int threads = 1;

  /// Throws ConfigError for selftrain with ranking and similar mismatches.
  void validate(bool has_source) const;
};

/// A trained scorer: classifier or ranker plus mapper, optionally reading
/// EasyAdapt-augmented input.
struct System {
  ModelKind kind = ModelKind::Classify;
  ClassifierModel classifier;
  RankerModel ranker;
  std::optional<LevelMapper> mapper;
  /// Inputs are augmented as this domain before scoring.
  std::optional<Domain> augment_as;

  struct Output {
    int level = 0;
    double score = 0.0;
    double confidence = 0.0;
  };
  Output predict(std::span<const double> x) const;
};

/// Trains on all rows of x. Ranking systems fit their mapper on their own
/// training scores.
System train_system(const Matrix& x, std::span<const int> y, std::span<const Domain> domains,
                    const ExperimentConfig& config);

/// Records every fitting step and throws LeakageError when a validation
/// instance of the current fold takes part in it.
class LeakageGuard {
 public:
  struct Record {
    std::size_t fold = 0;
    std::string step;
    std::size_t instances = 0;
    std::string fingerprint;  // hash of the sorted instance ids

    friend bool operator==(const Record&, const Record&) = default;
  };

  LeakageGuard(const FoldPlan& plan, std::span<const std::string> ids);

  void check(std::size_t fold, std::string_view step, std::span<const std::string> fit_ids);
  /// Sorted by fold, then in call order within a fold.
  std::vector<Record> records() const;

 private:
  std::vector<std::unordered_set<std::string>> validation_;
  mutable std::mutex mutex_;
  std::vector<std::pair<std::size_t, Record>> records_;
  std::size_t next_ = 0;
};

/// Receives each fitting step and the ids of the instances it uses.
using FitObserver = std::function<void(std::string_view step, std::span<const std::string> ids)>;

struct FitResult {
  System system;
  std::optional<PosLmBank> pos_lms;
  std::optional<SelfTrainResult> selftrain;
};

/// Fits one system on `target_rows` of the target corpus plus, for the
/// transfer modes, the whole source corpus. POS LMs are trained on the
/// fitting documents unless `fixed_bank` is given.
FitResult fit_system(const Dataset& target, std::span<const std::size_t> target_rows, const Dataset* source,
                     const ExperimentConfig& config, const FitObserver& observe = {},
                     const PosLmBank* fixed_bank = nullptr);

/// fit_system on every target instance.
FitResult fit_full(const Dataset& target, const Dataset* source, const ExperimentConfig& config);

struct ExperimentResult {
  EvaluationReport report;
  std::vector<LeakageGuard::Record> fit_log;
  /// Self-training audit per fold.
  std::vector<std::vector<AuditEntry>> audits;
};

/// Cross-validates over `target`. Transfer modes draw extra training data
/// from `source`: generalize trains on the source only, easyadapt on the
/// augmented union of source and target training folds, selftrain labels
/// source instances to grow the target training folds. Mappers are fitted
/// on target training-fold scores.
ExperimentResult run_experiment(const Dataset& target, const Dataset* source, const ExperimentConfig& config);

}  // namespace readlevel
