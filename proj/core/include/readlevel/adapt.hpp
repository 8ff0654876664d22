#pragma once

#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "readlevel/corpus.hpp"
#include "readlevel/feature_vector.hpp"
#include "readlevel/learn.hpp"
#include "readlevel/matrix.hpp"

namespace readlevel {

/// Native -> <x, x, 0>, L2 -> <x, 0, x>.
std::vector<double> easyadapt_augment(std::span<const double> x, Domain domain);
FeatureVector easyadapt_augment(const FeatureVector& x, Domain domain, const FeatureCatalog& augmented_catalog);
Matrix easyadapt_augment(const Matrix& x, std::span<const Domain> domains);

/// Names suffixed @general, @source and @target, in block order.
FeatureCatalog easyadapt_catalog(const FeatureCatalog& base);

struct SelfTrainConfig {
  int k = 10;
  int iterations = 9;
  std::set<int> allowed_levels = {1, 2, 3, 4, 5};

  /// Throws ConfigError when k < 1, iterations < 1 or the level set is
  /// empty or leaves [1, 5].
  void validate() const;
};

struct AuditEntry {
  std::string id;
  int iteration = 0;  // 1-based
  int pseudo_label = 0;
  double confidence = 0.0;

  friend bool operator==(const AuditEntry&, const AuditEntry&) = default;
};

struct SelfTrainResult {
  ClassifierModel model;
  std::vector<AuditEntry> audit;
  std::vector<std::size_t> added_per_iteration;
  /// Set when an iteration found fewer than k eligible instances; that
  /// iteration adds nothing and the loop stops.
  bool terminated_early = false;
  int terminated_at = 0;
  /// Every pseudo-label added so far belongs to one class.
  bool class_collapse = false;
};

/// Trains on the labelled pool, scores the remaining unlabelled rows, adds
/// the k most confident ones whose predicted level is allowed, and repeats.
/// The returned model is trained on the final pool. Ties in confidence go to
/// the earlier unlabelled row.
SelfTrainResult self_train(const Matrix& labeled_x, std::span<const int> labeled_y, const Matrix& unlabeled_x,
                           std::span<const std::string> unlabeled_ids, const SelfTrainConfig& config,
                           const SvmParams& params);

/// Rebuilds the final training pool from the audit log: the labelled rows
/// followed by each logged row in log order.
void replay_audit(std::span<const AuditEntry> audit, const Matrix& labeled_x, std::span<const int> labeled_y,
                  const Matrix& unlabeled_x, std::span<const std::string> unlabeled_ids, Matrix& pool_x,
                  std::vector<int>& pool_y);

void write_audit_log(std::span<const AuditEntry> audit, std::ostream& out);
std::vector<AuditEntry> read_audit_log(std::istream& in);

}  // namespace readlevel
