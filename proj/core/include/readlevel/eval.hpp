#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "readlevel/corpus.hpp"

namespace readlevel {

/// k disjoint index sets covering the dataset.
struct FoldPlan {
  std::vector<std::vector<std::size_t>> folds;
  std::vector<std::size_t> fold_of;
  std::uint64_t seed = 0;

  std::size_t k() const { return folds.size(); }
  /// Indices outside fold f, ascending.
  std::vector<std::size_t> training_indices(std::size_t f) const;
};

/// Stratified by level: each level's indices are shuffled with the seed and
/// dealt round-robin, continuing from where the previous level stopped, so
/// per-level and overall fold sizes differ by at most one. Throws DataError
/// when some level has fewer than k instances.
FoldPlan make_folds(std::span<const int> levels, std::size_t k = 5, std::uint64_t seed = 1);

using ConfusionMatrix = std::array<std::array<std::size_t, kNumLevels>, kNumLevels>;

double accuracy(std::span<const int> gold, std::span<const int> predicted);
/// Gold rows, predicted columns, levels 1..5.
ConfusionMatrix confusion(std::span<const int> gold, std::span<const int> predicted);
double accuracy(const ConfusionMatrix& m);
std::size_t total(const ConfusionMatrix& m);

/// Share of pairs with different gold levels that the scores order the same
/// way; tied scores count one half. O(n log n).
double pairwise_accuracy(std::span<const int> gold, std::span<const double> scores);

/// Throws DataError when either side is constant.
double pearson(std::span<const double> a, std::span<const double> b);
double pearson(std::span<const int> a, std::span<const double> b);

struct TestResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

/// Two-sided paired t-test. Zero differences everywhere give t = 0, p = 1.
TestResult paired_t_test(std::span<const double> a, std::span<const double> b);

/// Williams' test for r12 vs r13 where variables 2 and 3 are correlated
/// (r23) and share variable 1; t on n - 3 degrees of freedom, two-sided.
/// Equal correlations give t = 0, p = 1 even when r23 = 1.
TestResult williams_test(double r12, double r13, double r23, std::size_t n);

struct FoldMetrics {
  std::size_t size = 0;
  double accuracy = 0.0;
  double pairwise_accuracy = 0.0;
  double pearson = 0.0;

  friend bool operator==(const FoldMetrics&, const FoldMetrics&) = default;
};

struct InstanceResult {
  std::string id;
  std::size_t fold = 0;
  int gold = 0;
  int predicted = 0;
  /// Ranking score, or the predicted level for classifiers.
  double score = 0.0;
  double confidence = 0.0;

  friend bool operator==(const InstanceResult&, const InstanceResult&) = default;
};

struct EvaluationReport {
  std::vector<std::pair<std::string, std::string>> settings;
  std::vector<FoldMetrics> folds;
  FoldMetrics mean;
  ConfusionMatrix confusion{};
  std::vector<InstanceResult> predictions;

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

/// Per-fold metrics, their means and the pooled confusion matrix. Pairwise
/// accuracy and correlation use the score column. A fold whose scores or
/// labels are constant gets NaN for the correlation.
EvaluationReport build_report(std::vector<std::pair<std::string, std::string>> settings,
                              std::vector<InstanceResult> predictions);

void write_report_text(const EvaluationReport& report, std::ostream& out);
void write_report_tsv(const EvaluationReport& report, std::ostream& out);
EvaluationReport read_report_tsv(std::istream& in);

enum class Metric { Accuracy, Pearson };

/// Accuracy: paired t-test over fold accuracies. Pearson: Williams' test on
/// the two systems' scores against the shared gold labels, matching
/// instances by id.
TestResult compare_systems(const EvaluationReport& a, const EvaluationReport& b, Metric metric);

}  // namespace readlevel
