#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "readlevel/corpus.hpp"
#include "readlevel/matrix.hpp"

namespace readlevel {

/// Per-feature z-scoring learned on training rows. Zero-variance features
/// keep scale 1 so they map to 0 rather than dividing by zero.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  /// Throws DataError for fewer than two rows.
  static Standardizer fit(const Matrix& x);

  std::size_t dimension() const { return mean.size(); }
  std::vector<double> apply(std::span<const double> x) const;
  Matrix apply(const Matrix& x) const;

  friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

/// Settings shared by the hinge-loss learners.
struct SvmParams {
  double c = 1.0;
  std::uint64_t seed = 1;
  int max_epochs = 1000;
  /// Training stops once the retained objective improved by less than
  /// tolerance * max(1, objective) over the last `patience` epochs.
  double tolerance = 1e-6;
  int patience = 10;
  /// Ranker only: preference pairs beyond this count are subsampled.
  std::size_t max_pairs = 2'000'000;
};

/// Objective of the retained weights after every epoch. The subgradient
/// iterates themselves are noisy; the learner keeps the best weights seen
/// so far, so this sequence never increases.
struct TrainingTrace {
  std::vector<double> objective;
  bool converged = false;
};

/// One-vs-rest linear SVM. Class c scores w_c . z + b_c on standardized z.
struct ClassifierModel {
  std::vector<int> classes;
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;
  Standardizer standardizer;
  std::string catalog_id;

  std::size_t dimension() const { return standardizer.dimension(); }
  std::vector<double> decision_values(std::span<const double> x) const;

  friend bool operator==(const ClassifierModel&, const ClassifierModel&) = default;
};

struct Prediction {
  int level = 0;
  std::vector<double> decision_values;
  /// Margin between the best and the runner-up decision value.
  double confidence = 0.0;
};

/// L2-regularised hinge loss per class, minimised with the step schedule
/// eta_t = 1 / (lambda t), lambda = 1 / (C N), over seeded shuffled epochs.
/// The bias is learned as the weight of a constant feature.
ClassifierModel train_classifier(const Matrix& x, std::span<const int> y, const SvmParams& params,
                                 TrainingTrace* trace = nullptr);

/// Argmax with ties going to the lowest class index.
Prediction prediction_from_decisions(std::span<const int> classes, std::vector<double> decision_values);
Prediction predict(const ClassifierModel& model, std::span<const double> x);

/// Linear scorer trained on preference pairs; no bias since pair
/// differences cancel it.
struct RankerModel {
  std::vector<double> weights;
  Standardizer standardizer;
  std::string catalog_id;

  std::size_t dimension() const { return standardizer.dimension(); }
  double score(std::span<const double> x) const;

  friend bool operator==(const RankerModel&, const RankerModel&) = default;
};

/// Ordered pairs (i, j) with y[i] > y[j], restricted to pairs within one
/// domain when `same_domain_only` is set.
std::vector<std::pair<std::uint32_t, std::uint32_t>> preference_pairs(std::span<const int> y,
                                                                      std::span<const Domain> domains,
                                                                      bool same_domain_only);

RankerModel train_ranker(const Matrix& x, std::span<const int> y, std::span<const Domain> domains,
                         bool same_domain_only, const SvmParams& params, TrainingTrace* trace = nullptr);

/// Least-squares polynomial fit of y on scores (degree 1 or 4) through a
/// column-pivoted QR decomposition. Coefficients are in increasing power
/// order. Throws DataError when fewer than degree+1 distinct scores exist or
/// the design matrix is rank deficient.
std::vector<double> fit_regression(std::span<const double> scores, std::span<const double> y, int degree);
double evaluate_polynomial(std::span<const double> coefficients, double s);

struct LogisticParams {
  double l2 = 1e-3;
  double gradient_tolerance = 1e-6;
  int max_iterations = 200000;
};

/// Multinomial logistic regression on a single standardized score.
struct LogisticModel {
  std::vector<int> classes;
  std::vector<double> weights;
  std::vector<double> bias;
  double mean = 0.0;
  double scale = 1.0;
  bool converged = false;
  int iterations = 0;

  std::vector<double> probabilities(double score) const;
  int predict(double score) const;

  friend bool operator==(const LogisticModel&, const LogisticModel&) = default;
};

/// Mean negative log-likelihood plus l2/2 * |params|^2. Parameters are laid
/// out as [w_0..w_{K-1}, b_0..b_{K-1}]; targets are class indices.
double logistic_objective(std::span<const double> params, std::span<const double> z, std::span<const int> targets,
                          std::size_t classes, double l2);
std::vector<double> logistic_gradient(std::span<const double> params, std::span<const double> z,
                                      std::span<const int> targets, std::size_t classes, double l2);

/// Gradient descent with step 1/L until the gradient norm drops below the
/// tolerance. A run that hits max_iterations returns with converged = false.
LogisticModel fit_logistic(std::span<const double> scores, std::span<const int> y, const LogisticParams& params = {});

}  // namespace readlevel
