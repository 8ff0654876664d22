#include "readlevel/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "readlevel/error.hpp"

namespace readlevel {

// ---------------------------------------------------------------------------
// Standardizer

Standardizer Standardizer::fit(const Matrix& x) {
  if (x.rows() < 2) throw DataError("standardizer needs at least two rows");
  Standardizer s;
  const std::size_t f = x.cols();
  const double n = static_cast<double>(x.rows());
  s.mean.assign(f, 0.0);
  s.scale.assign(f, 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < f; ++c) s.mean[c] += x(r, c);
  }
  for (double& m : s.mean) m /= n;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < f; ++c) {
      const double d = x(r, c) - s.mean[c];
      s.scale[c] += d * d;
    }
  }
  for (std::size_t c = 0; c < f; ++c) {
    const double sd = std::sqrt(s.scale[c] / n);
    s.scale[c] = sd > 1e-12 * std::max(1.0, std::abs(s.mean[c])) ? sd : 1.0;
  }
  return s;
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
  if (x.size() != mean.size()) {
    throw DataError(fmt::format("feature dimension {} does not match model dimension {}", x.size(), mean.size()));
  }
  std::vector<double> out(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) out[c] = (x[c] - mean[c]) / scale[c];
  return out;
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != mean.size()) {
    throw DataError(fmt::format("feature dimension {} does not match model dimension {}", x.cols(), mean.size()));
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = (x(r, c) - mean[c]) / scale[c];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subgradient engine shared by the classifier and the ranker.

namespace {

// w = a * v, so the per-step shrink costs O(1).
struct ScaledWeights {
  std::vector<double> v;
  double a = 1.0;

  explicit ScaledWeights(std::size_t dim) : v(dim, 0.0) {}

  void shrink(double factor) {
    if (factor <= 0.0) {
      std::fill(v.begin(), v.end(), 0.0);
      a = 1.0;
      return;
    }
    a *= factor;
    if (a < 1e-9) {
      for (double& x : v) x *= a;
      a = 1.0;
    }
  }
  double dot(std::span<const double> z) const { return a * readlevel::dot(v, z); }
  void add(std::span<const double> z, double coef) {
    const double c = coef / a;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += c * z[i];
  }
  std::vector<double> materialize() const {
    std::vector<double> w(v);
    for (double& x : w) x *= a;
    return w;
  }
};

double squared_norm(std::span<const double> w) { return readlevel::dot(w, w); }

std::uint64_t next_random(std::mt19937_64& rng) { return rng(); }

void shuffle_indices(std::vector<std::size_t>& order, std::mt19937_64& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(next_random(rng) % i);
    std::swap(order[i - 1], order[j]);
  }
}

// A binary hinge-loss problem: margin(w, i) = y_i w.x_i, step adds coef*y_i*x_i.
struct Problem {
  virtual ~Problem() = default;
  virtual double margin(const ScaledWeights& w, std::size_t i) const = 0;
  virtual void step(ScaledWeights& w, std::size_t i, double coef) const = 0;
  virtual double mean_hinge(std::span<const double> w) const = 0;
};

// Runs seeded Pegasos epochs over problems that share one example index
// space and keeps the best weights of each. Returns those weights.
std::vector<std::vector<double>> pegasos(const std::vector<const Problem*>& problems, std::size_t examples,
                                         std::size_t dim, double lambda, const SvmParams& params,
                                         TrainingTrace* trace) {
  const std::size_t k = problems.size();
  std::vector<ScaledWeights> current(k, ScaledWeights(dim));
  std::vector<std::vector<double>> best(k, std::vector<double>(dim, 0.0));
  std::vector<double> best_obj(k);
  for (std::size_t p = 0; p < k; ++p) best_obj[p] = problems[p]->mean_hinge(best[p]);

  std::vector<double> history;
  std::vector<std::size_t> order(examples);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(params.seed);
  std::uint64_t t = 0;
  bool converged = false;

  for (int epoch = 0; epoch < params.max_epochs; ++epoch) {
    shuffle_indices(order, rng);
    for (std::size_t idx : order) {
      ++t;
      const double td = static_cast<double>(t);
      const double eta = 1.0 / (lambda * td);
      for (std::size_t p = 0; p < k; ++p) {
        const double m = problems[p]->margin(current[p], idx);
        current[p].shrink(1.0 - 1.0 / td);
        if (m < 1.0) problems[p]->step(current[p], idx, eta);
      }
    }
    double total = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      auto w = current[p].materialize();
      const double obj = 0.5 * lambda * squared_norm(w) + problems[p]->mean_hinge(w);
      if (obj < best_obj[p]) {
        best_obj[p] = obj;
        best[p] = std::move(w);
      }
      total += best_obj[p];
    }
    history.push_back(total);
    const auto window = static_cast<std::size_t>(std::max(params.patience, 1));
    if (history.size() > window) {
      const double before = history[history.size() - 1 - window];
      if (before - total < params.tolerance * std::max(1.0, std::abs(total))) {
        converged = true;
        break;
      }
    }
  }
  if (trace != nullptr) {
    trace->objective = std::move(history);
    trace->converged = converged;
  }
  return best;
}

// Standardized rows with a trailing constant 1 for the bias.
Matrix with_bias_column(const Matrix& z) {
  Matrix out(z.rows(), z.cols() + 1, 1.0);
  for (std::size_t r = 0; r < z.rows(); ++r) {
    std::copy(z.row(r).begin(), z.row(r).end(), out.row(r).begin());
  }
  return out;
}

class OneVsRest final : public Problem {
 public:
  OneVsRest(const Matrix& z, std::vector<double> signs) : z_(z), signs_(std::move(signs)) {}

  double margin(const ScaledWeights& w, std::size_t i) const override { return signs_[i] * w.dot(z_.row(i)); }
  void step(ScaledWeights& w, std::size_t i, double coef) const override { w.add(z_.row(i), coef * signs_[i]); }
  double mean_hinge(std::span<const double> w) const override {
    double sum = 0.0;
    for (std::size_t i = 0; i < z_.rows(); ++i) sum += std::max(0.0, 1.0 - signs_[i] * dot(w, z_.row(i)));
    return sum / static_cast<double>(z_.rows());
  }

 private:
  const Matrix& z_;
  std::vector<double> signs_;
};

class PairwiseHinge final : public Problem {
 public:
  PairwiseHinge(const Matrix& z, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs)
      : z_(z), pairs_(pairs) {}

  double margin(const ScaledWeights& w, std::size_t i) const override {
    const auto [hi, lo] = pairs_[i];
    return w.dot(z_.row(hi)) - w.dot(z_.row(lo));
  }
  void step(ScaledWeights& w, std::size_t i, double coef) const override {
    const auto [hi, lo] = pairs_[i];
    w.add(z_.row(hi), coef);
    w.add(z_.row(lo), -coef);
  }
  double mean_hinge(std::span<const double> w) const override {
    std::vector<double> s(z_.rows());
    for (std::size_t r = 0; r < z_.rows(); ++r) s[r] = dot(w, z_.row(r));
    double sum = 0.0;
    for (const auto& [hi, lo] : pairs_) sum += std::max(0.0, 1.0 - (s[hi] - s[lo]));
    return sum / static_cast<double>(pairs_.size());
  }

 private:
  const Matrix& z_;
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs_;
};

void check_rows(const Matrix& x, std::size_t labels) {
  if (x.rows() != labels) {
    throw DataError(fmt::format("{} feature rows but {} labels", x.rows(), labels));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Classifier

std::vector<double> ClassifierModel::decision_values(std::span<const double> x) const {
  const auto z = standardizer.apply(x);
  std::vector<double> out(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) out[c] = dot(weights[c], z) + bias[c];
  return out;
}

ClassifierModel train_classifier(const Matrix& x, std::span<const int> y, const SvmParams& params,
                                 TrainingTrace* trace) {
  check_rows(x, y.size());
  const std::set<int> distinct(y.begin(), y.end());
  if (distinct.size() < 2) throw DataError("classifier training needs at least two classes");
  if (params.c <= 0.0) throw DataError("C must be positive");

  ClassifierModel model;
  model.classes.assign(distinct.begin(), distinct.end());
  model.standardizer = Standardizer::fit(x);
  const Matrix z = with_bias_column(model.standardizer.apply(x));

  std::vector<OneVsRest> problems;
  problems.reserve(model.classes.size());
  for (int cls : model.classes) {
    std::vector<double> signs(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) signs[i] = y[i] == cls ? 1.0 : -1.0;
    problems.emplace_back(z, std::move(signs));
  }
  std::vector<const Problem*> ptrs;
  for (const auto& p : problems) ptrs.push_back(&p);

  const double lambda = 1.0 / (params.c * static_cast<double>(x.rows()));
  auto weights = pegasos(ptrs, x.rows(), z.cols(), lambda, params, trace);
  for (auto& w : weights) {
    model.bias.push_back(w.back());
    w.pop_back();
    model.weights.push_back(std::move(w));
  }
  return model;
}

Prediction prediction_from_decisions(std::span<const int> classes, std::vector<double> decision_values) {
  if (decision_values.empty() || decision_values.size() != classes.size()) {
    throw DataError("decision values do not match the class list");
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < decision_values.size(); ++c) {
    if (decision_values[c] > decision_values[best]) best = c;
  }
  double runner_up = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < decision_values.size(); ++c) {
    if (c != best) runner_up = std::max(runner_up, decision_values[c]);
  }
  Prediction p;
  p.level = classes[best];
  p.confidence = decision_values.size() > 1 ? decision_values[best] - runner_up : 0.0;
  p.decision_values = std::move(decision_values);
  return p;
}

Prediction predict(const ClassifierModel& model, std::span<const double> x) {
  return prediction_from_decisions(model.classes, model.decision_values(x));
}

// ---------------------------------------------------------------------------
// Ranker

double RankerModel::score(std::span<const double> x) const { return dot(weights, standardizer.apply(x)); }

std::vector<std::pair<std::uint32_t, std::uint32_t>> preference_pairs(std::span<const int> y,
                                                                      std::span<const Domain> domains,
                                                                      bool same_domain_only) {
  if (same_domain_only && domains.size() != y.size()) throw DataError("domain list does not match labels");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t i = 0; i < y.size(); ++i) {
    for (std::uint32_t j = 0; j < y.size(); ++j) {
      if (y[i] <= y[j]) continue;
      if (same_domain_only && domains[i] != domains[j]) continue;
      pairs.emplace_back(i, j);
    }
  }
  return pairs;
}

RankerModel train_ranker(const Matrix& x, std::span<const int> y, std::span<const Domain> domains,
                         bool same_domain_only, const SvmParams& params, TrainingTrace* trace) {
  check_rows(x, y.size());
  if (params.c <= 0.0) throw DataError("C must be positive");
  auto pairs = preference_pairs(y, domains, same_domain_only);
  if (pairs.empty()) throw DataError("no preference pairs: ranking needs at least two distinct labels");
  if (params.max_pairs > 0 && pairs.size() > params.max_pairs) {
    // Seeded partial Fisher-Yates keeps a uniform subset, then restores a
    // canonical order so the epoch shuffles stay reproducible.
    std::mt19937_64 rng(params.seed ^ 0x9e3779b97f4a7c15ULL);
    for (std::size_t i = 0; i < params.max_pairs; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng() % (pairs.size() - i));
      std::swap(pairs[i], pairs[j]);
    }
    pairs.resize(params.max_pairs);
    std::sort(pairs.begin(), pairs.end());
  }

  RankerModel model;
  model.standardizer = Standardizer::fit(x);
  const Matrix z = model.standardizer.apply(x);
  const PairwiseHinge problem(z, pairs);
  const double lambda = 1.0 / (params.c * static_cast<double>(pairs.size()));
  auto weights = pegasos({&problem}, pairs.size(), z.cols(), lambda, params, trace);
  model.weights = std::move(weights.front());
  return model;
}

// ---------------------------------------------------------------------------
// Regression

std::vector<double> fit_regression(std::span<const double> scores, std::span<const double> y, int degree) {
  if (degree != 1 && degree != 4) throw DataError(fmt::format("regression degree must be 1 or 4, got {}", degree));
  if (scores.size() != y.size()) throw DataError("scores and targets differ in length");
  const std::set<double> distinct(scores.begin(), scores.end());
  const auto terms = static_cast<std::size_t>(degree + 1);
  if (distinct.size() < terms) {
    throw DataError(fmt::format("degree-{} regression needs at least {} distinct scores, got {}", degree, terms,
                                distinct.size()));
  }
  Eigen::MatrixXd design(static_cast<Eigen::Index>(scores.size()), static_cast<Eigen::Index>(terms));
  Eigen::VectorXd target(static_cast<Eigen::Index>(scores.size()));
  for (std::size_t i = 0; i < scores.size(); ++i) {
    double p = 1.0;
    for (std::size_t k = 0; k < terms; ++k) {
      design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = p;
      p *= scores[i];
    }
    target(static_cast<Eigen::Index>(i)) = y[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < static_cast<Eigen::Index>(terms)) throw DataError("regression design matrix is rank deficient");
  const Eigen::VectorXd beta = qr.solve(target);
  return {beta.data(), beta.data() + beta.size()};
}

double evaluate_polynomial(std::span<const double> coefficients, double s) {
  double v = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) v = v * s + *it;
  return v;
}

// ---------------------------------------------------------------------------
// Logistic regression

namespace {

void softmax_in_place(std::vector<double>& logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& l : logits) {
    l = std::exp(l - mx);
    sum += l;
  }
  for (double& l : logits) l /= sum;
}

}  // namespace

double logistic_objective(std::span<const double> params, std::span<const double> z, std::span<const int> targets,
                          std::size_t classes, double l2) {
  double loss = 0.0;
  std::vector<double> logits(classes);
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (std::size_t c = 0; c < classes; ++c) logits[c] = params[c] * z[i] + params[classes + c];
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double l : logits) sum += std::exp(l - mx);
    loss += mx + std::log(sum) - logits[static_cast<std::size_t>(targets[i])];
  }
  return loss / static_cast<double>(z.size()) + 0.5 * l2 * dot(params, params);
}

std::vector<double> logistic_gradient(std::span<const double> params, std::span<const double> z,
                                      std::span<const int> targets, std::size_t classes, double l2) {
  std::vector<double> grad(2 * classes, 0.0);
  std::vector<double> p(classes);
  const double inv_n = 1.0 / static_cast<double>(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (std::size_t c = 0; c < classes; ++c) p[c] = params[c] * z[i] + params[classes + c];
    softmax_in_place(p);
    for (std::size_t c = 0; c < classes; ++c) {
      const double r = p[c] - (static_cast<std::size_t>(targets[i]) == c ? 1.0 : 0.0);
      grad[c] += r * z[i] * inv_n;
      grad[classes + c] += r * inv_n;
    }
  }
  for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += l2 * params[k];
  return grad;
}

std::vector<double> LogisticModel::probabilities(double score) const {
  const double z = (score - mean) / scale;
  std::vector<double> p(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) p[c] = weights[c] * z + bias[c];
  softmax_in_place(p);
  return p;
}

int LogisticModel::predict(double score) const {
  const auto p = probabilities(score);
  return classes[static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin())];
}

LogisticModel fit_logistic(std::span<const double> scores, std::span<const int> y, const LogisticParams& params) {
  if (scores.size() != y.size()) throw DataError("scores and labels differ in length");
  const std::set<int> distinct(y.begin(), y.end());
  if (distinct.size() < 2) throw DataError("logistic regression needs at least two classes");

  LogisticModel model;
  model.classes.assign(distinct.begin(), distinct.end());
  const std::size_t k = model.classes.size();
  const double n = static_cast<double>(scores.size());
  model.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / n;
  double var = 0.0;
  for (double s : scores) var += (s - model.mean) * (s - model.mean);
  const double sd = std::sqrt(var / n);
  model.scale = sd > 0.0 ? sd : 1.0;

  std::vector<double> z(scores.size());
  std::vector<int> targets(y.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    z[i] = (scores[i] - model.mean) / model.scale;
    sq += 1.0 + z[i] * z[i];
    targets[i] = static_cast<int>(std::lower_bound(model.classes.begin(), model.classes.end(), y[i]) -
                                  model.classes.begin());
  }
  // Softmax curvature is at most 1/2 per unit of |(z, 1)|^2.
  const double lipschitz = 0.5 * sq / n + params.l2;
  const double step = 1.0 / lipschitz;

  std::vector<double> theta(2 * k, 0.0);
  int it = 0;
  for (; it < params.max_iterations; ++it) {
    const auto g = logistic_gradient(theta, z, targets, k, params.l2);
    if (std::sqrt(dot(g, g)) < params.gradient_tolerance) {
      model.converged = true;
      break;
    }
    for (std::size_t j = 0; j < theta.size(); ++j) theta[j] -= step * g[j];
  }
  model.iterations = it;
  model.weights.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(k));
  model.bias.assign(theta.begin() + static_cast<std::ptrdiff_t>(k), theta.end());
  return model;
}

}  // namespace readlevel
