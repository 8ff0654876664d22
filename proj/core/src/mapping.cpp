#include "readlevel/mapping.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "readlevel/error.hpp"
#include "readlevel/text.hpp"

namespace readlevel {

namespace {

struct Candidate {
  double threshold;
  double gap;
};

// Labels must form a contiguous run of at least two levels.
std::vector<int> contiguous_levels(std::span<const int> y) {
  const std::set<int> present(y.begin(), y.end());
  if (present.size() < 2) throw DataError("cutoff mapping needs at least two levels");
  std::vector<int> levels(present.begin(), present.end());
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i] != levels[i - 1] + 1) {
      throw DataError(fmt::format("cutoff mapping: level {} missing from training data", levels[i - 1] + 1));
    }
  }
  return levels;
}

// Best threshold between levels lo and lo+1, looking only at instances of
// those two levels.
double pair_threshold(std::span<const double> scores, std::span<const int> y, int lo) {
  std::vector<std::pair<double, int>> pts;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == lo || y[i] == lo + 1) pts.emplace_back(scores[i], y[i]);
  }
  std::sort(pts.begin(), pts.end());

  std::vector<Candidate> candidates;
  candidates.push_back({pts.front().first - 1.0, -1.0});
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].first > pts[i - 1].first) {
      candidates.push_back({0.5 * (pts[i - 1].first + pts[i].first), pts[i].first - pts[i - 1].first});
    }
  }
  candidates.push_back({pts.back().first + 1.0, -1.0});

  // Sweep: hits(t) = #lo below t + #(lo+1) at or above t.
  std::size_t upper_total = 0;
  for (const auto& p : pts) upper_total += p.second == lo + 1 ? 1 : 0;
  std::size_t lower_below = 0;
  std::size_t upper_below = 0;
  std::size_t next = 0;
  std::size_t best_hits = 0;
  Candidate best = candidates.front();
  bool first = true;
  for (const auto& c : candidates) {
    while (next < pts.size() && pts[next].first < c.threshold) {
      (pts[next].second == lo ? lower_below : upper_below) += 1;
      ++next;
    }
    const std::size_t hits = lower_below + (upper_total - upper_below);
    if (first || hits > best_hits || (hits == best_hits && c.gap > best.gap)) {
      best_hits = hits;
      best = c;
      first = false;
    }
  }
  return best.threshold;
}

// Exact maximisation over monotone level assignments of the sorted
// distinct scores.
std::vector<double> joint_thresholds(std::span<const double> scores, std::span<const int> y,
                                     const std::vector<int>& levels) {
  const std::size_t m = levels.size();
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  std::vector<double> group_score;
  std::vector<std::vector<std::size_t>> counts;
  for (std::size_t idx : order) {
    if (group_score.empty() || scores[idx] > group_score.back()) {
      group_score.push_back(scores[idx]);
      counts.emplace_back(m, 0);
    }
    ++counts.back()[static_cast<std::size_t>(y[idx] - levels.front())];
  }
  const std::size_t g_count = group_score.size();
  std::vector<std::vector<std::size_t>> dp(g_count, std::vector<std::size_t>(m, 0));
  std::vector<std::vector<std::size_t>> from(g_count, std::vector<std::size_t>(m, 0));
  for (std::size_t k = 0; k < m; ++k) dp[0][k] = counts[0][k];
  for (std::size_t g = 1; g < g_count; ++g) {
    std::size_t best_prev = 0;
    for (std::size_t k = 0; k < m; ++k) {
      if (dp[g - 1][k] > dp[g - 1][best_prev]) best_prev = k;
      dp[g][k] = counts[g][k] + dp[g - 1][best_prev];
      from[g][k] = best_prev;
    }
  }
  std::vector<std::size_t> assigned(g_count);
  std::size_t k = static_cast<std::size_t>(
      std::max_element(dp.back().begin(), dp.back().end()) - dp.back().begin());
  for (std::size_t g = g_count; g-- > 0;) {
    assigned[g] = k;
    if (g > 0) k = from[g][k];
  }

  std::vector<double> thresholds;
  for (std::size_t j = 1; j < m; ++j) {
    std::size_t g = 0;
    while (g < g_count && assigned[g] < j) ++g;
    if (g == 0) {
      thresholds.push_back(group_score.front() - 1.0);
    } else if (g == g_count) {
      thresholds.push_back(group_score.back() + 1.0);
    } else {
      thresholds.push_back(0.5 * (group_score[g - 1] + group_score[g]));
    }
  }
  return thresholds;
}

void make_strictly_increasing(std::vector<double>& t) {
  std::sort(t.begin(), t.end());
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i] <= t[i - 1]) t[i] = std::nextafter(t[i - 1], std::numeric_limits<double>::infinity());
  }
}

Matrix column(std::span<const double> scores) {
  Matrix m(scores.size(), 1);
  for (std::size_t i = 0; i < scores.size(); ++i) m(i, 0) = scores[i];
  return m;
}

}  // namespace

MapperVariant parse_mapper_variant(std::string_view s) {
  const std::string v = text::to_lower(s);
  if (v == "linear") return MapperVariant::LinearReg;
  if (v == "poly4") return MapperVariant::PolyReg4;
  if (v == "cutoff") return MapperVariant::CutoffBoundaries;
  if (v == "logistic") return MapperVariant::Logistic1D;
  if (v == "svm") return MapperVariant::LinearSVM1D;
  throw ConfigError(fmt::format("unknown mapper '{}' (expected linear, poly4, cutoff, logistic or svm)", s));
}

std::string_view mapper_variant_name(MapperVariant v) {
  switch (v) {
    case MapperVariant::LinearReg:
      return "linear";
    case MapperVariant::PolyReg4:
      return "poly4";
    case MapperVariant::CutoffBoundaries:
      return "cutoff";
    case MapperVariant::Logistic1D:
      return "logistic";
    case MapperVariant::LinearSVM1D:
      return "svm";
  }
  return "linear";
}

int round_and_clamp(double v) {
  if (std::isnan(v)) throw DataError("cannot map a NaN regression output");
  const double r = std::round(v);
  return static_cast<int>(std::clamp(r, static_cast<double>(kMinLevel), static_cast<double>(kMaxLevel)));
}

std::size_t cutoff_hits(std::span<const double> scores, std::span<const int> y, std::span<const double> thresholds,
                        int lowest_level) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    int level = lowest_level;
    for (double t : thresholds) level += scores[i] >= t ? 1 : 0;
    hits += level == y[i] ? 1 : 0;
  }
  return hits;
}

LevelMapper fit_mapper(std::span<const double> scores, std::span<const int> y, MapperVariant variant,
                       const MapperOptions& options) {
  if (scores.size() != y.size()) throw DataError("scores and labels differ in length");
  if (scores.empty()) throw DataError("cannot fit a mapper on no instances");
  for (double s : scores) {
    if (!std::isfinite(s)) throw DataError("mapper scores must be finite");
  }
  LevelMapper m;
  m.variant = variant;
  switch (variant) {
    case MapperVariant::LinearReg:
    case MapperVariant::PolyReg4: {
      const std::vector<double> target(y.begin(), y.end());
      m.coefficients = fit_regression(scores, target, variant == MapperVariant::LinearReg ? 1 : 4);
      break;
    }
    case MapperVariant::CutoffBoundaries: {
      const auto levels = contiguous_levels(y);
      m.lowest_level = levels.front();
      if (options.joint_cutoffs) {
        m.thresholds = joint_thresholds(scores, y, levels);
      } else {
        for (std::size_t j = 0; j + 1 < levels.size(); ++j) m.thresholds.push_back(pair_threshold(scores, y, levels[j]));
      }
      make_strictly_increasing(m.thresholds);
      break;
    }
    case MapperVariant::Logistic1D:
      m.logistic = fit_logistic(scores, y, options.logistic);
      break;
    case MapperVariant::LinearSVM1D: {
      // One-vs-one: each pair of levels is separable by a threshold on a
      // single score, which one-vs-rest cannot express for middle levels.
      const std::set<int> present(y.begin(), y.end());
      if (present.size() < 2) throw DataError("svm mapping needs at least two levels");
      const std::vector<int> levels(present.begin(), present.end());
      for (std::size_t a = 0; a < levels.size(); ++a) {
        for (std::size_t b = a + 1; b < levels.size(); ++b) {
          std::vector<double> s;
          std::vector<int> t;
          for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i] == levels[a] || y[i] == levels[b]) {
              s.push_back(scores[i]);
              t.push_back(y[i]);
            }
          }
          m.svm.push_back(train_classifier(column(s), t, options.svm));
        }
      }
      break;
    }
  }
  return m;
}

int map_score(const LevelMapper& mapper, double score) {
  switch (mapper.variant) {
    case MapperVariant::LinearReg:
    case MapperVariant::PolyReg4:
      return round_and_clamp(evaluate_polynomial(mapper.coefficients, score));
    case MapperVariant::CutoffBoundaries: {
      const auto above = std::upper_bound(mapper.thresholds.begin(), mapper.thresholds.end(), score);
      const int level = mapper.lowest_level + static_cast<int>(above - mapper.thresholds.begin());
      return std::clamp(level, kMinLevel, kMaxLevel);
    }
    case MapperVariant::Logistic1D:
      return std::clamp(mapper.logistic.predict(score), kMinLevel, kMaxLevel);
    case MapperVariant::LinearSVM1D: {
      const double x[1] = {score};
      std::array<int, kNumLevels> votes{};
      for (const auto& pair : mapper.svm) ++votes[static_cast<std::size_t>(predict(pair, x).level - kMinLevel)];
      // Ties go to the lower level.
      const auto best = std::max_element(votes.begin(), votes.end()) - votes.begin();
      return kMinLevel + static_cast<int>(best);
    }
  }
  return kMinLevel;
}

std::vector<int> map_scores(const LevelMapper& mapper, std::span<const double> scores) {
  std::vector<int> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(map_score(mapper, s));
  return out;
}

}  // namespace readlevel
