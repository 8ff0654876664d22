#include "readlevel/eval.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <unordered_map>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "readlevel/error.hpp"
#include "readlevel/text.hpp"

namespace readlevel {

namespace {

void check_aligned(std::size_t a, std::size_t b) {
  if (a != b) throw DataError(fmt::format("sequences differ in length ({} vs {})", a, b));
  if (a == 0) throw DataError("empty sequences");
}

std::size_t level_index(int level) {
  if (level < kMinLevel || level > kMaxLevel) throw DataError(fmt::format("level {} outside 1..5", level));
  return static_cast<std::size_t>(level - kMinLevel);
}

double two_sided_p(double t, double df) {
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
  void add(std::size_t i) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
  }
  // Count of inserted positions < i.
  std::uint64_t prefix(std::size_t i) const {
    std::uint64_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<std::uint64_t> tree_;
};

std::string number(double v) { return fmt::format("{}", v); }

double parse_number(const std::string& s, std::size_t line) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw DataError(fmt::format("report line {}: malformed number '{}'", line, s));
  }
}

std::size_t parse_count(const std::string& s, std::size_t line) {
  const double v = parse_number(s, line);
  if (v < 0 || v != std::floor(v)) throw DataError(fmt::format("report line {}: bad count '{}'", line, s));
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<std::size_t> FoldPlan::training_indices(std::size_t f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != f) out.push_back(i);
  }
  return out;
}

FoldPlan make_folds(std::span<const int> levels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw DataError("cross-validation needs at least two folds");
  std::map<int, std::vector<std::size_t>> by_level;
  for (std::size_t i = 0; i < levels.size(); ++i) by_level[levels[i]].push_back(i);
  for (const auto& [level, idx] : by_level) {
    if (idx.size() < k) {
      throw DataError(fmt::format("level {} has {} documents, fewer than the {} folds", level, idx.size(), k));
    }
  }
  FoldPlan plan;
  plan.seed = seed;
  plan.folds.resize(k);
  plan.fold_of.assign(levels.size(), 0);
  std::mt19937_64 rng(seed);
  std::size_t offset = 0;
  for (auto& [level, idx] : by_level) {
    for (std::size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng() % i)]);
    }
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const std::size_t f = (offset + i) % k;
      plan.folds[f].push_back(idx[i]);
      plan.fold_of[idx[i]] = f;
    }
    offset += idx.size();
  }
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

double accuracy(std::span<const int> gold, std::span<const int> predicted) {
  check_aligned(gold.size(), predicted.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hits += gold[i] == predicted[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

ConfusionMatrix confusion(std::span<const int> gold, std::span<const int> predicted) {
  check_aligned(gold.size(), predicted.size());
  ConfusionMatrix m{};
  for (std::size_t i = 0; i < gold.size(); ++i) ++m[level_index(gold[i])][level_index(predicted[i])];
  return m;
}

std::size_t total(const ConfusionMatrix& m) {
  std::size_t n = 0;
  for (const auto& row : m) n = std::accumulate(row.begin(), row.end(), n);
  return n;
}

double accuracy(const ConfusionMatrix& m) {
  const std::size_t n = total(m);
  if (n == 0) throw DataError("empty confusion matrix");
  std::size_t trace = 0;
  for (std::size_t i = 0; i < m.size(); ++i) trace += m[i][i];
  return static_cast<double>(trace) / static_cast<double>(n);
}

double pairwise_accuracy(std::span<const int> gold, std::span<const double> scores) {
  check_aligned(gold.size(), scores.size());
  for (double s : scores) {
    if (std::isnan(s)) throw DataError("NaN ranking score");
  }
  std::vector<double> distinct(scores.begin(), scores.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  auto rank_of = [&](double s) {
    return static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), s) - distinct.begin());
  };

  std::vector<std::size_t> order(gold.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return gold[a] < gold[b]; });

  Fenwick tree(distinct.size());
  std::uint64_t inserted = 0;
  std::uint64_t concordant = 0;
  std::uint64_t ties = 0;
  std::uint64_t pairs = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && gold[order[j]] == gold[order[i]]) ++j;
    // Every earlier instance has a strictly lower gold level.
    for (std::size_t g = i; g < j; ++g) {
      const std::size_t r = rank_of(scores[order[g]]);
      const std::uint64_t below = tree.prefix(r);
      const std::uint64_t at = tree.prefix(r + 1) - below;
      concordant += below;
      ties += at;
      pairs += inserted;
    }
    for (std::size_t g = i; g < j; ++g) {
      tree.add(rank_of(scores[order[g]]));
      ++inserted;
    }
    i = j;
  }
  if (pairs == 0) throw DataError("pairwise accuracy needs two distinct gold levels");
  return static_cast<double>(2 * concordant + ties) / static_cast<double>(2 * pairs);
}

double pearson(std::span<const double> a, std::span<const double> b) {
  check_aligned(a.size(), b.size());
  if (a.size() < 2) throw DataError("correlation needs at least two points");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw DataError("correlation undefined for a constant sequence");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double pearson(std::span<const int> a, std::span<const double> b) {
  const std::vector<double> ad(a.begin(), a.end());
  return pearson(ad, b);
}

TestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  check_aligned(a.size(), b.size());
  if (a.size() < 2) throw DataError("paired t-test needs at least two folds");
  const double n = static_cast<double>(a.size());
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  TestResult r;
  r.df = n - 1.0;
  const double sd = std::sqrt(ss / (n - 1.0));
  if (sd == 0.0) {
    if (mean == 0.0) return r;
    r.statistic = std::copysign(std::numeric_limits<double>::infinity(), mean);
    r.p_value = 0.0;
    return r;
  }
  r.statistic = mean / (sd / std::sqrt(n));
  r.p_value = two_sided_p(r.statistic, r.df);
  return r;
}

TestResult williams_test(double r12, double r13, double r23, std::size_t n) {
  if (n < 4) throw DataError("Williams' test needs at least four instances");
  for (double r : {r12, r13, r23}) {
    if (!(r >= -1.0 && r <= 1.0)) throw DataError("correlations must lie in [-1, 1]");
  }
  const double nn = static_cast<double>(n);
  if (r12 == r13) return TestResult{0.0, nn - 3.0, 1.0};
  const double det = 1.0 - r12 * r12 - r13 * r13 - r23 * r23 + 2.0 * r12 * r13 * r23;
  const double rbar = 0.5 * (r12 + r13);
  const double denom = 2.0 * ((nn - 1.0) / (nn - 3.0)) * det + rbar * rbar * std::pow(1.0 - r23, 3.0);
  if (!(denom > 0.0)) throw DataError("Williams' test undefined for these correlations");
  TestResult r;
  r.df = nn - 3.0;
  r.statistic = (r12 - r13) * std::sqrt((nn - 1.0) * (1.0 + r23) / denom);
  r.p_value = two_sided_p(r.statistic, r.df);
  return r;
}

EvaluationReport build_report(std::vector<std::pair<std::string, std::string>> settings,
                              std::vector<InstanceResult> predictions) {
  if (predictions.empty()) throw DataError("report has no predictions");
  EvaluationReport report;
  report.settings = std::move(settings);
  std::size_t k = 0;
  for (const auto& p : predictions) k = std::max(k, p.fold + 1);
  std::vector<std::vector<const InstanceResult*>> by_fold(k);
  for (const auto& p : predictions) by_fold[p.fold].push_back(&p);

  auto safe = [](auto&& f) {
    try {
      return f();
    } catch (const DataError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  for (const auto& fold : by_fold) {
    if (fold.empty()) throw DataError("report has an empty fold");
    std::vector<int> gold;
    std::vector<int> pred;
    std::vector<double> score;
    for (const auto* p : fold) {
      gold.push_back(p->gold);
      pred.push_back(p->predicted);
      score.push_back(p->score);
    }
    FoldMetrics m;
    m.size = fold.size();
    m.accuracy = accuracy(gold, pred);
    m.pairwise_accuracy = safe([&] { return pairwise_accuracy(gold, score); });
    m.pearson = safe([&] { return pearson(gold, score); });
    report.folds.push_back(m);
  }
  const double kd = static_cast<double>(k);
  for (const auto& m : report.folds) {
    report.mean.size += m.size;
    report.mean.accuracy += m.accuracy / kd;
    report.mean.pairwise_accuracy += m.pairwise_accuracy / kd;
    report.mean.pearson += m.pearson / kd;
  }
  std::vector<int> gold;
  std::vector<int> pred;
  for (const auto& p : predictions) {
    gold.push_back(p.gold);
    pred.push_back(p.predicted);
  }
  report.confusion = confusion(gold, pred);
  report.predictions = std::move(predictions);
  return report;
}

void write_report_text(const EvaluationReport& report, std::ostream& out) {
  for (const auto& [key, value] : report.settings) out << fmt::format("{:<18} {}\n", key, value);
  out << '\n' << fmt::format("{:<6} {:>6} {:>8} {:>8} {:>8}\n", "fold", "n", "ACC", "pairACC", "PCC");
  for (std::size_t f = 0; f < report.folds.size(); ++f) {
    const auto& m = report.folds[f];
    out << fmt::format("{:<6} {:>6} {:>8.4f} {:>8.4f} {:>8.4f}\n", f, m.size, m.accuracy, m.pairwise_accuracy,
                       m.pearson);
  }
  const auto& m = report.mean;
  out << fmt::format("{:<6} {:>6} {:>8.4f} {:>8.4f} {:>8.4f}\n", "mean", m.size, m.accuracy, m.pairwise_accuracy,
                     m.pearson);
  out << "\nconfusion (rows gold, columns predicted)\n" << fmt::format("{:>6}", "");
  for (int l = kMinLevel; l <= kMaxLevel; ++l) out << fmt::format(" {:>5}", l);
  out << '\n';
  for (std::size_t r = 0; r < report.confusion.size(); ++r) {
    out << fmt::format("{:>6}", r + kMinLevel);
    for (std::size_t c : report.confusion[r]) out << fmt::format(" {:>5}", c);
    out << '\n';
  }
}

void write_report_tsv(const EvaluationReport& report, std::ostream& out) {
  out << "#format readlevel-report 1\n";
  out << "#block settings\nkey\tvalue\n";
  for (const auto& [key, value] : report.settings) out << key << '\t' << value << '\n';
  out << "#block metrics\nfold\tsize\taccuracy\tpairwise_accuracy\tpearson\n";
  auto row = [&](const std::string& name, const FoldMetrics& m) {
    out << fmt::format("{}\t{}\t{}\t{}\t{}\n", name, m.size, number(m.accuracy), number(m.pairwise_accuracy),
                       number(m.pearson));
  };
  for (std::size_t f = 0; f < report.folds.size(); ++f) row(std::to_string(f), report.folds[f]);
  row("mean", report.mean);
  out << "#block confusion\ngold";
  for (int l = kMinLevel; l <= kMaxLevel; ++l) out << '\t' << l;
  out << '\n';
  for (std::size_t r = 0; r < report.confusion.size(); ++r) {
    out << r + kMinLevel;
    for (std::size_t c : report.confusion[r]) out << '\t' << c;
    out << '\n';
  }
  out << "#block predictions\nid\tfold\tgold\tpredicted\tscore\tconfidence\n";
  for (const auto& p : report.predictions) {
    out << fmt::format("{}\t{}\t{}\t{}\t{}\t{}\n", p.id, p.fold, p.gold, p.predicted, number(p.score),
                       number(p.confidence));
  }
}

EvaluationReport read_report_tsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != "#format readlevel-report 1") {
    throw DataError("report: missing or unsupported format line");
  }
  EvaluationReport report;
  std::string block;
  bool header_pending = false;
  std::size_t line_no = 1;
  std::size_t confusion_row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.starts_with("#block ")) {
      block = line.substr(7);
      header_pending = true;
      continue;
    }
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto f = text::split(line, '\t');
    if (block == "settings") {
      if (f.size() != 2) throw DataError(fmt::format("report line {}: expected key and value", line_no));
      report.settings.emplace_back(f[0], f[1]);
    } else if (block == "metrics") {
      if (f.size() != 5) throw DataError(fmt::format("report line {}: expected 5 columns", line_no));
      FoldMetrics m{parse_count(f[1], line_no), parse_number(f[2], line_no), parse_number(f[3], line_no),
                    parse_number(f[4], line_no)};
      (f[0] == "mean" ? report.mean : report.folds.emplace_back()) = m;
    } else if (block == "confusion") {
      if (f.size() != kNumLevels + 1 || confusion_row >= kNumLevels) {
        throw DataError(fmt::format("report line {}: bad confusion row", line_no));
      }
      for (std::size_t c = 0; c < kNumLevels; ++c) report.confusion[confusion_row][c] = parse_count(f[c + 1], line_no);
      ++confusion_row;
    } else if (block == "predictions") {
      if (f.size() != 6) throw DataError(fmt::format("report line {}: expected 6 columns", line_no));
      report.predictions.push_back({f[0], parse_count(f[1], line_no), static_cast<int>(parse_count(f[2], line_no)),
                                    static_cast<int>(parse_count(f[3], line_no)), parse_number(f[4], line_no),
                                    parse_number(f[5], line_no)});
    } else {
      throw DataError(fmt::format("report line {}: unknown block '{}'", line_no, block));
    }
  }
  return report;
}

TestResult compare_systems(const EvaluationReport& a, const EvaluationReport& b, Metric metric) {
  if (metric == Metric::Accuracy) {
    if (a.folds.size() != b.folds.size()) throw DataError("reports have different fold counts");
    std::vector<double> fa;
    std::vector<double> fb;
    for (const auto& m : a.folds) fa.push_back(m.accuracy);
    for (const auto& m : b.folds) fb.push_back(m.accuracy);
    return paired_t_test(fa, fb);
  }
  std::unordered_map<std::string, const InstanceResult*> in_b;
  for (const auto& p : b.predictions) in_b.emplace(p.id, &p);
  std::vector<double> gold;
  std::vector<double> sa;
  std::vector<double> sb;
  for (const auto& p : a.predictions) {
    const auto it = in_b.find(p.id);
    if (it == in_b.end()) throw DataError(fmt::format("instance '{}' missing from the second report", p.id));
    if (it->second->gold != p.gold) throw DataError(fmt::format("instance '{}' has different gold labels", p.id));
    gold.push_back(p.gold);
    sa.push_back(p.score);
    sb.push_back(it->second->score);
  }
  if (gold.size() != b.predictions.size()) throw DataError("reports cover different instances");
  return williams_test(pearson(gold, sa), pearson(gold, sb), pearson(sa, sb), gold.size());
}

}  // namespace readlevel
