#include "readlevel/adapt.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include <fmt/format.h>

#include "readlevel/error.hpp"
#include "readlevel/text.hpp"

namespace readlevel {

namespace {

constexpr std::string_view kAuditHeader = "id\titeration\tpseudo_label\tconfidence";

}  // namespace

std::vector<double> easyadapt_augment(std::span<const double> x, Domain domain) {
  const std::size_t f = x.size();
  std::vector<double> out(3 * f, 0.0);
  std::copy(x.begin(), x.end(), out.begin());
  const std::size_t block = domain == Domain::Native ? f : 2 * f;
  std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(block));
  return out;
}

FeatureVector easyadapt_augment(const FeatureVector& x, Domain domain, const FeatureCatalog& augmented_catalog) {
  if (augmented_catalog.size() != 3 * x.values.size()) {
    throw DataError("augmented catalog must be three times the input dimension");
  }
  return {easyadapt_augment(x.values, domain), augmented_catalog.hash()};
}

Matrix easyadapt_augment(const Matrix& x, std::span<const Domain> domains) {
  if (domains.size() != x.rows()) throw DataError("one domain per row is required");
  Matrix out(x.rows(), 3 * x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto aug = easyadapt_augment(x.row(r), domains[r]);
    std::copy(aug.begin(), aug.end(), out.row(r).begin());
  }
  return out;
}

FeatureCatalog easyadapt_catalog(const FeatureCatalog& base) {
  FeatureCatalog out;
  for (std::string_view suffix : {"@general", "@source", "@target"}) {
    for (const auto& name : base.names()) out.append(name + std::string(suffix));
  }
  return out;
}

void SelfTrainConfig::validate() const {
  if (k < 1) throw ConfigError(fmt::format("self-training K must be at least 1, got {}", k));
  if (iterations < 1) throw ConfigError(fmt::format("self-training iterations must be at least 1, got {}", iterations));
  if (allowed_levels.empty()) throw ConfigError("self-training needs at least one allowed level");
  for (int l : allowed_levels) {
    if (l < kMinLevel || l > kMaxLevel) throw ConfigError(fmt::format("allowed level {} outside 1..5", l));
  }
}

SelfTrainResult self_train(const Matrix& labeled_x, std::span<const int> labeled_y, const Matrix& unlabeled_x,
                           std::span<const std::string> unlabeled_ids, const SelfTrainConfig& config,
                           const SvmParams& params) {
  config.validate();
  if (labeled_x.rows() != labeled_y.size()) throw DataError("labelled rows and labels differ in length");
  if (unlabeled_x.rows() != unlabeled_ids.size()) throw DataError("unlabelled rows and ids differ in length");
  if (unlabeled_x.rows() > 0 && unlabeled_x.cols() != labeled_x.cols()) {
    throw DataError("labelled and unlabelled features differ in dimension");
  }

  SelfTrainResult result;
  Matrix pool_x = labeled_x;
  std::vector<int> pool_y(labeled_y.begin(), labeled_y.end());
  std::vector<bool> used(unlabeled_x.rows(), false);
  const auto k = static_cast<std::size_t>(config.k);

  for (int it = 1; it <= config.iterations; ++it) {
    result.model = train_classifier(pool_x, pool_y, params);

    struct Candidate {
      std::size_t row;
      int level;
      double confidence;
    };
    std::vector<Candidate> eligible;
    for (std::size_t r = 0; r < unlabeled_x.rows(); ++r) {
      if (used[r]) continue;
      const Prediction p = predict(result.model, unlabeled_x.row(r));
      if (config.allowed_levels.contains(p.level)) eligible.push_back({r, p.level, p.confidence});
    }
    if (eligible.size() < k) {
      result.terminated_early = true;
      result.terminated_at = it;
      return result;
    }
    std::stable_sort(eligible.begin(), eligible.end(),
                     [](const Candidate& a, const Candidate& b) { return a.confidence > b.confidence; });
    for (std::size_t i = 0; i < k; ++i) {
      const Candidate& c = eligible[i];
      used[c.row] = true;
      pool_x.append_row(unlabeled_x.row(c.row));
      pool_y.push_back(c.level);
      result.audit.push_back({unlabeled_ids[c.row], it, c.level, c.confidence});
    }
    result.added_per_iteration.push_back(k);
  }
  result.model = train_classifier(pool_x, pool_y, params);
  result.class_collapse = !result.audit.empty() && std::all_of(result.audit.begin(), result.audit.end(),
                                                               [&](const AuditEntry& e) {
                                                                 return e.pseudo_label == result.audit.front().pseudo_label;
                                                               });
  return result;
}

void replay_audit(std::span<const AuditEntry> audit, const Matrix& labeled_x, std::span<const int> labeled_y,
                  const Matrix& unlabeled_x, std::span<const std::string> unlabeled_ids, Matrix& pool_x,
                  std::vector<int>& pool_y) {
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t r = 0; r < unlabeled_ids.size(); ++r) row_of.emplace(unlabeled_ids[r], r);
  pool_x = labeled_x;
  pool_y.assign(labeled_y.begin(), labeled_y.end());
  for (const auto& e : audit) {
    const auto it = row_of.find(e.id);
    if (it == row_of.end()) throw DataError(fmt::format("audit log names unknown instance '{}'", e.id));
    pool_x.append_row(unlabeled_x.row(it->second));
    pool_y.push_back(e.pseudo_label);
  }
}

void write_audit_log(std::span<const AuditEntry> audit, std::ostream& out) {
  out << "#format readlevel-audit 1\n" << kAuditHeader << '\n';
  for (const auto& e : audit) out << fmt::format("{}\t{}\t{}\t{}\n", e.id, e.iteration, e.pseudo_label, e.confidence);
}

std::vector<AuditEntry> read_audit_log(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != "#format readlevel-audit 1") {
    throw DataError("audit log: missing or unsupported format line");
  }
  if (!std::getline(in, line) || text::trim(line) != kAuditHeader) throw DataError("audit log: bad header");
  std::vector<AuditEntry> out;
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto f = text::split(line, '\t');
    if (f.size() != 4) throw DataError(fmt::format("audit log line {}: expected 4 columns", line_no));
    try {
      out.push_back({f[0], std::stoi(f[1]), std::stoi(f[2]), std::stod(f[3])});
    } catch (const std::logic_error&) {
      throw DataError(fmt::format("audit log line {}: malformed number", line_no));
    }
  }
  return out;
}

}  // namespace readlevel
