#include "readlevel/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "readlevel/error.hpp"
#include "readlevel/text.hpp"

namespace readlevel {

namespace {

std::string fingerprint(std::span<const std::string> ids) {
  std::vector<std::string> sorted(ids.begin(), ids.end());
  std::sort(sorted.begin(), sorted.end());
  return FeatureCatalog(std::move(sorted)).hash();
}

std::vector<std::size_t> all_rows(const Dataset& d) {
  std::vector<std::size_t> rows(d.size());
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

std::vector<std::string> ids_of(const Dataset& d, std::span<const std::size_t> rows) {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(d.ids[r]);
  return out;
}

std::vector<int> labels_of(const Dataset& d, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(d.labels[r]);
  return out;
}

std::vector<Domain> domains_of(const Dataset& d, std::span<const std::size_t> rows) {
  std::vector<Domain> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(d.domains[r]);
  return out;
}

std::vector<const Document*> docs_of(const Dataset& d, std::span<const std::size_t> rows) {
  std::vector<const Document*> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(d.documents[r]);
  return out;
}

// Feature rows, with the POS LM block appended when the dataset asks for it.
Matrix rows_of(const Dataset& d, std::span<const std::size_t> rows, const PosLmBank* bank) {
  Matrix x = d.x.select_rows(rows);
  if (!d.pos_lm) return x;
  const auto docs = docs_of(d, rows);
  return x.hconcat(pos_lm_matrix(docs, *bank));
}

void append_rows(Matrix& into, const Matrix& rows) {
  for (std::size_t r = 0; r < rows.rows(); ++r) into.append_row(rows.row(r));
}

Matrix augment_all(const Matrix& x, Domain d) {
  const std::vector<Domain> domains(x.rows(), d);
  return easyadapt_augment(x, domains);
}

std::vector<double> scores_of(const System& s, const Matrix& x) {
  std::vector<double> out;
  out.reserve(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out.push_back(s.predict(x.row(r)).score);
  return out;
}

}  // namespace

namespace {

void check_inputs(const Dataset& target, const Dataset* source, const ExperimentConfig& config) {
  config.validate(source != nullptr);
  target.validate(true);
  if (config.transfer != TransferMode::None) {
    source->validate(config.transfer != TransferMode::SelfTrain);
    if (!(source->catalog == target.catalog) || source->pos_lm != target.pos_lm) {
      throw DataError("source and target corpora use different feature catalogs");
    }
  }
}

}  // namespace

ModelKind parse_model_kind(std::string_view s) {
  const std::string v = text::to_lower(s);
  if (v == "classify") return ModelKind::Classify;
  if (v == "rank") return ModelKind::Rank;
  throw ConfigError(fmt::format("unknown model '{}' (expected classify or rank)", s));
}

std::string_view model_kind_name(ModelKind k) { return k == ModelKind::Classify ? "classify" : "rank"; }

TransferMode parse_transfer_mode(std::string_view s) {
  const std::string v = text::to_lower(s);
  if (v == "none") return TransferMode::None;
  if (v == "generalize") return TransferMode::Generalize;
  if (v == "easyadapt") return TransferMode::EasyAdapt;
  if (v == "selftrain") return TransferMode::SelfTrain;
  throw ConfigError(fmt::format("unknown transfer '{}' (expected none, generalize, easyadapt or selftrain)", s));
}

std::string_view transfer_mode_name(TransferMode t) {
  switch (t) {
    case TransferMode::None:
      return "none";
    case TransferMode::Generalize:
      return "generalize";
    case TransferMode::EasyAdapt:
      return "easyadapt";
    case TransferMode::SelfTrain:
      return "selftrain";
  }
  return "none";
}

FeatureCatalog Dataset::full_catalog() const {
  FeatureCatalog c = catalog;
  if (pos_lm) c.append(pos_lm_catalog());
  return c;
}

void Dataset::validate(bool require_labels) const {
  const std::size_t n = ids.size();
  if (labels.size() != n || domains.size() != n || x.rows() != n) {
    throw DataError("dataset columns differ in length");
  }
  if (x.cols() != catalog.size()) throw DataError("dataset width does not match its catalog");
  if (pos_lm && documents.size() != n) throw DataError("POS LM features need the documents");
  for (std::size_t i = 0; i < n; ++i) {
    if (!require_labels && labels[i] == 0) continue;
    if (labels[i] < kMinLevel || labels[i] > kMaxLevel) {
      throw DataError(fmt::format("instance '{}' has no valid level", ids[i]));
    }
  }
}

Dataset make_dataset(std::span<const Document> docs, const FeatureGroups& groups, const Resources& resources) {
  Dataset d;
  d.catalog = document_catalog(groups, !resources.reference_lms.empty());
  d.x = Matrix(0, d.catalog.size());
  for (const auto& doc : docs) {
    d.ids.push_back(doc.id());
    d.labels.push_back(doc.label() ? doc.label()->value : 0);
    d.domains.push_back(doc.domain());
    d.documents.push_back(&doc);
    d.x.append_row(document_features(doc, groups, resources));
  }
  d.pos_lm = groups.lm;
  return d;
}

void ExperimentConfig::validate(bool has_source) const {
  if (folds < 2) throw ConfigError("folds must be at least 2");
  if (svm.c <= 0.0) throw ConfigError("C must be positive");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (transfer == TransferMode::SelfTrain) {
    if (model != ModelKind::Classify) throw ConfigError("transfer=selftrain requires model=classify");
    selftrain.validate();
  }
  if (transfer != TransferMode::None && !has_source) {
    throw ConfigError(fmt::format("transfer={} requires a second (transfer) corpus", transfer_mode_name(transfer)));
  }
}

System::Output System::predict(std::span<const double> x) const {
  std::vector<double> augmented;
  if (augment_as) {
    augmented = easyadapt_augment(x, *augment_as);
    x = augmented;
  }
  Output out;
  if (kind == ModelKind::Classify) {
    const Prediction p = readlevel::predict(classifier, x);
    out.level = p.level;
    out.score = p.level;
    out.confidence = p.confidence;
  } else {
    out.score = ranker.score(x);
    out.level = mapper ? map_score(*mapper, out.score) : 0;
  }
  return out;
}

System train_system(const Matrix& x, std::span<const int> y, std::span<const Domain> domains,
                    const ExperimentConfig& config) {
  System s;
  s.kind = config.model;
  if (config.model == ModelKind::Classify) {
    s.classifier = train_classifier(x, y, config.svm);
  } else {
    s.ranker = train_ranker(x, y, domains, config.same_domain_only, config.svm);
    std::vector<double> scores;
    for (std::size_t r = 0; r < x.rows(); ++r) scores.push_back(s.ranker.score(x.row(r)));
    s.mapper = fit_mapper(scores, y, config.mapper, config.mapper_options);
  }
  return s;
}

LeakageGuard::LeakageGuard(const FoldPlan& plan, std::span<const std::string> ids) {
  for (const auto& fold : plan.folds) {
    auto& set = validation_.emplace_back();
    for (std::size_t i : fold) set.insert(ids[i]);
  }
}

void LeakageGuard::check(std::size_t fold, std::string_view step, std::span<const std::string> fit_ids) {
  for (const auto& id : fit_ids) {
    if (validation_.at(fold).contains(id)) {
      throw LeakageError(fmt::format("fold {}: validation instance '{}' used in {}", fold, id, step));
    }
  }
  const std::lock_guard lock(mutex_);
  records_.push_back({next_++, Record{fold, std::string(step), fit_ids.size(), fingerprint(fit_ids)}});
}

std::vector<LeakageGuard::Record> LeakageGuard::records() const {
  const std::lock_guard lock(mutex_);
  auto sorted = records_;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.second.fold < b.second.fold; });
  // Within a fold, call order is deterministic even when folds interleave.
  std::vector<Record> out;
  for (auto& [seq, rec] : sorted) out.push_back(std::move(rec));
  return out;
}

FitResult fit_system(const Dataset& target, std::span<const std::size_t> target_rows, const Dataset* source,
                     const ExperimentConfig& config, const FitObserver& observe, const PosLmBank* fixed_bank) {
  auto note = [&](std::string_view step, std::span<const std::string> ids) {
    if (observe) observe(step, ids);
  };
  const auto source_rows = source != nullptr ? all_rows(*source) : std::vector<std::size_t>{};
  const auto train_ids = ids_of(target, target_rows);
  const auto train_y = labels_of(target, target_rows);

  FitResult fit;
  // POS LMs are fitted on the labelled documents the learner trains on.
  if (fixed_bank != nullptr) {
    fit.pos_lms = *fixed_bank;
  } else if (target.pos_lm) {
    std::vector<const Document*> fit_docs;
    std::vector<std::string> fit_ids;
    if (config.transfer != TransferMode::Generalize) {
      fit_docs = docs_of(target, target_rows);
      fit_ids = train_ids;
    }
    if (config.transfer == TransferMode::Generalize || config.transfer == TransferMode::EasyAdapt) {
      const auto src_docs = docs_of(*source, source_rows);
      const auto src_ids = ids_of(*source, source_rows);
      fit_docs.insert(fit_docs.end(), src_docs.begin(), src_docs.end());
      fit_ids.insert(fit_ids.end(), src_ids.begin(), src_ids.end());
    }
    note("pos_lm", fit_ids);
    fit.pos_lms = PosLmBank::train(fit_docs);
  }
  const PosLmBank* bank = fit.pos_lms ? &*fit.pos_lms : nullptr;
  const Matrix train_x = rows_of(target, target_rows, bank);

  System& system = fit.system;
  switch (config.transfer) {
    case TransferMode::None: {
      note("learner", train_ids);
      system = train_system(train_x, train_y, domains_of(target, target_rows), config);
      if (system.mapper) note("mapper", train_ids);
      break;
    }
    case TransferMode::Generalize:
    case TransferMode::EasyAdapt: {
      const bool easy = config.transfer == TransferMode::EasyAdapt;
      Matrix fit_x = rows_of(*source, source_rows, bank);
      std::vector<int> fit_y = labels_of(*source, source_rows);
      std::vector<Domain> fit_domains(source_rows.size(), Domain::Native);
      std::vector<std::string> fit_ids = ids_of(*source, source_rows);
      if (easy) {
        fit_x = augment_all(fit_x, Domain::Native);
        append_rows(fit_x, augment_all(train_x, Domain::L2));
        fit_y.insert(fit_y.end(), train_y.begin(), train_y.end());
        fit_domains.insert(fit_domains.end(), target_rows.size(), Domain::L2);
        fit_ids.insert(fit_ids.end(), train_ids.begin(), train_ids.end());
        system.augment_as = Domain::L2;
      }
      note("learner", fit_ids);
      system.kind = config.model;
      if (config.model == ModelKind::Classify) {
        system.classifier = train_classifier(fit_x, fit_y, config.svm);
      } else {
        system.ranker = train_ranker(fit_x, fit_y, fit_domains, config.same_domain_only || easy, config.svm);
        note("mapper", train_ids);
        system.mapper = fit_mapper(scores_of(system, train_x), train_y, config.mapper, config.mapper_options);
      }
      break;
    }
    case TransferMode::SelfTrain: {
      const Matrix pool_x = rows_of(*source, source_rows, bank);
      const auto pool_ids = ids_of(*source, source_rows);
      std::vector<std::string> fit_ids = train_ids;
      fit_ids.insert(fit_ids.end(), pool_ids.begin(), pool_ids.end());
      note("learner", fit_ids);
      fit.selftrain = self_train(train_x, train_y, pool_x, pool_ids, config.selftrain, config.svm);
      system.kind = ModelKind::Classify;
      system.classifier = fit.selftrain->model;
      break;
    }
  }
  const std::string catalog_id = target.full_catalog().hash();
  system.classifier.catalog_id = catalog_id;
  system.ranker.catalog_id = catalog_id;
  return fit;
}

ExperimentResult run_experiment(const Dataset& target, const Dataset* source, const ExperimentConfig& config) {
  check_inputs(target, source, config);
  const bool transfer = config.transfer != TransferMode::None;

  const FoldPlan plan = make_folds(target.labels, config.folds, config.seed);
  LeakageGuard guard(plan, target.ids);

  std::optional<PosLmBank> global_bank;
  if (target.pos_lm && !config.lm_inside_folds) {
    const auto rows = all_rows(target);
    global_bank = PosLmBank::train(docs_of(target, rows));
  }

  std::vector<std::vector<InstanceResult>> fold_results(plan.k());
  std::vector<std::vector<AuditEntry>> audits(plan.k());

  auto run_fold = [&](std::size_t f) {
    const auto& val = plan.folds[f];
    const auto train = plan.training_indices(f);
    auto fit = fit_system(
        target, train, source, config,
        [&](std::string_view step, std::span<const std::string> ids) { guard.check(f, step, ids); },
        global_bank ? &*global_bank : nullptr);
    if (fit.selftrain) audits[f] = std::move(fit.selftrain->audit);
    const Matrix val_x = rows_of(target, val, fit.pos_lms ? &*fit.pos_lms : nullptr);
    auto& out = fold_results[f];
    for (std::size_t i = 0; i < val.size(); ++i) {
      const auto o = fit.system.predict(val_x.row(i));
      out.push_back({target.ids[val[i]], f, target.labels[val[i]], o.level, o.score, o.confidence});
    }
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.threads), plan.k());
  if (workers <= 1) {
    for (std::size_t f = 0; f < plan.k(); ++f) run_fold(f);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(plan.k());
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t f = next++; f < plan.k(); f = next++) {
          try {
            run_fold(f);
          } catch (...) {
            errors[f] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<InstanceResult> predictions;
  for (auto& r : fold_results) predictions.insert(predictions.end(), r.begin(), r.end());

  std::vector<std::pair<std::string, std::string>> settings = {
      {"model", std::string(model_kind_name(config.model))},
      {"transfer", std::string(transfer_mode_name(config.transfer))},
      {"features", std::to_string(target.full_catalog().size())},
      {"catalog", target.full_catalog().hash()},
      {"instances", std::to_string(target.size())},
      {"folds", std::to_string(plan.k())},
      {"seed", std::to_string(config.seed)},
      {"C", fmt::format("{}", config.svm.c)},
  };
  if (transfer) settings.emplace_back("source_instances", std::to_string(source->size()));
  if (config.model == ModelKind::Rank) {
    settings.emplace_back("mapper", std::string(mapper_variant_name(config.mapper)));
    settings.emplace_back("joint_cutoffs", config.mapper_options.joint_cutoffs ? "true" : "false");
  }
  if (config.transfer == TransferMode::SelfTrain) {
    settings.emplace_back("K", std::to_string(config.selftrain.k));
    settings.emplace_back("iterations", std::to_string(config.selftrain.iterations));
    std::vector<int> levels(config.selftrain.allowed_levels.begin(), config.selftrain.allowed_levels.end());
    settings.emplace_back("allowed_levels", fmt::format("{}", fmt::join(levels, ",")));
  }
  if (target.pos_lm) settings.emplace_back("lm_inside_folds", config.lm_inside_folds ? "true" : "false");

  ExperimentResult result;
  result.report = build_report(std::move(settings), std::move(predictions));
  result.fit_log = guard.records();
  result.audits = std::move(audits);
  return result;
}

FitResult fit_full(const Dataset& target, const Dataset* source, const ExperimentConfig& config) {
  check_inputs(target, source, config);
  const auto rows = all_rows(target);
  return fit_system(target, rows, source, config);
}

}  // namespace readlevel
