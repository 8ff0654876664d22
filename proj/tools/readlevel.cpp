#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "readlevel/adapt.hpp"
#include "readlevel/config.hpp"
#include "readlevel/corpus.hpp"
#include "readlevel/error.hpp"
#include "readlevel/eval.hpp"
#include "readlevel/experiment.hpp"
#include "readlevel/mapping.hpp"
#include "readlevel/model_io.hpp"
#include "readlevel/text.hpp"

namespace rl = readlevel;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;

struct Common {
  std::string config_file;
  std::vector<std::string> sets;
  std::string train;
  std::string transfer;
  std::string groups;
  std::string model;
  std::string mapper;
  std::string transfer_mode;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  std::vector<std::string> overrides() const {
    std::vector<std::string> out = sets;
    auto add = [&](const char* key, const std::string& v) {
      if (!v.empty()) out.push_back(fmt::format("{}={}", key, v));
    };
    add("train", train);
    add("transfer", transfer);
    add("groups", groups);
    add("model", model);
    add("mapper", mapper);
    add("transfer_mode", transfer_mode);
    if (seed) out.push_back(fmt::format("seed={}", *seed));
    if (threads) out.push_back(fmt::format("threads={}", *threads));
    return out;
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_file, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", c.sets, "override a config key (key=value); repeatable");
  cmd->add_option("--train", c.train, "manifest of the primary (cross-validated) corpus");
  cmd->add_option("--transfer", c.transfer, "manifest of the transfer (source) corpus");
  cmd->add_option("--groups", c.groups, "feature groups, comma separated, or 'all'");
  cmd->add_option("--model", c.model, "classify | rank");
  cmd->add_option("--mapper", c.mapper, "linear | poly4 | cutoff | logistic | svm");
  cmd->add_option("--transfer-mode", c.transfer_mode, "none | generalize | easyadapt | selftrain");
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--threads", c.threads, "worker threads for cross-validation");
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw rl::DataError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw rl::DataError(fmt::format("cannot open '{}'", path.string()));
  return in;
}

// Writes to the file, or stdout for "" and "-".
template <typename F>
void emit(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
  } else {
    auto out = open_out(path);
    write(out);
  }
}

struct Corpora {
  std::vector<rl::Document> target_docs;
  std::vector<rl::Document> source_docs;
  rl::Resources resources;
  rl::Dataset target;
  std::optional<rl::Dataset> source;
};

// Corpora and featurized datasets are kept together because datasets point
// into the document vectors.
std::unique_ptr<Corpora> load_corpora(const rl::RunConfig& config, bool with_source) {
  auto c = std::make_unique<Corpora>();
  c->resources = rl::load_resources(config);
  c->target_docs = rl::load_corpus(config.train_dir, config.train_manifest);
  c->target = rl::make_dataset(c->target_docs, config.groups, c->resources);
  if (with_source && !config.transfer_manifest.empty()) {
    c->source_docs = rl::load_corpus(config.transfer_dir, config.transfer_manifest);
    c->source = rl::make_dataset(c->source_docs, config.groups, c->resources);
  }
  return c;
}

rl::RunConfig run_config(const Common& common) {
  auto config = rl::load_config(common.config_file, common.overrides());
  config.validate();
  return config;
}

void write_fit_log(const std::vector<rl::LeakageGuard::Record>& log, std::ostream& out) {
  out << "#format readlevel-fitlog 1\n";
  out << "fold\tstep\tinstances\tfingerprint\n";
  for (const auto& r : log) out << fmt::format("{}\t{}\t{}\t{}\n", r.fold, r.step, r.instances, r.fingerprint);
}

void write_audits(const std::vector<std::vector<rl::AuditEntry>>& audits, const std::string& path) {
  std::vector<rl::AuditEntry> all;
  for (const auto& a : audits) all.insert(all.end(), a.begin(), a.end());
  emit(path, [&](std::ostream& out) { rl::write_audit_log(all, out); });
}

// ---- features

int cmd_features(const Common& common, const std::string& output, bool transfer_corpus) {
  auto config = run_config(common);
  auto c = load_corpora(config, transfer_corpus);
  const rl::Dataset& d = transfer_corpus ? (c->source ? *c->source : throw rl::ConfigError("no transfer corpus"))
                                         : c->target;
  rl::FeatureTable table;
  table.ids = d.ids;
  table.domains = d.domains;
  for (int y : d.labels) table.labels.push_back(y == 0 ? std::nullopt : std::optional<int>(y));
  table.catalog = d.full_catalog();
  table.x = d.x;
  if (d.pos_lm) {
    // The per-level POS models come from the labelled primary corpus.
    const auto bank = rl::PosLmBank::train(c->target.documents);
    table.x = table.x.hconcat(rl::pos_lm_matrix(d.documents, bank));
  }
  emit(output, [&](std::ostream& out) { rl::write_features_tsv(table, out); });
  return kExitOk;
}

// ---- train / predict

rl::SavedModel saved_model(const Corpora& c, const rl::RunConfig& config, rl::FitResult fit) {
  rl::SavedModel m;
  m.system = std::move(fit.system);
  m.groups = config.groups;
  m.catalog = c.target.full_catalog();
  m.reference_lms = c.resources.reference_lms;
  m.pos_lms = std::move(fit.pos_lms);
  return m;
}

int cmd_train(const Common& common, const std::string& model_path) {
  auto config = run_config(common);
  auto c = load_corpora(config, true);
  auto fit = rl::fit_full(c->target, c->source ? &*c->source : nullptr, config.experiment);
  rl::save_model_file(saved_model(*c, config, std::move(fit)), model_path);
  return kExitOk;
}

struct PredictArgs {
  std::string model;
  std::string features;
  std::string manifest;
  std::string dir;
  std::string output;
};

int cmd_predict(const Common& common, const PredictArgs& args) {
  const auto model = rl::load_model_file(args.model);
  std::vector<std::string> ids;
  rl::Matrix x(0, model.catalog.size());
  if (!args.features.empty()) {
    auto in = open_in(args.features);
    auto table = rl::read_features_tsv(in, args.features);
    rl::check_catalog(model, table.catalog);
    ids = table.ids;
    x = std::move(table.x);
  } else if (!args.manifest.empty()) {
    auto config = rl::load_config(common.config_file, common.overrides());
    config.groups = model.groups;
    config.reference.clear();
    const auto resources = rl::model_resources(model, rl::load_resources(config));
    const fs::path manifest = args.manifest;
    const auto docs = rl::load_corpus(args.dir.empty() ? manifest.parent_path() : fs::path(args.dir), manifest);
    for (const auto& doc : docs) {
      ids.push_back(doc.id());
      x.append_row(rl::model_features(model, doc, resources));
    }
  } else {
    throw rl::ConfigError("predict needs --features or --manifest");
  }
  emit(args.output, [&](std::ostream& out) {
    out << "#format readlevel-predictions 1\n";
    out << "id\tlevel\tscore\tconfidence\n";
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto o = model.system.predict(x.row(i));
      out << fmt::format("{}\t{}\t{}\t{}\n", ids[i], o.level, o.score, o.confidence);
    }
  });
  return kExitOk;
}

// ---- crossval / adapt / selftrain

struct EvalArgs {
  std::string report;
  std::string fit_log;
  std::string audit;
  bool quiet = false;
};

int run_cv(const rl::RunConfig& config, const EvalArgs& args) {
  auto c = load_corpora(config, config.experiment.transfer != rl::TransferMode::None);
  const auto result = rl::run_experiment(c->target, c->source ? &*c->source : nullptr, config.experiment);
  if (!args.quiet) rl::write_report_text(result.report, std::cout);
  if (!args.report.empty()) emit(args.report, [&](std::ostream& out) { rl::write_report_tsv(result.report, out); });
  if (!args.fit_log.empty()) emit(args.fit_log, [&](std::ostream& out) { write_fit_log(result.fit_log, out); });
  if (!args.audit.empty()) write_audits(result.audits, args.audit);
  return kExitOk;
}

int cmd_crossval(const Common& common, const EvalArgs& args) { return run_cv(run_config(common), args); }

int cmd_adapt(const Common& common, const EvalArgs& args, const std::string& mode) {
  auto config = rl::load_config(common.config_file, common.overrides());
  config.experiment.transfer = rl::parse_transfer_mode(mode);
  if (config.experiment.transfer != rl::TransferMode::EasyAdapt &&
      config.experiment.transfer != rl::TransferMode::Generalize) {
    throw rl::ConfigError("adapt --mode must be easyadapt or generalize");
  }
  config.validate();
  return run_cv(config, args);
}

int cmd_selftrain(const Common& common, const EvalArgs& args, const std::string& model_path, bool crossval) {
  auto config = rl::load_config(common.config_file, common.overrides());
  config.experiment.transfer = rl::TransferMode::SelfTrain;
  config.validate();
  if (crossval) return run_cv(config, args);
  auto c = load_corpora(config, true);
  auto fit = rl::fit_full(c->target, &*c->source, config.experiment);
  const auto& st = *fit.selftrain;
  if (!args.quiet) {
    std::cout << fmt::format("pseudo-labelled {} of {} pool instances", st.audit.size(), c->source->size());
    if (st.terminated_early) std::cout << fmt::format(", stopped early at iteration {}", st.terminated_at);
    if (st.class_collapse) std::cout << " (class collapse)";
    std::cout << "\n";
  }
  if (!args.audit.empty()) write_audits({st.audit}, args.audit);
  if (!model_path.empty()) rl::save_model_file(saved_model(*c, config, std::move(fit)), model_path);
  return kExitOk;
}

// ---- map

struct ScoreFile {
  std::vector<std::string> ids;
  std::vector<double> scores;
  std::vector<int> labels;  // empty without a label column
};

ScoreFile read_scores(const std::string& path, bool need_labels) {
  auto in = open_in(path);
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> column;
  ScoreFile f;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto where = [&] { return fmt::format("{}:{}", path, line_no); };
    if (line.starts_with("#format")) {
      if (line != "#format readlevel-scores 1" && line != "#format readlevel-predictions 1") {
        throw rl::DataError(fmt::format("{}: unsupported format line '{}'", where(), line));
      }
      continue;
    }
    if (line.starts_with('#')) continue;
    const auto fields = rl::text::split(line, '\t');
    if (column.empty()) {
      for (std::size_t i = 0; i < fields.size(); ++i) column.emplace(fields[i], i);
      if (!column.contains("id") || !column.contains("score")) {
        throw rl::DataError(fmt::format("{}: header needs 'id' and 'score' columns", where()));
      }
      if (need_labels && !column.contains("label")) {
        throw rl::DataError(fmt::format("{}: fitting a mapper needs a 'label' column", where()));
      }
      continue;
    }
    if (fields.size() != column.size()) throw rl::DataError(fmt::format("{}: wrong number of columns", where()));
    f.ids.push_back(fields[column["id"]]);
    try {
      std::size_t used = 0;
      const std::string& s = fields[column["score"]];
      f.scores.push_back(std::stod(s, &used));
      if (used != s.size() || !std::isfinite(f.scores.back())) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw rl::DataError(fmt::format("{}: bad score", where()));
    }
    if (column.contains("label")) f.labels.push_back(rl::parse_level(fields[column["label"]]).value);
  }
  if (column.empty()) throw rl::DataError(fmt::format("{}: no header", path));
  return f;
}

int cmd_map(const Common& common, const std::string& fit_path, const std::string& apply_path,
            const std::string& output) {
  auto config = rl::load_config(common.config_file, common.overrides());
  const auto fit = read_scores(fit_path, true);
  const auto mapper = rl::fit_mapper(fit.scores, fit.labels, config.experiment.mapper, config.experiment.mapper_options);
  const auto target = apply_path.empty() ? fit : read_scores(apply_path, false);
  emit(output, [&](std::ostream& out) {
    out << "#format readlevel-scores 1\n";
    out << "id\tscore\tlevel\n";
    for (std::size_t i = 0; i < target.ids.size(); ++i) {
      out << fmt::format("{}\t{}\t{}\n", target.ids[i], target.scores[i], rl::map_score(mapper, target.scores[i]));
    }
  });
  return kExitOk;
}

// ---- report

int cmd_report(const std::vector<std::string>& files) {
  std::vector<rl::EvaluationReport> reports;
  for (const auto& f : files) {
    auto in = open_in(f);
    reports.push_back(rl::read_report_tsv(in));
  }
  if (reports.size() == 1) {
    rl::write_report_text(reports[0], std::cout);
    return kExitOk;
  }
  for (std::size_t i = 0; i < 2; ++i) {
    std::cout << fmt::format("== {}\n", files[i]);
    rl::write_report_text(reports[i], std::cout);
  }
  const auto acc = rl::compare_systems(reports[0], reports[1], rl::Metric::Accuracy);
  std::cout << fmt::format("ACC paired t-test: t = {:.4f}, df = {}, p = {:.4g}\n", acc.statistic, acc.df,
                           acc.p_value);
  const auto pcc = rl::compare_systems(reports[0], reports[1], rl::Metric::Pearson);
  std::cout << fmt::format("PCC Williams test: t = {:.4f}, df = {}, p = {:.4g}\n", pcc.statistic, pcc.df,
                           pcc.p_value);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Readability assessment: features, ranking and classification models, domain transfer"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "readlevel 0.1.0");

  Common common;

  auto* features = app.add_subcommand("features", "write the feature matrix of a corpus");
  add_common(features, common);
  std::string features_out;
  bool features_transfer = false;
  features->add_option("-o,--output", features_out, "output TSV (default stdout)");
  features->add_flag("--transfer-corpus", features_transfer, "featurize the transfer corpus instead");

  auto* train = app.add_subcommand("train", "fit a model on the whole training corpus");
  add_common(train, common);
  std::string train_model;
  train->add_option("-m,--model-file", train_model, "where to write the model")->required();

  auto* predict = app.add_subcommand("predict", "score documents with a saved model");
  add_common(predict, common);
  PredictArgs pargs;
  predict->add_option("-m,--model-file", pargs.model, "saved model")->required()->check(CLI::ExistingFile);
  auto* pf = predict->add_option("--features", pargs.features, "feature TSV written by 'features'");
  auto* pm = predict->add_option("--manifest", pargs.manifest, "manifest of documents to featurize");
  pf->excludes(pm);
  predict->add_option("--dir", pargs.dir, "annotation directory (default: the manifest's)");
  predict->add_option("-o,--output", pargs.output, "output TSV (default stdout)");

  EvalArgs eargs;
  auto add_eval = [&](CLI::App* cmd) {
    add_common(cmd, common);
    cmd->add_option("--report", eargs.report, "write the report as TSV");
    cmd->add_option("--fit-log", eargs.fit_log, "write the per-fold fitting log");
    cmd->add_flag("-q,--quiet", eargs.quiet, "no report on stdout");
  };
  auto* crossval = app.add_subcommand("crossval", "stratified k-fold cross-validation");
  add_eval(crossval);
  crossval->add_option("--audit", eargs.audit, "write self-training audit logs");

  auto* adapt = app.add_subcommand("adapt", "cross-validate with a transfer corpus");
  add_eval(adapt);
  std::string adapt_mode = "easyadapt";
  adapt->add_option("--mode", adapt_mode, "easyadapt | generalize")->capture_default_str();

  auto* selftrain = app.add_subcommand("selftrain", "self-train on the transfer corpus as the unlabelled pool");
  add_eval(selftrain);
  std::string st_model;
  bool st_cv = false;
  selftrain->add_option("--audit", eargs.audit, "write the pseudo-label audit log");
  selftrain->add_option("-m,--model-file", st_model, "write the final model");
  selftrain->add_flag("--crossval", st_cv, "cross-validate instead of fitting on all data");

  auto* map = app.add_subcommand("map", "fit a score-to-level mapper and apply it");
  add_common(map, common);
  std::string map_fit;
  std::string map_apply;
  std::string map_out;
  map->add_option("--fit", map_fit, "TSV with id, score, label")->required();
  map->add_option("--apply", map_apply, "TSV with id, score (default: the --fit file)");
  map->add_option("-o,--output", map_out, "output TSV (default stdout)");

  auto* report = app.add_subcommand("report", "print a report, or compare two");
  std::vector<std::string> report_files;
  report->add_option("reports", report_files, "report TSV files")->required()->expected(1, 2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*features) return cmd_features(common, features_out, features_transfer);
    if (*train) return cmd_train(common, train_model);
    if (*predict) return cmd_predict(common, pargs);
    if (*crossval) return cmd_crossval(common, eargs);
    if (*adapt) return cmd_adapt(common, eargs, adapt_mode);
    if (*selftrain) return cmd_selftrain(common, eargs, st_model, st_cv);
    if (*map) return cmd_map(common, map_fit, map_apply, map_out);
    if (*report) return cmd_report(report_files);
  } catch (const rl::ConfigError& e) {
    std::cerr << "readlevel: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const rl::Error& e) {
    std::cerr << "readlevel: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "readlevel: " << e.what() << "\n";
    return kExitData;
  }
  return kExitConfig;
}
