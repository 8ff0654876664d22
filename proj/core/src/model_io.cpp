#include "readlevel/model_io.hpp"

#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "readlevel/error.hpp"
#include "readlevel/text.hpp"

namespace readlevel {

using nlohmann::json;

namespace {

constexpr std::string_view kModelFormat = "readlevel-model";

json to_json(const Standardizer& s) { return {{"mean", s.mean}, {"scale", s.scale}}; }

Standardizer standardizer_from(const json& j) {
  Standardizer s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.scale = j.at("scale").get<std::vector<double>>();
  if (s.mean.size() != s.scale.size()) throw DataError("standardizer mean and scale differ in length");
  return s;
}

json to_json(const ClassifierModel& m) {
  return {{"classes", m.classes},
          {"weights", m.weights},
          {"bias", m.bias},
          {"standardizer", to_json(m.standardizer)},
          {"catalog_id", m.catalog_id}};
}

ClassifierModel classifier_from(const json& j) {
  ClassifierModel m;
  m.classes = j.at("classes").get<std::vector<int>>();
  m.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  m.bias = j.at("bias").get<std::vector<double>>();
  m.standardizer = standardizer_from(j.at("standardizer"));
  m.catalog_id = j.at("catalog_id").get<std::string>();
  if (m.weights.size() != m.classes.size() || m.bias.size() != m.classes.size()) {
    throw DataError("classifier has inconsistent class count");
  }
  for (const auto& w : m.weights) {
    if (w.size() != m.standardizer.dimension()) throw DataError("classifier weight dimension mismatch");
  }
  return m;
}

json to_json(const RankerModel& m) {
  return {{"weights", m.weights}, {"standardizer", to_json(m.standardizer)}, {"catalog_id", m.catalog_id}};
}

RankerModel ranker_from(const json& j) {
  RankerModel m;
  m.weights = j.at("weights").get<std::vector<double>>();
  m.standardizer = standardizer_from(j.at("standardizer"));
  m.catalog_id = j.at("catalog_id").get<std::string>();
  if (m.weights.size() != m.standardizer.dimension()) throw DataError("ranker weight dimension mismatch");
  return m;
}

json to_json(const LevelMapper& m) {
  json j = {{"variant", mapper_variant_name(m.variant)}};
  switch (m.variant) {
    case MapperVariant::LinearReg:
    case MapperVariant::PolyReg4:
      j["coefficients"] = m.coefficients;
      break;
    case MapperVariant::CutoffBoundaries:
      j["thresholds"] = m.thresholds;
      j["lowest_level"] = m.lowest_level;
      break;
    case MapperVariant::Logistic1D:
      j["logistic"] = {{"classes", m.logistic.classes},       {"weights", m.logistic.weights},
                       {"bias", m.logistic.bias},             {"mean", m.logistic.mean},
                       {"scale", m.logistic.scale},           {"converged", m.logistic.converged},
                       {"iterations", m.logistic.iterations}};
      break;
    case MapperVariant::LinearSVM1D:
      j["svm"] = json::array();
      for (const auto& pair : m.svm) j["svm"].push_back(to_json(pair));
      break;
  }
  return j;
}

LevelMapper mapper_from(const json& j) {
  LevelMapper m;
  m.variant = parse_mapper_variant(j.at("variant").get<std::string>());
  switch (m.variant) {
    case MapperVariant::LinearReg:
    case MapperVariant::PolyReg4:
      m.coefficients = j.at("coefficients").get<std::vector<double>>();
      break;
    case MapperVariant::CutoffBoundaries:
      m.thresholds = j.at("thresholds").get<std::vector<double>>();
      m.lowest_level = j.at("lowest_level").get<int>();
      break;
    case MapperVariant::Logistic1D: {
      const json& l = j.at("logistic");
      m.logistic.classes = l.at("classes").get<std::vector<int>>();
      m.logistic.weights = l.at("weights").get<std::vector<double>>();
      m.logistic.bias = l.at("bias").get<std::vector<double>>();
      m.logistic.mean = l.at("mean").get<double>();
      m.logistic.scale = l.at("scale").get<double>();
      m.logistic.converged = l.at("converged").get<bool>();
      m.logistic.iterations = l.at("iterations").get<int>();
      break;
    }
    case MapperVariant::LinearSVM1D:
      for (const auto& pair : j.at("svm")) m.svm.push_back(classifier_from(pair));
      if (m.svm.empty()) throw DataError("svm mapper has no models");
      break;
  }
  return m;
}

json to_json(const NgramModel& lm) {
  json counts = json::array();
  for (const auto& c : lm.ngram_counts()) {
    json row = c.ids;
    row.push_back(c.count);
    counts.push_back(std::move(row));
  }
  return {{"order", lm.order()},
          {"source", lm_source_name(lm.source())},
          {"vocabulary", lm.symbols()},
          {"counts", std::move(counts)}};
}

NgramModel lm_from(const json& j) {
  std::vector<NgramModel::NgramCount> counts;
  for (const auto& row : j.at("counts")) {
    if (!row.is_array() || row.size() < 2) throw DataError("malformed n-gram count row");
    NgramModel::NgramCount c;
    for (std::size_t i = 0; i + 1 < row.size(); ++i) c.ids.push_back(row[i].get<std::uint32_t>());
    c.count = row.back().get<std::uint64_t>();
    counts.push_back(std::move(c));
  }
  return NgramModel::from_counts(j.at("order").get<int>(), parse_lm_source(j.at("source").get<std::string>()),
                                 j.at("vocabulary").get<std::vector<std::string>>(), counts);
}

std::string format_value(double v) { return fmt::format("{}", v); }

}  // namespace

void save_model(const SavedModel& model, std::ostream& out) {
  const System& s = model.system;
  json j;
  j["format"] = kModelFormat;
  j["version"] = kModelFormatVersion;
  j["kind"] = model_kind_name(s.kind);
  j["groups"] = model.groups.to_string();
  j["catalog"] = {{"hash", model.catalog.hash()}, {"names", model.catalog.names()}};
  j["augment_as"] = s.augment_as ? json(domain_name(*s.augment_as)) : json(nullptr);
  if (s.kind == ModelKind::Classify) {
    j["classifier"] = to_json(s.classifier);
  } else {
    j["ranker"] = to_json(s.ranker);
  }
  j["mapper"] = s.mapper ? to_json(*s.mapper) : json(nullptr);
  json lms = {{"reference", json::array()}, {"pos", json::array()}};
  for (const auto& lm : model.reference_lms) lms["reference"].push_back(to_json(lm));
  if (model.pos_lms) {
    for (const auto& lm : model.pos_lms->models) lms["pos"].push_back(to_json(lm));
  }
  j["language_models"] = std::move(lms);
  out << j.dump(1) << '\n';
}

SavedModel load_model(std::istream& in, const std::string& source_name) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(fmt::format("{}: not a readable model file ({})", source_name, e.what()));
  }
  try {
    if (!j.is_object() || j.value("format", "") != kModelFormat) {
      throw DataError(fmt::format("{}: not a readlevel model", source_name));
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw DataError(fmt::format("{}: unsupported model format version {}", source_name, version));
    }
    SavedModel m;
    m.system.kind = parse_model_kind(j.at("kind").get<std::string>());
    m.groups = FeatureGroups::parse(j.at("groups").get<std::string>());
    m.catalog = FeatureCatalog(j.at("catalog").at("names").get<std::vector<std::string>>());
    if (m.catalog.hash() != j.at("catalog").at("hash").get<std::string>()) {
      throw DataError(fmt::format("{}: catalog hash does not match its names", source_name));
    }
    if (!j.at("augment_as").is_null()) m.system.augment_as = parse_domain(j.at("augment_as").get<std::string>());
    if (m.system.kind == ModelKind::Classify) {
      m.system.classifier = classifier_from(j.at("classifier"));
    } else {
      m.system.ranker = ranker_from(j.at("ranker"));
    }
    if (!j.at("mapper").is_null()) m.system.mapper = mapper_from(j.at("mapper"));
    const json& lms = j.at("language_models");
    for (const auto& lm : lms.at("reference")) m.reference_lms.push_back(lm_from(lm));
    if (!lms.at("pos").empty()) {
      PosLmBank bank;
      for (const auto& lm : lms.at("pos")) bank.models.push_back(lm_from(lm));
      if (bank.models.size() != static_cast<std::size_t>(kNumLevels * kMaxLmOrder)) {
        throw DataError(fmt::format("{}: expected {} POS language models", source_name, kNumLevels * kMaxLmOrder));
      }
      m.pos_lms = std::move(bank);
    }
    return m;
  } catch (const json::exception& e) {
    throw DataError(fmt::format("{}: malformed model ({})", source_name, e.what()));
  } catch (const ConfigError& e) {
    throw DataError(fmt::format("{}: {}", source_name, e.what()));
  }
}

void save_model_file(const SavedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write model file '{}'", path.string()));
  save_model(model, out);
}

SavedModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open model file '{}'", path.string()));
  return load_model(in, path.string());
}

void check_catalog(const SavedModel& model, const FeatureCatalog& catalog) {
  if (model.catalog.hash() != catalog.hash()) {
    throw DataError(fmt::format("feature catalog {} ({} features) does not match the model's {} ({} features)",
                                catalog.hash(), catalog.size(), model.catalog.hash(), model.catalog.size()));
  }
}

Resources model_resources(const SavedModel& model, Resources lexicons) {
  lexicons.reference_lms = model.reference_lms;
  return lexicons;
}

std::vector<double> model_features(const SavedModel& model, const Document& doc, const Resources& resources) {
  auto x = document_features(doc, model.groups, resources);
  if (model.groups.lm) {
    if (!model.pos_lms) throw DataError("model has the LM group but no POS language models");
    const auto lm = pos_lm_features(doc, *model.pos_lms);
    x.insert(x.end(), lm.begin(), lm.end());
  }
  if (x.size() != model.catalog.size()) {
    throw DataError(fmt::format("document '{}' yields {} features, model expects {}", doc.id(), x.size(),
                                model.catalog.size()));
  }
  return x;
}

void write_features_tsv(const FeatureTable& table, std::ostream& out) {
  out << "#format readlevel-features " << kFeaturesFormatVersion << '\n';
  out << "id\tlabel\tdomain";
  for (const auto& n : table.catalog.names()) out << '\t' << n;
  out << '\n';
  for (std::size_t r = 0; r < table.ids.size(); ++r) {
    out << table.ids[r] << '\t' << (table.labels[r] ? std::to_string(*table.labels[r]) : std::string("-")) << '\t'
        << domain_name(table.domains[r]);
    for (double v : table.x.row(r)) out << '\t' << format_value(v);
    out << '\n';
  }
}

FeatureTable read_features_tsv(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(fmt::format("{}: empty feature file", source_name));
  const std::string expected = fmt::format("#format readlevel-features {}", kFeaturesFormatVersion);
  if (text::trim(line) != expected) {
    throw DataError(fmt::format("{}: unsupported feature file format line '{}'", source_name, text::trim(line)));
  }
  if (!std::getline(in, line)) throw DataError(fmt::format("{}: missing header", source_name));
  auto header = text::split(text::trim(line), '\t');
  if (header.size() < 3 || header[0] != "id" || header[1] != "label" || header[2] != "domain") {
    throw DataError(fmt::format("{}: header must start with id, label, domain", source_name));
  }
  FeatureTable t;
  t.catalog = FeatureCatalog(std::vector<std::string>(header.begin() + 3, header.end()));
  t.x = Matrix(0, t.catalog.size());
  std::size_t line_no = 2;
  std::vector<double> row(t.catalog.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = text::split(line, '\t');
    if (f.size() != header.size()) {
      throw DataError(fmt::format("{}:{}: expected {} columns, got {}", source_name, line_no, header.size(), f.size()));
    }
    t.ids.push_back(f[0]);
    t.labels.push_back(f[1] == "-" || f[1].empty() ? std::nullopt : std::optional<int>(parse_level(f[1]).value));
    t.domains.push_back(parse_domain(f[2]));
    for (std::size_t c = 0; c < row.size(); ++c) {
      try {
        std::size_t used = 0;
        row[c] = std::stod(f[c + 3], &used);
        if (used != f[c + 3].size()) throw std::invalid_argument(f[c + 3]);
      } catch (const std::logic_error&) {
        throw DataError(fmt::format("{}:{}: malformed value '{}'", source_name, line_no, f[c + 3]));
      }
    }
    check_finite(row, t.catalog, f[0]);
    t.x.append_row(row);
  }
  return t;
}

}  // namespace readlevel
