#include "readlevel/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

#include <fmt/format.h>

#include "readlevel/error.hpp"
#include "readlevel/text.hpp"

namespace readlevel {

namespace {

template <typename T>
T parse_integer(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, value));
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  const std::string s(value);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, value));
}

bool parse_bool(std::string_view key, std::string_view value) {
  const std::string v = text::to_lower(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(fmt::format("{}: expected true or false, got '{}'", key, value));
}

std::filesystem::path resolve(std::string_view value, const std::filesystem::path& base) {
  std::filesystem::path p{std::string(value)};
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

std::string join_levels(const std::set<int>& levels) {
  std::vector<int> v(levels.begin(), levels.end());
  return fmt::format("{}", fmt::join(v, ","));
}

}  // namespace

void apply_setting(RunConfig& c, std::string_view key_in, std::string_view value_in,
                   const std::filesystem::path& base_dir) {
  const std::string key = text::trim(key_in);
  const std::string value = text::trim(value_in);
  auto& e = c.experiment;
  if (key == "train") {
    c.train_manifest = resolve(value, base_dir);
  } else if (key == "train_dir") {
    c.train_dir = resolve(value, base_dir);
  } else if (key == "transfer") {
    c.transfer_manifest = resolve(value, base_dir);
  } else if (key == "transfer_dir") {
    c.transfer_dir = resolve(value, base_dir);
  } else if (key == "awl") {
    c.awl = resolve(value, base_dir);
  } else if (key == "evp") {
    c.evp = resolve(value, base_dir);
  } else if (key == "relations") {
    c.relations = resolve(value, base_dir);
  } else if (key == "reference") {
    c.reference = resolve(value, base_dir);
  } else if (key == "groups") {
    c.groups = FeatureGroups::parse(value);
  } else if (key == "model") {
    e.model = parse_model_kind(value);
  } else if (key == "mapper") {
    e.mapper = parse_mapper_variant(value);
  } else if (key == "joint_cutoffs") {
    e.mapper_options.joint_cutoffs = parse_bool(key, value);
  } else if (key == "transfer_mode") {
    e.transfer = parse_transfer_mode(value);
  } else if (key == "C") {
    e.svm.c = parse_real(key, value);
    if (!(e.svm.c > 0.0)) throw ConfigError("C must be positive");
    e.mapper_options.svm.c = e.svm.c;
  } else if (key == "K") {
    e.selftrain.k = parse_integer<int>(key, value);
  } else if (key == "iterations") {
    e.selftrain.iterations = parse_integer<int>(key, value);
  } else if (key == "allowed_levels") {
    std::set<int> levels;
    for (const auto& part : text::split(value, ',')) {
      const std::string t = text::trim(part);
      if (!t.empty()) levels.insert(parse_integer<int>(key, t));
    }
    if (levels.empty() || *levels.begin() < kMinLevel || *levels.rbegin() > kMaxLevel) {
      throw ConfigError(fmt::format("allowed_levels must be a nonempty subset of {}..{}", kMinLevel, kMaxLevel));
    }
    e.selftrain.allowed_levels = std::move(levels);
  } else if (key == "seed") {
    e.seed = parse_integer<std::uint64_t>(key, value);
    e.svm.seed = e.seed;
    e.mapper_options.svm.seed = e.seed;
  } else if (key == "folds") {
    e.folds = parse_integer<std::size_t>(key, value);
  } else if (key == "epochs") {
    e.svm.max_epochs = parse_integer<int>(key, value);
    if (e.svm.max_epochs < 1) throw ConfigError("epochs must be at least 1");
    e.mapper_options.svm.max_epochs = e.svm.max_epochs;
  } else if (key == "tolerance") {
    e.svm.tolerance = parse_real(key, value);
    e.mapper_options.svm.tolerance = e.svm.tolerance;
  } else if (key == "max_pairs") {
    e.svm.max_pairs = parse_integer<std::size_t>(key, value);
  } else if (key == "same_domain_only") {
    e.same_domain_only = parse_bool(key, value);
  } else if (key == "lm_inside_folds") {
    e.lm_inside_folds = parse_bool(key, value);
  } else if (key == "threads") {
    e.threads = parse_integer<int>(key, value);
  } else {
    throw ConfigError(fmt::format("unknown configuration key '{}'", key));
  }
}

void read_config(std::istream& in, const std::string& source_name, RunConfig& config,
                 const std::filesystem::path& base_dir) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = text::trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("{}:{}: expected key = value", source_name, line_no));
    try {
      apply_setting(config, body.substr(0, eq), body.substr(eq + 1), base_dir);
    } catch (const ConfigError& err) {
      throw ConfigError(fmt::format("{}:{}: {}", source_name, line_no, err.what()));
    }
  }
}

RunConfig load_config(const std::filesystem::path& file, std::span<const std::string> overrides) {
  RunConfig config;
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", file.string()));
    read_config(in, file.string(), config, file.parent_path());
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("override '{}' is not key=value", o));
    apply_setting(config, o.substr(0, eq), o.substr(eq + 1));
  }
  if (config.train_dir.empty() && !config.train_manifest.empty()) config.train_dir = config.train_manifest.parent_path();
  if (config.transfer_dir.empty() && !config.transfer_manifest.empty()) {
    config.transfer_dir = config.transfer_manifest.parent_path();
  }
  return config;
}

void RunConfig::validate() const {
  if (!groups.any()) throw ConfigError("no feature group selected");
  if (train_manifest.empty()) throw ConfigError("no training corpus given (train = <manifest>)");
  experiment.validate(!transfer_manifest.empty());
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  const auto& e = experiment;
  return {
      {"train", train_manifest.string()},
      {"train_dir", train_dir.string()},
      {"transfer", transfer_manifest.string()},
      {"transfer_dir", transfer_dir.string()},
      {"awl", awl.string()},
      {"evp", evp.string()},
      {"relations", relations.string()},
      {"reference", reference.string()},
      {"groups", groups.to_string()},
      {"model", std::string(model_kind_name(e.model))},
      {"mapper", std::string(mapper_variant_name(e.mapper))},
      {"joint_cutoffs", e.mapper_options.joint_cutoffs ? "true" : "false"},
      {"transfer_mode", std::string(transfer_mode_name(e.transfer))},
      {"C", fmt::format("{}", e.svm.c)},
      {"K", std::to_string(e.selftrain.k)},
      {"iterations", std::to_string(e.selftrain.iterations)},
      {"allowed_levels", join_levels(e.selftrain.allowed_levels)},
      {"seed", std::to_string(e.seed)},
      {"folds", std::to_string(e.folds)},
      {"epochs", std::to_string(e.svm.max_epochs)},
      {"tolerance", fmt::format("{}", e.svm.tolerance)},
      {"max_pairs", std::to_string(e.svm.max_pairs)},
      {"same_domain_only", e.same_domain_only ? "true" : "false"},
      {"lm_inside_folds", e.lm_inside_folds ? "true" : "false"},
      {"threads", std::to_string(e.threads)},
  };
}

std::filesystem::path default_awl_path() {
  std::vector<std::filesystem::path> candidates;
  if (const char* dir = std::getenv("READLEVEL_DATA_DIR")) candidates.emplace_back(std::filesystem::path(dir) / "awl_headwords.txt");
#ifdef READLEVEL_SOURCE_DATA_DIR
  candidates.emplace_back(std::filesystem::path(READLEVEL_SOURCE_DATA_DIR) / "awl_headwords.txt");
#endif
#ifdef READLEVEL_INSTALL_DATA_DIR
  candidates.emplace_back(std::filesystem::path(READLEVEL_INSTALL_DATA_DIR) / "awl_headwords.txt");
#endif
  for (const auto& p : candidates) {
    if (std::filesystem::exists(p)) return p;
  }
  return {};
}

Resources load_resources(const RunConfig& config) {
  Resources r;
  if (config.groups.lexical) {
    const auto awl = config.awl.empty() ? default_awl_path() : config.awl;
    if (awl.empty()) throw ConfigError("lexical features need an AWL list (awl = <file>)");
    if (config.evp.empty()) throw ConfigError("lexical features need a CEFR vocabulary lexicon (evp = <file>)");
    r.awl = load_wordlist(awl);
    r.evp = load_cefr_lexicon(config.evp);
  }
  if (config.groups.discourse && !config.relations.empty()) r.relations = load_relation_table(config.relations);
  if (config.groups.lm && !config.reference.empty()) {
    const Document ref = read_annotation_file(config.reference, "reference", std::nullopt, Domain::Native);
    r.reference_lms = train_reference_lms(std::span<const Document>(&ref, 1));
  }
  return r;
}

}  // namespace readlevel
