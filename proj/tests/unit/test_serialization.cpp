#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "readlevel/config.hpp"
#include "readlevel/error.hpp"
#include "readlevel/model_io.hpp"
#include "synthetic.hpp"

using namespace readlevel;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("readlevel_serial_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

SavedModel saved(const Dataset& d, const ExperimentConfig& cfg) {
  auto fit = fit_full(d, nullptr, cfg);
  SavedModel m;
  m.system = fit.system;
  m.groups = FeatureGroups{};
  m.catalog = d.full_catalog();
  m.pos_lms = fit.pos_lms;
  return m;
}

SavedModel round_trip(const SavedModel& m) {
  std::stringstream buf;
  save_model(m, buf);
  return load_model(buf);
}

std::string text_of(const SavedModel& m) {
  std::ostringstream out;
  save_model(m, out);
  return out.str();
}

}  // namespace

TEST_CASE("config file and overrides") {
  const auto dir = scratch("config");
  std::ofstream(dir / "run.cfg") << "# experiment\n"
                                    "train = corpus/manifest.tsv\n"
                                    "model = rank\n"
                                    "mapper = cutoff\n"
                                    "seed = 5\n"
                                    "C = 0.5\n"
                                    "allowed_levels = 1,3,5\n"
                                    "groups = traditional, lm\n";
  const std::vector<std::string> overrides = {"seed=9", "threads=2"};
  const auto c = load_config(dir / "run.cfg", overrides);
  CHECK(c.train_manifest == dir / "corpus/manifest.tsv");
  CHECK(c.train_dir == dir / "corpus");
  CHECK(c.experiment.model == ModelKind::Rank);
  CHECK(c.experiment.mapper == MapperVariant::CutoffBoundaries);
  CHECK(c.experiment.seed == 9);
  CHECK(c.experiment.threads == 2);
  CHECK(c.experiment.svm.c == 0.5);
  CHECK(c.experiment.selftrain.allowed_levels == std::set<int>{1, 3, 5});
  CHECK(c.groups == FeatureGroups::parse("traditional,lm"));
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("defaults") {
  const auto c = load_config({}, {});
  CHECK(c.experiment.folds == 5);
  CHECK(c.experiment.svm.c == 1.0);
  CHECK(c.experiment.svm.max_epochs == 1000);
  CHECK(c.experiment.selftrain.k == 10);
  CHECK(c.experiment.selftrain.iterations == 9);
  CHECK(c.groups == FeatureGroups{});
  CHECK_THROWS_AS(c.validate(), ConfigError);  // no training corpus
}

TEST_CASE("settings round trip through their entries") {
  RunConfig c;
  apply_setting(c, "model", "rank");
  apply_setting(c, "mapper", "poly4");
  apply_setting(c, "tolerance", "1e-8");
  apply_setting(c, "same_domain_only", "true");
  apply_setting(c, "groups", "lexical,discourse");
  RunConfig back;
  for (const auto& [k, v] : c.entries()) apply_setting(back, k, v);
  CHECK(back.entries() == c.entries());
}

TEST_CASE("config errors") {
  RunConfig c;
  CHECK_THROWS_AS(apply_setting(c, "colour", "red"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "seed", "many"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "C", "-1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "epochs", "0"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "lm_inside_folds", "maybe"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "groups", ""), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "allowed_levels", "0,7"), ConfigError);
  std::istringstream bad("seed 4\n");
  CHECK_THROWS_AS(read_config(bad, "bad.cfg", c, {}), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/run.cfg", {}), ConfigError);
  const std::vector<std::string> o = {"seed"};
  CHECK_THROWS_AS(load_config({}, o), ConfigError);

  RunConfig sel;
  apply_setting(sel, "train", "m.tsv");
  apply_setting(sel, "model", "rank");
  apply_setting(sel, "transfer_mode", "selftrain");
  apply_setting(sel, "transfer", "u.tsv");
  CHECK_THROWS_AS(sel.validate(), ConfigError);
}

TEST_CASE("models reload with identical predictions") {
  const auto d = testing::synthetic_domain(testing::SyntheticSpec{.per_level = 20}, Domain::Native);
  std::vector<ExperimentConfig> configs(1);
  for (auto v : {MapperVariant::LinearReg, MapperVariant::PolyReg4, MapperVariant::CutoffBoundaries,
                 MapperVariant::Logistic1D, MapperVariant::LinearSVM1D}) {
    ExperimentConfig c;
    c.model = ModelKind::Rank;
    c.mapper = v;
    configs.push_back(c);
  }
  for (const auto& cfg : configs) {
    CAPTURE(model_kind_name(cfg.model));
    CAPTURE(mapper_variant_name(cfg.mapper));
    const auto m = saved(d, cfg);
    const auto back = round_trip(m);
    CHECK(text_of(back) == text_of(m));
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto a = m.system.predict(d.x.row(i));
      const auto b = back.system.predict(d.x.row(i));
      CHECK(a.level == b.level);
      CHECK(a.score == b.score);
      CHECK(a.confidence == b.confidence);
    }
  }
}

TEST_CASE("models with language models") {
  Resources res;
  res.awl = load_wordlist(std::string(READLEVEL_DATA_DIR_FOR_TESTS) + "/awl_headwords.txt");
  res.evp = load_cefr_lexicon(std::string(READLEVEL_TEST_DATA) + "/evp.tsv");
  std::vector<Document> docs;
  for (int i = 0; i < 15; ++i) docs.push_back(testing::make_document(fmt::format("d{}", i), 1 + i % 5, Domain::Native, 60 + i));
  std::vector<Document> ref(docs.begin(), docs.begin() + 5);
  res.reference_lms = train_reference_lms(ref);
  const auto d = make_dataset(docs, FeatureGroups{}, res);
  auto m = saved(d, ExperimentConfig{});
  m.reference_lms = res.reference_lms;
  REQUIRE(m.pos_lms);
  CHECK(m.catalog.size() == 138);

  const auto dir = scratch("model");
  save_model_file(m, dir / "m.json");
  const auto back = load_model_file(dir / "m.json");
  CHECK(text_of(back) == text_of(m));
  const auto res_back = model_resources(back, res);
  for (const auto& doc : docs) {
    const auto a = model_features(m, doc, res);
    const auto b = model_features(back, doc, res_back);
    CHECK(a == b);
    CHECK(m.system.predict(a).level == back.system.predict(b).level);
  }
}

TEST_CASE("catalog mismatch and bad files") {
  const auto d = testing::synthetic_domain(testing::SyntheticSpec{.per_level = 10}, Domain::Native);
  const auto m = saved(d, ExperimentConfig{});
  CHECK_NOTHROW(check_catalog(m, d.catalog));
  auto names = d.catalog.names();
  std::swap(names[0], names[1]);
  CHECK_THROWS_AS(check_catalog(m, FeatureCatalog(names)), DataError);

  auto text = text_of(m);
  const auto pos = text.find("\"version\": 1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 12, "\"version\": 2");
  std::istringstream v2(text);
  CHECK_THROWS_AS(load_model(v2), DataError);

  std::istringstream junk("{ not json");
  CHECK_THROWS_AS(load_model(junk), DataError);
  std::istringstream other("{\"format\": \"something-else\", \"version\": 1}");
  CHECK_THROWS_AS(load_model(other), DataError);
  CHECK_THROWS_AS(load_model_file("/nonexistent/model.json"), DataError);
}

TEST_CASE("feature tables") {
  FeatureTable t;
  t.catalog = FeatureCatalog(std::vector<std::string>{"a", "b"});
  t.x = Matrix(0, 2);
  t.ids = {"x", "y"};
  t.labels = {3, std::nullopt};
  t.domains = {Domain::Native, Domain::L2};
  t.x.append_row(std::vector<double>{0.1, 1e-300});
  t.x.append_row(std::vector<double>{-2.5, 1.0 / 3.0});
  std::stringstream buf;
  write_features_tsv(t, buf);
  CHECK(buf.str().rfind("#format readlevel-features 1\n", 0) == 0);
  const auto back = read_features_tsv(buf);
  CHECK(back.ids == t.ids);
  CHECK(back.labels == t.labels);
  CHECK(back.domains == t.domains);
  CHECK(back.x == t.x);
  CHECK(back.catalog == t.catalog);

  std::istringstream wrong("#format readlevel-features 1\nid\tlabel\tdomain\ta\nx\tB1\tnative\t1\t2\n");
  CHECK_THROWS_AS(read_features_tsv(wrong), DataError);
  std::istringstream nan("#format readlevel-features 1\nid\tlabel\tdomain\ta\nx\tB1\tnative\tnan\n");
  CHECK_THROWS_AS(read_features_tsv(nan), DataError);
}
