#include <doctest.h>

#include <sstream>

#include "readlevel/adapt.hpp"
#include "readlevel/error.hpp"
#include "synthetic.hpp"

using namespace readlevel;

namespace {

double accuracy(const ClassifierModel& m, const Dataset& d) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < d.size(); ++i) hit += predict(m, d.x.row(i)).level == d.labels[i] ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(d.size());
}

SelfTrainResult run(const testing::SelfTrainFixture& f, const SelfTrainConfig& cfg) {
  return self_train(f.labeled.x, f.labeled.labels, f.pool.x, f.pool.ids, cfg, SvmParams{});
}

}  // namespace

TEST_CASE("augmentation layout") {
  const std::vector<double> x = {1, 2};
  CHECK(easyadapt_augment(x, Domain::Native) == std::vector<double>{1, 2, 1, 2, 0, 0});
  CHECK(easyadapt_augment(x, Domain::L2) == std::vector<double>{1, 2, 0, 0, 1, 2});
  const std::vector<double> zero(4, 0.0);
  CHECK(easyadapt_augment(zero, Domain::L2) == std::vector<double>(12, 0.0));

  Matrix m(0, 2);
  m.append_row(x);
  m.append_row(std::vector<double>{3, 4});
  const std::vector<Domain> dom = {Domain::Native, Domain::L2};
  const auto a = easyadapt_augment(m, dom);
  CHECK(a.cols() == 6);
  CHECK(std::vector<double>(a.row(1).begin(), a.row(1).end()) == std::vector<double>{3, 4, 0, 0, 3, 4});
}

TEST_CASE("augmented catalog") {
  const FeatureCatalog base(std::vector<std::string>{"a", "b"});
  const auto c = easyadapt_catalog(base);
  CHECK(c.names() == std::vector<std::string>{"a@general", "b@general", "a@source", "b@source", "a@target", "b@target"});
  const FeatureVector v{{1, 2}, base.hash()};
  const auto av = easyadapt_augment(v, Domain::Native, c);
  CHECK(av.catalog_id == c.hash());
  CHECK(av.values.size() == 6);
}

TEST_CASE("augmented kernel") {
  const std::vector<double> x = {1, -2, 0.5}, y = {3, 1, 2};
  auto k = [](const std::vector<double>& a, const std::vector<double>& b) { return dot(a, b); };
  const double base = k(x, y);
  CHECK(k(easyadapt_augment(x, Domain::Native), easyadapt_augment(y, Domain::Native)) == doctest::Approx(2 * base));
  CHECK(k(easyadapt_augment(x, Domain::L2), easyadapt_augment(y, Domain::L2)) == doctest::Approx(2 * base));
  CHECK(k(easyadapt_augment(x, Domain::Native), easyadapt_augment(y, Domain::L2)) == doctest::Approx(base));
}

TEST_CASE("ten per iteration for nine iterations") {
  const auto f = testing::selftrain_fixture(11);
  const auto r = run(f, SelfTrainConfig{});
  CHECK_FALSE(r.terminated_early);
  CHECK(r.audit.size() == 90);
  CHECK(r.added_per_iteration == std::vector<std::size_t>(9, 10));
  for (std::size_t i = 0; i < r.audit.size(); ++i) CHECK(r.audit[i].iteration == static_cast<int>(i / 10) + 1);
}

TEST_CASE("pseudo-labels stay inside the allowed levels") {
  const auto f = testing::selftrain_fixture(11);
  SelfTrainConfig cfg;
  cfg.allowed_levels = {1, 2, 3};
  const auto r = run(f, cfg);
  for (const auto& e : r.audit) CHECK(e.pseudo_label <= 3);
}

TEST_CASE("short pool stops early") {
  const auto f = testing::selftrain_fixture(11);
  SelfTrainConfig cfg;
  cfg.k = 100;
  cfg.iterations = 9;
  const auto r = run(f, cfg);
  // 300 pool rows: three full rounds, the fourth finds none left
  CHECK(r.terminated_early);
  CHECK(r.terminated_at == 4);
  CHECK(r.audit.size() == 300);
}

TEST_CASE("self-training on a consistent pool does not hurt") {
  for (std::uint64_t seed = 11; seed <= 14; ++seed) {
    CAPTURE(seed);
    const auto f = testing::selftrain_fixture(seed);
    const double baseline = accuracy(train_classifier(f.labeled.x, f.labeled.labels, SvmParams{}), f.test);
    SelfTrainConfig restricted;
    restricted.allowed_levels = {1, 3, 5};
    CHECK(accuracy(run(f, restricted).model, f.test) >= baseline);
    CHECK(accuracy(run(f, SelfTrainConfig{}).model, f.test) >= baseline);
  }
}

TEST_CASE("audit log round trip and replay") {
  const auto f = testing::selftrain_fixture(12);
  const auto r = run(f, SelfTrainConfig{});
  std::stringstream buf;
  write_audit_log(r.audit, buf);
  const auto back = read_audit_log(buf);
  REQUIRE(back.size() == r.audit.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].id == r.audit[i].id);
    CHECK(back[i].pseudo_label == r.audit[i].pseudo_label);
    CHECK(back[i].confidence == r.audit[i].confidence);
  }

  Matrix px;
  std::vector<int> py;
  replay_audit(back, f.labeled.x, f.labeled.labels, f.pool.x, f.pool.ids, px, py);
  CHECK(px.rows() == f.labeled.size() + 90);
  CHECK(train_classifier(px, py, SvmParams{}) == r.model);
}

TEST_CASE("self-training is deterministic") {
  const auto f = testing::selftrain_fixture(13);
  const auto a = run(f, SelfTrainConfig{});
  const auto b = run(f, SelfTrainConfig{});
  CHECK(a.audit == b.audit);
  CHECK(a.model == b.model);
}

TEST_CASE("self-training settings are validated") {
  SelfTrainConfig cfg;
  cfg.k = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.allowed_levels = {};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.allowed_levels = {0, 3};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("malformed audit log") {
  std::istringstream in("#format readlevel-audit 1\nid\titeration\tpseudo_label\tconfidence\nx\tone\t3\t0.5\n");
  CHECK_THROWS_AS(read_audit_log(in), DataError);
}
