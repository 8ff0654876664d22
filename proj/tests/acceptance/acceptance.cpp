// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "readlevel/adapt.hpp"
#include "readlevel/error.hpp"
#include "readlevel/eval.hpp"
#include "readlevel/experiment.hpp"
#include "readlevel/featurizer.hpp"
#include "readlevel/learn.hpp"
#include "readlevel/ngram_lm.hpp"
#include "synthetic.hpp"

using namespace readlevel;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, std::string what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "" : "FAILED ") + std::move(what));
  }
};

using Table = std::array<std::array<std::size_t, 5>, 5>;

double table_accuracy(const Table& t) {
  std::vector<int> gold, pred;
  for (int g = 0; g < 5; ++g) {
    for (int p = 0; p < 5; ++p) {
      for (std::size_t n = 0; n < t[g][p]; ++n) {
        gold.push_back(g + 1);
        pred.push_back(p + 1);
      }
    }
  }
  const auto m = confusion(gold, pred);
  if (m != t) return -1;
  return accuracy(gold, pred);
}

Outcome metric_oracle() {
  Outcome o;
  const Table t5 = {{{4, 0, 55, 4, 1}, {0, 0, 24, 6, 30}, {0, 1, 1, 4, 65}, {0, 0, 0, 3, 64}, {0, 0, 0, 0, 69}}};
  const Table t8 = {{{11, 3, 0, 0, 0}, {2, 9, 0, 1, 0}, {0, 0, 13, 0, 2}, {0, 0, 2, 9, 2}, {0, 0, 0, 4, 10}}};
  const double a5 = table_accuracy(t5);
  const double a8 = table_accuracy(t8);
  o.require(a5 == 77.0 / 331.0 && std::abs(a5 - 0.233) < 0.0005, fmt::format("native->L2 table ACC {:.4f}", a5));
  o.require(a8 == 52.0 / 68.0, fmt::format("L2 table ACC {:.4f}", a8));
  return o;
}

Outcome easyadapt_identities() {
  Outcome o;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0, 1);
  double worst = 0;
  bool dims = true, blocks = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t f = 1 + rng() % 40;
    std::vector<double> x(f), y(f);
    for (std::size_t j = 0; j < f; ++j) {
      x[j] = g(rng);
      y[j] = g(rng);
    }
    const auto xn = easyadapt_augment(x, Domain::Native), xl = easyadapt_augment(x, Domain::L2);
    const auto yn = easyadapt_augment(y, Domain::Native), yl = easyadapt_augment(y, Domain::L2);
    dims = dims && xn.size() == 3 * f && xl.size() == 3 * f;
    for (std::size_t j = 0; j < f; ++j) {
      blocks = blocks && xn[j] == x[j] && xn[f + j] == x[j] && xn[2 * f + j] == 0;
      blocks = blocks && xl[j] == x[j] && xl[f + j] == 0 && xl[2 * f + j] == x[j];
    }
    const double k = dot(x, y);
    worst = std::max({worst, std::abs(dot(xn, yn) - 2 * k), std::abs(dot(xl, yl) - 2 * k),
                      std::abs(dot(xn, yl) - k), std::abs(dot(xl, yn) - k)});
  }
  o.require(dims, "augmented dimension 3F");
  o.require(blocks, "block layout");
  o.require(worst <= 1e-9, fmt::format("kernel identities, max error {:.2e}", worst));
  return o;
}

Outcome pairwise_oracle() {
  Outcome o;
  std::mt19937_64 rng(3);
  std::size_t mismatches = 0, tested = 0;
  while (tested < 200) {
    const std::size_t n = 2 + rng() % 49;
    std::vector<int> gold(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      gold[i] = 1 + static_cast<int>(rng() % 5);
      s[i] = rng() % 3 == 0 ? static_cast<double>(rng() % 4) : std::normal_distribution<double>(0, 1)(rng);
    }
    double agree = 0, pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (gold[i] <= gold[j]) continue;
        pairs += 1;
        agree += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
    }
    if (pairs == 0) continue;
    ++tested;
    if (pairwise_accuracy(gold, s) != agree / pairs) ++mismatches;
  }
  o.require(mismatches == 0, fmt::format("{} instances, {} mismatches", tested, mismatches));
  return o;
}

Outcome learner_correctness() {
  Outcome o;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0, 1);
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 2 + rng() % 4, n = 3 + rng() % 20;
    std::vector<double> z(n), params(2 * k);
    std::vector<int> t(n);
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = g(rng);
      t[i] = static_cast<int>(rng() % k);
    }
    for (double& p : params) p = g(rng);
    const auto grad = logistic_gradient(params, z, t, k, 1e-3);
    for (std::size_t j = 0; j < params.size(); ++j) {
      const double h = 1e-5;
      auto up = params, down = params;
      up[j] += h;
      down[j] -= h;
      const double fd = (logistic_objective(up, z, t, k, 1e-3) - logistic_objective(down, z, t, k, 1e-3)) / (2 * h);
      worst = std::max(worst, std::abs(fd - grad[j]));
    }
  }
  o.require(worst <= 1e-5, fmt::format("logistic gradient vs finite differences, max error {:.2e}", worst));

  std::size_t increases = 0, epochs = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 30 + rng() % 50, f = 2 + rng() % 8;
    Matrix x(0, f);
    std::vector<int> y;
    std::vector<Domain> dom;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> row(f);
      for (double& v : row) v = g(rng);
      x.append_row(row);
      y.push_back(1 + static_cast<int>(rng() % 5));
      dom.push_back(rng() % 2 ? Domain::Native : Domain::L2);
    }
    SvmParams p;
    p.seed = static_cast<std::uint64_t>(trial);
    TrainingTrace a, b;
    train_classifier(x, y, p, &a);
    train_ranker(x, y, dom, false, p, &b);
    for (const auto* tr : {&a, &b}) {
      for (std::size_t e = 1; e < tr->objective.size(); ++e) increases += tr->objective[e] > tr->objective[e - 1] ? 1 : 0;
      epochs += tr->objective.size();
    }
  }
  o.require(increases == 0, fmt::format("hinge objective over {} epochs, {} increases", epochs, increases));

  Matrix x(0, 2);
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    const int c = 1 + i % 2;
    x.append_row(std::vector<double>{(c == 1 ? -2.0 : 2.0) + 0.3 * g(rng), g(rng)});
    y.push_back(c);
  }
  const auto m = train_classifier(x, y, SvmParams{});
  std::size_t hit = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) hit += predict(m, x.row(i)).level == y[i] ? 1 : 0;
  o.require(hit == x.rows(), fmt::format("separable training accuracy {:.3f}", static_cast<double>(hit) / 40.0));
  return o;
}

Outcome synthetic_reproduction() {
  Outcome o;
  const auto corpus = testing::synthetic_corpus();  // 250 native + 250 L2
  const Dataset& target = corpus.l2;
  const Dataset& source = corpus.native;

  ExperimentConfig classify;
  ExperimentConfig rank;
  rank.model = ModelKind::Rank;
  rank.mapper = MapperVariant::LinearSVM1D;

  const auto in_cls = run_experiment(target, nullptr, classify).report.mean;
  const auto in_rank = run_experiment(target, nullptr, rank).report.mean;
  classify.transfer = rank.transfer = TransferMode::Generalize;
  const auto gen_cls = run_experiment(target, &source, classify).report.mean;
  const auto gen_rank = run_experiment(target, &source, rank).report.mean;
  rank.transfer = TransferMode::EasyAdapt;
  const auto ea_rank = run_experiment(target, &source, rank).report.mean;

  const double drop = in_cls.accuracy - gen_cls.accuracy;
  const double pw_gap = std::abs(in_rank.pairwise_accuracy - gen_rank.pairwise_accuracy);
  o.require(drop >= 0.3, fmt::format("(a) classification ACC in-domain {:.3f}, cross-domain {:.3f}, drop {:.3f}",
                                     in_cls.accuracy, gen_cls.accuracy, drop));
  o.require(pw_gap <= 0.05, fmt::format("(a) ranking pairwise ACC in-domain {:.3f}, cross-domain {:.3f}",
                                        in_rank.pairwise_accuracy, gen_rank.pairwise_accuracy));
  o.require(gen_rank.accuracy - gen_cls.accuracy >= 0.2,
            fmt::format("(b) cross-domain ranking + svm mapping ACC {:.3f} vs classification {:.3f}",
                        gen_rank.accuracy, gen_cls.accuracy));
  o.require(ea_rank.pairwise_accuracy >= gen_rank.pairwise_accuracy,
            fmt::format("(c) EasyAdapt pairwise ACC {:.3f} vs generalize {:.3f}", ea_rank.pairwise_accuracy,
                        gen_rank.pairwise_accuracy));

  const auto f = testing::selftrain_fixture();
  auto acc = [&](const ClassifierModel& m) {
    std::vector<int> pred;
    for (std::size_t i = 0; i < f.test.size(); ++i) pred.push_back(predict(m, f.test.x.row(i)).level);
    return accuracy(f.test.labels, pred);
  };
  const double base = acc(train_classifier(f.labeled.x, f.labeled.labels, SvmParams{}));
  SelfTrainConfig restricted;
  restricted.allowed_levels = {1, 3, 5};
  const auto st = self_train(f.labeled.x, f.labeled.labels, f.pool.x, f.pool.ids, restricted, SvmParams{});
  const double grown = acc(st.model);
  o.require(grown >= base, fmt::format("(d) restricted self-training ACC {:.3f} vs labelled-only {:.3f} ({} added)",
                                       grown, base, st.audit.size()));
  return o;
}

Resources lexicons() {
  Resources r;
  r.awl = load_wordlist(std::string(READLEVEL_DATA_DIR_FOR_TESTS) + "/awl_headwords.txt");
  r.evp = load_cefr_lexicon(std::string(READLEVEL_TEST_DATA) + "/evp.tsv");
  r.relations = load_relation_table(std::string(READLEVEL_TEST_DATA) + "/relations.tsv");
  return r;
}

std::vector<Document> documents(const std::string& prefix, Domain domain, std::size_t per_level, std::uint64_t seed) {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < per_level; ++i) {
    for (int level = 1; level <= 5; ++level) {
      docs.push_back(testing::make_document(fmt::format("{}-{}-{}", prefix, level, i), level, domain,
                                            seed + 10 * i + static_cast<std::uint64_t>(level)));
    }
  }
  return docs;
}

Outcome feature_counts() {
  Outcome o;
  const FeatureGroups all;
  FeatureGroups no_discourse;
  no_discourse.discourse = false;
  const std::size_t with_ref = feature_catalog(all, true).size();
  const std::size_t without_ref = feature_catalog(all, false).size();
  o.require(with_ref == 138 && without_ref == 128,
            fmt::format("all groups: {} columns with a reference corpus, {} without", with_ref, without_ref));
  o.require(with_ref - feature_catalog(no_discourse, true).size() == 32, "discourse toggle removes 9 + 7 + 16 columns");

  auto res = lexicons();
  const auto docs = documents("d", Domain::Native, 10, 1);
  res.reference_lms = train_reference_lms(docs);
  const auto catalog = document_catalog(all, true);
  const std::size_t a1 = *catalog.index_of("lex_evp_a1"), oov = *catalog.index_of("lex_evp_oov");
  double worst = 0;
  for (const auto& d : docs) {
    const auto v = document_features(d, all, res);
    double sum = 0;
    for (std::size_t j = a1; j <= oov; ++j) sum += v[j];
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  o.require(worst <= 1e-9, fmt::format("EVP block sums to 1 on {} documents, max error {:.2e}", docs.size(), worst));
  return o;
}

Outcome lm_sanity() {
  Outcome o;
  std::mt19937_64 rng(7);
  const std::vector<std::string> vocab = {"a", "b", "c", "d"};
  auto sentence = [&](std::size_t max_len) {
    std::vector<std::string> s(1 + rng() % max_len);
    for (auto& w : s) w = vocab[rng() % vocab.size()];
    return s;
  };

  // Seen n-grams: count(h w) / (count(h) + distinct continuations of h),
  // counted directly over padded sentences.
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int order = 1 + trial % 5;
    std::vector<std::vector<std::string>> corpus;
    for (int i = 0; i < 3; ++i) corpus.push_back(sentence(5));
    std::map<std::vector<std::string>, double> counts;
    for (const auto& s : corpus) {
      std::vector<std::string> padded(static_cast<std::size_t>(order - 1), "<s>");
      padded.insert(padded.end(), s.begin(), s.end());
      padded.push_back("</s>");
      for (std::size_t i = static_cast<std::size_t>(order - 1); i < padded.size(); ++i) {
        counts[std::vector<std::string>(padded.begin() + static_cast<long>(i) - (order - 1),
                                        padded.begin() + static_cast<long>(i) + 1)] += 1;
      }
    }
    std::map<std::vector<std::string>, std::pair<double, double>> history;  // total, types
    for (const auto& [g, c] : counts) {
      auto& h = history[std::vector<std::string>(g.begin(), g.end() - 1)];
      h.first += c;
      h.second += 1;
    }
    const auto m = train_lm_sentences(corpus, order, LmSource::Surface);
    for (const auto& [g, c] : counts) {
      const std::vector<std::string> h(g.begin(), g.end() - 1);
      const auto& [total, types] = history[h];
      worst = std::max(worst, std::abs(m.prob(h, g.back()) - c / (total + types)));
    }
  }
  o.require(worst <= 1e-6, fmt::format("count oracle on short corpora, max error {:.2e}", worst));

  std::vector<std::vector<std::string>> train;
  for (int i = 0; i < 200; ++i) train.push_back(sentence(8));
  const auto m3 = train_lm_sentences(train, 3, LmSource::Surface);
  std::size_t below_one = 0;
  for (int d = 0; d < 1000; ++d) {
    std::vector<std::vector<std::string>> doc;
    for (std::size_t s = 0, n = 1 + rng() % 4; s < n; ++s) {
      auto sent = sentence(10);
      if (rng() % 5 == 0) sent.push_back("zzz");
      doc.push_back(sent);
    }
    below_one += score(m3, doc).perplexity < 1.0 ? 1 : 0;
  }
  o.require(below_one == 0, fmt::format("perplexity >= 1 on 1000 documents ({} below)", below_one));

  double norm = 0;
  const auto n = static_cast<std::uint32_t>(m3.symbols().size());
  for (int c = 0; c < 100; ++c) {
    const std::vector<std::uint32_t> h = {static_cast<std::uint32_t>(rng() % n), static_cast<std::uint32_t>(rng() % n)};
    double sum = 0;
    for (std::uint32_t w = 1; w < n; ++w) sum += m3.prob(h, w);
    norm = std::max(norm, std::abs(sum - 1.0));
  }
  o.require(norm <= 1e-9, fmt::format("100 conditional distributions sum to 1, max error {:.2e}", norm));
  return o;
}

std::string report_bytes(const EvaluationReport& r) {
  std::ostringstream out;
  write_report_tsv(r, out);
  return out.str();
}

Outcome determinism_and_leakage() {
  Outcome o;
  const auto corpus = testing::synthetic_corpus();
  ExperimentConfig cfg;
  cfg.model = ModelKind::Rank;
  cfg.mapper = MapperVariant::CutoffBoundaries;
  cfg.seed = 5;
  const auto a = run_experiment(corpus.l2, nullptr, cfg);
  const auto b = run_experiment(corpus.l2, nullptr, cfg);
  cfg.threads = 4;
  const auto c = run_experiment(corpus.l2, nullptr, cfg);
  o.require(report_bytes(a.report) == report_bytes(b.report) && report_bytes(a.report) == report_bytes(c.report),
            "repeated cross-validation reports are byte-identical");

  // Full grid on annotated documents, so POS LMs are fitted per fold too.
  const auto res = lexicons();
  const auto target_docs = documents("t", Domain::L2, 8, 1000);
  const auto source_docs = documents("s", Domain::Native, 8, 5000);
  const auto target = make_dataset(target_docs, FeatureGroups{}, res);
  const auto source = make_dataset(source_docs, FeatureGroups{}, res);
  std::size_t runs = 0, steps = 0, leaks = 0;
  for (auto model : {ModelKind::Classify, ModelKind::Rank}) {
    for (auto transfer : {TransferMode::None, TransferMode::Generalize, TransferMode::EasyAdapt, TransferMode::SelfTrain}) {
      if (model == ModelKind::Rank && transfer == TransferMode::SelfTrain) continue;
      for (auto mapper : {MapperVariant::LinearReg, MapperVariant::PolyReg4, MapperVariant::CutoffBoundaries,
                          MapperVariant::Logistic1D, MapperVariant::LinearSVM1D}) {
        if (model == ModelKind::Classify && mapper != MapperVariant::LinearReg) continue;
        ExperimentConfig g;
        g.model = model;
        g.transfer = transfer;
        g.mapper = mapper;
        g.selftrain.k = 4;
        g.selftrain.iterations = 3;
        g.svm.max_epochs = 100;
        const Dataset* src = transfer == TransferMode::None ? nullptr : &source;
        try {
          const auto r = run_experiment(target, src, g);
          steps += r.fit_log.size();
        } catch (const LeakageError&) {
          ++leaks;
        }
        ++runs;
      }
    }
  }
  o.require(leaks == 0, fmt::format("leakage guard over {} grid runs, {} fitting steps, {} leaks", runs, steps, leaks));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    std::string name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "metric oracle", metric_oracle},
      {2, "EasyAdapt identities", easyadapt_identities},
      {3, "pairwise accuracy vs brute force", pairwise_oracle},
      {4, "learner correctness", learner_correctness},
      {5, "synthetic reproduction", synthetic_reproduction},
      {6, "feature-count audit", feature_counts},
      {7, "LM sanity", lm_sanity},
      {8, "determinism and leakage", determinism_and_leakage},
  };
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && o.pass;
    std::cout << fmt::format("{} {} {} ({:.2f} s)\n", o.pass ? "PASS" : "FAIL", c.number, c.name, secs);
    for (const auto& n : o.notes) std::cout << "     " << n << "\n";
    std::cout.flush();
  }
  return all ? 0 : 1;
}
