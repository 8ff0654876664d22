#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "readlevel/eval.hpp"
#include "readlevel/featurizer.hpp"
#include "readlevel/learn.hpp"
#include "readlevel/ngram_lm.hpp"
#include "synthetic.hpp"

using namespace readlevel;

namespace {

std::vector<Document> corpus(std::size_t per_level) {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < per_level; ++i) {
    for (int level = 1; level <= 5; ++level) {
      docs.push_back(testing::make_document("b", level, Domain::Native, 100 * i + static_cast<std::uint64_t>(level)));
    }
  }
  return docs;
}

Resources resources() {
  Resources r;
  r.awl = load_wordlist(READLEVEL_BENCH_AWL);
  r.evp = load_cefr_lexicon(std::string(READLEVEL_BENCH_DATA) + "/evp.tsv");
  r.relations = load_relation_table(std::string(READLEVEL_BENCH_DATA) + "/relations.tsv");
  return r;
}

void BM_DocumentFeatures(benchmark::State& state) {
  const auto docs = corpus(4);
  auto res = resources();
  res.reference_lms = train_reference_lms(docs);
  const FeatureGroups groups;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(document_features(docs[i++ % docs.size()], groups, res));
  }
}
BENCHMARK(BM_DocumentFeatures);

void BM_PosLmScore(benchmark::State& state) {
  const auto docs = corpus(8);
  std::vector<const Document*> ptrs;
  for (const auto& d : docs) ptrs.push_back(&d);
  const auto bank = PosLmBank::train(ptrs);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pos_lm_features(docs[i++ % docs.size()], bank));
  }
}
BENCHMARK(BM_PosLmScore);

void BM_TrainRanker(benchmark::State& state) {
  testing::SyntheticSpec spec;
  spec.per_level = static_cast<std::size_t>(state.range(0));
  const auto d = testing::synthetic_domain(spec, Domain::L2);
  SvmParams p;
  p.max_epochs = 50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_ranker(d.x, d.labels, d.domains, false, p));
  }
}
BENCHMARK(BM_TrainRanker)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_PairwiseAccuracy(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<int> gold(n);
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    gold[i] = 1 + static_cast<int>(rng() % 5);
    scores[i] = std::normal_distribution<double>(gold[i], 1.0)(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(pairwise_accuracy(gold, scores));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PairwiseAccuracy)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

}  // namespace

BENCHMARK_MAIN();
