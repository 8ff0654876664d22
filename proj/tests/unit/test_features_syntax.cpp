#include <doctest.h>

#include <algorithm>

#include "readlevel/error.hpp"
#include "readlevel/features_syntax.hpp"
#include "readlevel/text.hpp"

using namespace readlevel;

namespace {

struct Row {
  std::string surface;
  std::string pos;
  int head;
  std::string deprel;
};

Sentence sentence(const std::vector<Row>& rows) {
  Sentence s;
  for (const auto& r : rows) s.push_back(Token{r.surface, text::to_lower(r.surface), r.pos, r.head, r.deprel, "O"});
  return s;
}

Document doc_of(std::vector<Sentence> sentences) { return Document("d", std::move(sentences)); }

// Head k -> k+1, the last token is the root.
Sentence chain(int k) {
  std::vector<Row> rows;
  for (int i = 1; i <= k; ++i) rows.push_back({"w", "NOUN", i == k ? 0 : i + 1, i == k ? "root" : "dep"});
  return sentence(rows);
}

// Same tokens with positions mirrored.
Sentence reversed(const Sentence& s) {
  const int n = static_cast<int>(s.size());
  Sentence out(s.rbegin(), s.rend());
  for (auto& t : out) {
    if (t.head != 0) t.head = n + 1 - t.head;
  }
  return out;
}

}  // namespace

TEST_CASE("single-token sentence") {
  const auto doc = doc_of({sentence({{"Go", "VERB", 0, "root"}})});
  const auto t = tree_features(doc);
  CHECK(t[0] == 1);
  CHECK(t[1] == 0);
  CHECK(t[2] == 1);
  CHECK(t[3] == 0);
  CHECK(t[4] == 0);
  CHECK(t[5] == 0);
  CHECK(t[6] == 1);
  CHECK(t[7] == 0);
  for (double v : gr_complexity(doc)) CHECK(v == 0);
}

TEST_CASE("five-token tree by hand") {
  // The big dog chased cats ; chased <- dog <- {The, big}, chased <- cats
  const auto doc = doc_of({sentence({{"The", "DET", 3, "det"},
                                     {"big", "ADJ", 3, "amod"},
                                     {"dog", "NOUN", 4, "nsubj"},
                                     {"chased", "VERB", 0, "root"},
                                     {"cats", "NOUN", 4, "obj"}})});
  const auto t = tree_features(doc);
  CHECK(t[0] == 3);
  CHECK(t[1] == 2);
  CHECK(t[2] == 1);
  CHECK(t[3] == 0);  // "big" governs nothing
  CHECK(t[5] == 0);
  CHECK(t[6] == 1);
  CHECK(t[7] == doctest::Approx(0.8));

  const auto g = gr_complexity(doc);
  CHECK(g[0] == 2);
  CHECK(g[1] == doctest::Approx(5.0 / 4.0));
  CHECK(g[2] == 4);
  CHECK(g[3] == 4);
  CHECK(g[4] == 2);
  CHECK(g[5] == 0);
}

TEST_CASE("phrases, clauses and subtyped relations") {
  // She said that he left very quickly in March
  const auto doc = doc_of({sentence({{"She", "PRON", 2, "nsubj"},
                                     {"said", "VERB", 0, "root"},
                                     {"that", "SCONJ", 5, "mark"},
                                     {"he", "PRON", 5, "nsubj"},
                                     {"left", "VERB", 2, "ccomp"},
                                     {"very", "ADV", 7, "advmod"},
                                     {"quickly", "ADV", 5, "advmod"},
                                     {"in", "ADP", 9, "case"},
                                     {"March", "PROPN", 5, "obl:tmod"}})});
  const auto t = tree_features(doc);
  CHECK(t[0] == 4);  // said > left > quickly > very
  CHECK(t[1] == 3);
  CHECK(t[2] == 2);
  CHECK(t[4] == 1);
  CHECK(t[5] == 1);
  CHECK(t[6] == 2);
  CHECK(std::find(clausal_relations().begin(), clausal_relations().end(), "ccomp") != clausal_relations().end());
}

TEST_CASE("chain trees have depth equal to their length") {
  for (int k = 1; k <= 12; ++k) {
    const auto doc = doc_of({chain(k)});
    CHECK(tree_features(doc)[0] == k);
    CHECK(gr_complexity(doc)[2] == k - 1);
  }
}

TEST_CASE("adjacent pair") {
  const auto doc = doc_of({sentence({{"a", "NOUN", 2, "dep"}, {"b", "VERB", 0, "root"}})});
  const auto g = gr_complexity(doc);
  CHECK(g[0] == 1);
  CHECK(g[1] == 1);
  CHECK(g[2] == 1);
}

TEST_CASE("distance statistics") {
  // A dependency tree needs d relations to hold one of distance d, so the
  // longest distances 1, 3, 5 come from three sentences.
  const auto s1 = sentence({{"a", "NOUN", 2, "dep"}, {"b", "VERB", 0, "root"}});
  const auto s3 = sentence({{"a", "VERB", 0, "root"}, {"b", "NOUN", 3, "dep"}, {"c", "NOUN", 4, "dep"},
                            {"d", "NOUN", 1, "dep"}});
  const auto s5 = sentence({{"a", "VERB", 0, "root"}, {"b", "NOUN", 1, "dep"}, {"c", "NOUN", 1, "dep"},
                            {"d", "NOUN", 1, "dep"}, {"e", "NOUN", 1, "dep"}, {"f", "NOUN", 1, "dep"}});
  const auto g = gr_complexity(doc_of({s1, s3, s5}));
  CHECK(g[0] == 5);
  CHECK(g[4] == doctest::Approx(3.0));
  // per-sentence means 1, 5/3, 15/5
  CHECK(g[1] == doctest::Approx((1.0 + 5.0 / 3.0 + 3.0) / 3.0));
  CHECK(g[2] == doctest::Approx(3.0));
  CHECK(g[3] == 5);
  CHECK(g[5] == doctest::Approx((0.0 + 0.0 + 1.0 / 5.0) / 3.0));

  const auto one = gr_complexity(doc_of({s5}));
  CHECK(one[0] == 5);
  CHECK(one[1] == doctest::Approx(3.0));
  CHECK(one[5] == doctest::Approx(0.2));
}

TEST_CASE("distance statistics ignore token order direction") {
  const std::vector<Sentence> sents = {
      sentence({{"The", "DET", 3, "det"}, {"big", "ADJ", 3, "amod"}, {"dog", "NOUN", 4, "nsubj"},
                {"chased", "VERB", 0, "root"}, {"cats", "NOUN", 4, "obj"}}),
      chain(7)};
  std::vector<Sentence> back;
  for (const auto& s : sents) back.push_back(reversed(s));
  const auto a = gr_complexity(doc_of(sents));
  const auto b = gr_complexity(doc_of(back));
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(b[k]));
  CHECK(tree_features(doc_of(sents))[0] == tree_features(doc_of(back))[0]);
}

TEST_CASE("syntax features need a dependency layer") {
  const auto doc = tokenize_plaintext("No parse here.");
  CHECK_THROWS_AS(tree_features(doc), DataError);
  CHECK_THROWS_AS(gr_complexity(doc), DataError);
}

TEST_CASE("dependency tree validation") {
  CHECK_THROWS_AS(DepTree(sentence({{"a", "NOUN", 1, "dep"}})), DataError);
  CHECK(tree_feature_names().size() == kTreeFeatureCount);
  CHECK(gr_feature_names().size() == kGrFeatureCount);
}
