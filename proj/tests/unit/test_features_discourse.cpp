#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "readlevel/error.hpp"
#include "readlevel/features_discourse.hpp"

using namespace readlevel;

namespace {

struct Row {
  std::string surface;
  std::string lemma;
  std::string pos;
  std::string ne = "O";
  int head = kNoHead;
  std::string deprel;
};

Sentence sentence(const std::vector<Row>& rows) {
  Sentence s;
  for (const auto& r : rows) s.push_back(Token{r.surface, r.lemma, r.pos, r.head, r.deprel, r.ne});
  return s;
}

Document doc_of(std::vector<Sentence> sentences) { return Document("d", std::move(sentences)); }

// Three sentences, ten mentions.
std::vector<Sentence> ten_mentions() {
  return {
      sentence({{"Anna", "Anna", "PROPN", "B-PER"},
                {"Smith", "Smith", "PROPN", "I-PER"},
                {"met", "meet", "VERB"},
                {"the", "the", "DET"},
                {"teacher", "teacher", "NOUN"},
                {"in", "in", "ADP"},
                {"Paris", "Paris", "PROPN", "B-LOC"},
                {".", ".", "PUNCT"}}),
      sentence({{"The", "the", "DET"},
                {"teacher", "teacher", "NOUN"},
                {"gave", "give", "VERB"},
                {"Anna", "Anna", "PROPN", "B-PER"},
                {"a", "a", "DET"},
                {"book", "book", "NOUN"},
                {"and", "and", "CCONJ"},
                {"a", "a", "DET"},
                {"pen", "pen", "NOUN"},
                {"in", "in", "ADP"},
                {"the", "the", "DET"},
                {"garden", "garden", "NOUN"},
                {".", ".", "PUNCT"}}),
      sentence({{"Paris", "Paris", "PROPN", "B-LOC"},
                {"has", "have", "VERB"},
                {"many", "many", "ADJ"},
                {"books", "book", "NOUN"},
                {".", ".", "PUNCT"}}),
  };
}

// One-sentence document of nouns only.
Document nouns(const std::vector<std::string>& words) {
  std::vector<Row> rows;
  for (const auto& w : words) rows.push_back({w, w, "NOUN"});
  return doc_of({sentence(rows)});
}

RelationTable table_of(const std::string& tsv) {
  std::istringstream in(tsv);
  return read_relation_table(in, "t");
}

// A document of filler tokens with the given length.
Document filler(std::size_t n) {
  std::vector<Row> rows;
  for (std::size_t i = 0; i < n; ++i) rows.push_back({"w", "w", "X"});
  return doc_of({sentence(rows)});
}

}  // namespace

TEST_CASE("entities are named entities plus the remaining nouns") {
  const auto doc = doc_of({sentence({{"Tom", "Tom", "PROPN", "B-PER"},
                                     {"and", "and", "CCONJ"},
                                     {"Rome", "Rome", "PROPN", "B-LOC"},
                                     {"IBM", "IBM", "X", "B-ORG"},
                                     {"cat", "cat", "NOUN"},
                                     {"dog", "dog", "NOUN"}})});
  CHECK(entity_density(doc)[0] == 5);
}

TEST_CASE("a noun inside a named entity is removed") {
  const auto doc = doc_of({sentence({{"Bank", "bank", "NOUN", "B-ORG"}, {"of", "of", "ADP", "I-ORG"},
                                     {"Spain", "Spain", "PROPN", "I-ORG"}, {"grew", "grow", "VERB"}})});
  const auto a = extract_entities(doc);
  CHECK(a.named_entities == 1);
  CHECK(a.entities.size() == 1);
  CHECK(a.entities[0].key == "bank of spain");
  // Spain is a PROPN inside the span too.
  CHECK(entity_density(doc)[7] == 1.0);

  const auto one = doc_of({sentence({{"Paris", "Paris", "PROPN", "B-LOC"}, {"wins", "win", "VERB"}})});
  CHECK(entity_density(one)[7] == doctest::Approx(1.0 / 1.0));
}

TEST_CASE("ten-mention fixture by hand") {
  const auto f = entity_density(doc_of(ten_mentions()));
  // mentions: {anna smith, teacher, paris} {teacher, anna, book, pen, garden} {paris, book}
  CHECK(f[0] == 10);
  CHECK(f[1] == 7);
  CHECK(f[2] == doctest::Approx(10.0 / 3.0));
  CHECK(f[3] == doctest::Approx(10.0 / 3.0));
  // words per sentence 7, 12, 4; named entities 2, 1, 1
  CHECK(f[4] == doctest::Approx((2.0 / 7.0 + 1.0 / 12.0 + 1.0 / 4.0) / 3.0));
  CHECK(f[5] == doctest::Approx(4.0 / 23.0));
  CHECK(f[6] == doctest::Approx(4.0 / 10.0));
  // nouns 4 + 5 + 2, inside spans 3 + 1 + 1
  CHECK(f[7] == doctest::Approx(5.0 / 11.0));
  // unique NEs: anna smith, paris, anna
  CHECK(f[8] == doctest::Approx(3.0 / 7.0));
}

TEST_CASE("document-level density ignores sentence order") {
  auto sents = ten_mentions();
  const auto a = entity_density(doc_of(sents));
  std::reverse(sents.begin(), sents.end());
  const auto b = entity_density(doc_of(sents));
  for (std::size_t k : {0, 1, 5, 6, 7, 8}) CHECK(a[k] == doctest::Approx(b[k]));
}

TEST_CASE("density needs POS tags") {
  CHECK_THROWS_AS(entity_density(tokenize_plaintext("Plain text.")), DataError);
}

TEST_CASE("chains follow the greedy rule") {
  const auto table = table_of("dog\tsynonym\tcanine\n");
  const auto chains = build_chains(nouns({"dog", "canine", "cat"}), table);
  REQUIRE(chains.size() == 1);
  CHECK(chains[0].lemmas == std::vector<std::string>{"dog", "canine"});
  CHECK(chains[0].members == std::vector<std::size_t>{0, 1});

  CHECK(build_chains(nouns({"dog", "cat", "house"}), table).empty());
}

TEST_CASE("eight-noun hand simulation") {
  const auto table = table_of("dog\tsynonym\tcanine\ncanine\thypernym\tanimal\ncat\tsynonym\tfeline\n");
  const auto chains = build_chains(nouns({"dog", "cat", "canine", "house", "feline", "animal", "dog", "tree"}), table);
  // dog opens a chain; canine joins it; animal joins after canine; the second
  // dog is not related to animal so it opens a candidate that stays single.
  REQUIRE(chains.size() == 2);
  CHECK(chains[0].members == std::vector<std::size_t>{0, 2, 5});
  CHECK(chains[1].members == std::vector<std::size_t>{1, 4});
  for (const auto& c : chains) {
    for (std::size_t i = 1; i < c.lemmas.size(); ++i) CHECK(related(c.lemmas[i - 1], c.lemmas[i], table));
  }
}

TEST_CASE("chain features") {
  const auto doc = filler(20);
  CHECK(chain_features(doc, {}) == std::array<double, kChainFeatureCount>{});

  const std::vector<LexicalChain> short_chain = {{{2, 9}, {"a", "a"}}};
  const auto f = chain_features(doc, short_chain);
  CHECK(f[0] == 1);
  CHECK(f[1] == doctest::Approx(1.0 / 20.0));
  CHECK(f[2] == 2);
  CHECK(f[3] == 2);
  CHECK(f[4] == 7);
  CHECK(f[5] == 7);
  CHECK(f[6] == 0);

  const std::vector<LexicalChain> both = {{{2, 9}, {"a", "a"}}, {{0, 4, 15}, {"b", "b", "b"}}};
  const auto g = chain_features(doc, both);
  CHECK(g[2] == doctest::Approx(2.5));
  CHECK(g[3] == 3);
  CHECK(g[4] == doctest::Approx(11.0));
  CHECK(g[5] == 15);
  CHECK(g[6] == 1);
}

TEST_CASE("roles from relations") {
  CHECK(role_from_deprel("nsubj") == Role::Subject);
  CHECK(role_from_deprel("nsubj:pass") == Role::Subject);
  CHECK(role_from_deprel("csubj") == Role::Subject);
  CHECK(role_from_deprel("obj") == Role::Object);
  CHECK(role_from_deprel("iobj") == Role::Object);
  CHECK(role_from_deprel("obl") == Role::Other);
  CHECK(role_symbol(Role::Absent) == "-");
}

TEST_CASE("subject then object") {
  const auto doc = doc_of({sentence({{"dog", "dog", "NOUN", "O", 2, "nsubj"}, {"runs", "run", "VERB", "O", 0, "root"}}),
                           sentence({{"Tom", "Tom", "PROPN", "B-PER", 2, "nsubj"},
                                     {"feeds", "feed", "VERB", "O", 0, "root"},
                                     {"dog", "dog", "NOUN", "O", 2, "obj"}})});
  const auto grid = build_entity_grid(doc);
  REQUIRE(grid.entities.size() == 2);
  CHECK(grid.cells[0] == std::vector<Role>{Role::Subject, Role::Object});
  // With a single entity row the SO transition is the only one; here the
  // second row (tom) adds a "-S".
  const auto f = entity_grid_features(doc);
  CHECK(f[1] == doctest::Approx(0.5));
  CHECK(f[12] == doctest::Approx(0.5));

  EntityGrid only;
  only.entities = {"dog"};
  only.cells = {{Role::Subject, Role::Object}};
  const auto g = entity_grid_features(only);
  CHECK(g[1] == 1.0);
  CHECK(std::accumulate(g.begin(), g.end(), 0.0) == 1.0);
}

TEST_CASE("strongest role wins within a sentence") {
  const auto doc = doc_of({sentence({{"dog", "dog", "NOUN", "O", 2, "obj"},
                                     {"bites", "bite", "VERB", "O", 0, "root"},
                                     {"dog", "dog", "NOUN", "O", 2, "nsubj"}})});
  CHECK(build_entity_grid(doc).cells[0][0] == Role::Subject);
}

TEST_CASE("single sentence has no transitions") {
  const auto doc = doc_of({sentence({{"dog", "dog", "NOUN", "O", 2, "nsubj"}, {"runs", "run", "VERB", "O", 0, "root"}})});
  for (double v : entity_grid_features(doc)) CHECK(v == 0);
}

TEST_CASE("two entities over three sentences, every role assignment") {
  const std::array<Role, 4> roles = {Role::Subject, Role::Object, Role::Other, Role::Absent};
  const std::array<std::string, 3> deprels = {"nsubj", "obj", "obl"};
  for (int code = 0; code < 4096; ++code) {
    std::array<std::array<Role, 3>, 2> cell{};
    int c = code;
    for (auto& row : cell) {
      for (auto& r : row) {
        r = roles[static_cast<std::size_t>(c % 4)];
        c /= 4;
      }
    }
    std::vector<Sentence> sents;
    for (std::size_t s = 0; s < 3; ++s) {
      std::vector<Row> rows = {{"is", "be", "VERB", "O", 0, "root"}};
      const std::array<std::string, 2> names = {"dog", "cat"};
      for (std::size_t e = 0; e < 2; ++e) {
        if (cell[e][s] == Role::Absent) continue;
        rows.push_back({names[e], names[e], "NOUN", "O", 1, deprels[static_cast<std::size_t>(cell[e][s])]});
      }
      sents.push_back(sentence(rows));
    }
    const auto f = entity_grid_features(doc_of(sents));

    std::array<double, 16> expected{};
    double total = 0;
    for (const auto& row : cell) {
      if (std::all_of(row.begin(), row.end(), [](Role r) { return r == Role::Absent; })) continue;
      for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = 0; b < 4; ++b) {
          for (std::size_t s = 0; s < 2; ++s) {
            if (row[s] == roles[a] && row[s + 1] == roles[b]) expected[a * 4 + b] += 1;
          }
        }
      }
      total += 2;
    }
    for (auto& e : expected) e = total > 0 ? e / total : 0.0;
    for (std::size_t k = 0; k < 16; ++k) REQUIRE(f[k] == doctest::Approx(expected[k]));
    const double sum = std::accumulate(f.begin(), f.end(), 0.0);
    REQUIRE((total == 0 ? sum == 0 : sum == doctest::Approx(1.0)));
  }
}

TEST_CASE("name lists match widths") {
  CHECK(entity_density_feature_names().size() == kEntityDensityFeatureCount);
  CHECK(chain_feature_names().size() == kChainFeatureCount);
  CHECK(entity_grid_feature_names().size() == kEntityGridFeatureCount);
}
