#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "readlevel/error.hpp"
#include "readlevel/features_surface.hpp"
#include "readlevel/text.hpp"

using namespace readlevel;

namespace {

// "surface/POS" items, one sentence per inner list; lemma = lowercased surface.
Document tagged(const std::vector<std::vector<std::string>>& sentences) {
  std::vector<Sentence> out;
  for (const auto& s : sentences) {
    Sentence sent;
    for (const auto& item : s) {
      const auto slash = item.rfind('/');
      Token t;
      t.surface = item.substr(0, slash);
      t.pos = item.substr(slash + 1);
      t.lemma = text::to_lower(t.surface);
      sent.push_back(t);
    }
    out.push_back(sent);
  }
  return Document("doc", out);
}

}  // namespace

TEST_CASE("readability formulas") {
  CHECK(flesch_kincaid_grade(10, 2, 14) == doctest::Approx(2.88).epsilon(1e-12));
  CHECK(coleman_liau_index(450, 100, 5) == doctest::Approx(9.18).epsilon(1e-12));
}

TEST_CASE("traditional features on a plaintext document") {
  const auto doc = tokenize_plaintext("The cat sat. It was a very happy cat indeed today.");
  const auto f = traditional_features(doc);
  // 3 + 8 words, syllables 1+1+1 + 1+1+1+2+2+1+2+2
  CHECK(f[0] == 2);
  CHECK(f[1] == doctest::Approx(5.5));
  CHECK(f[2] == 8);
  const double letters = 3 + 3 + 3 + 2 + 3 + 1 + 4 + 5 + 3 + 6 + 5;
  CHECK(f[3] == doctest::Approx(letters / 11));
  CHECK(f[4] == doctest::Approx(15.0 / 11));
  CHECK(f[5] == doctest::Approx(flesch_kincaid_grade(11, 2, 15)));
  CHECK(f[6] == doctest::Approx(coleman_liau_index(letters, 11, 2)));
}

TEST_CASE("one-word sentence") {
  const auto f = traditional_features(tokenize_plaintext("Go"));
  CHECK(f[1] == 1);
  CHECK(f[2] == 1);
}

TEST_CASE("punctuation is not a word") {
  const auto doc = tagged({{"Hello/INTJ", ",/PUNCT", "world/NOUN", "!/PUNCT"}});
  CHECK(traditional_features(doc)[1] == 2);
  CHECK(doc.word_count() == 4);
}

TEST_CASE("type-token ratios") {
  const std::vector<std::string> w = {"a", "b", "a", "c"};
  const auto f = ttr_features(w);
  CHECK(f[0] == doctest::Approx(0.75));
  CHECK(f[1] == doctest::Approx(1.5));
  CHECK(f[2] == doctest::Approx(3 / std::sqrt(8.0)));
  CHECK(f[3] == doctest::Approx(std::log(3.0) / std::log(4.0)));

  const std::vector<std::string> distinct = {"x", "y", "z"};
  CHECK(ttr_features(distinct)[0] == 1.0);
  const std::vector<std::string> one = {"x"};
  CHECK(ttr_features(one)[3] == 1.0);
}

TEST_CASE("ttr over a document folds case") {
  const auto doc = tokenize_plaintext("The cat saw the Cat.");
  CHECK(ttr_features(doc)[0] == doctest::Approx(3.0 / 5.0));
}

TEST_CASE("all-noun document") {
  const auto doc = tagged({{"dogs/NOUN", "cats/NOUN", "birds/NOUN"}});
  const auto f = pos_lexical_features(doc);
  CHECK(f[0] == 1.0);   // noun variation
  CHECK(f[5] == 1.0);   // noun density
  CHECK(f[10] == 1.0);  // content share
  CHECK(f[11] == 0.0);
}

TEST_CASE("mixed ten-token fixture") {
  // the/DET old/ADJ man/NOUN saw/VERB a/DET man/NOUN in/ADP the/DET park/NOUN quickly/ADV
  const auto doc = tagged({{"the/DET", "old/ADJ", "man/NOUN", "saw/VERB", "a/DET", "man/NOUN", "in/ADP", "the/DET",
                            "park/NOUN", "quickly/ADV", "./PUNCT"}});
  const auto f = pos_lexical_features(doc);
  CHECK(f[0] == doctest::Approx(2.0 / 3.0));  // nouns: man, man, park
  CHECK(f[1] == 1.0);                         // adjectives
  CHECK(f[2] == 1.0);                         // verbs
  CHECK(f[3] == 1.0);                         // adverbs
  CHECK(f[4] == 1.0);                         // prepositions
  CHECK(f[5] == doctest::Approx(0.3));
  CHECK(f[6] == doctest::Approx(0.1));
  CHECK(f[7] == doctest::Approx(0.1));
  CHECK(f[8] == doctest::Approx(0.1));
  CHECK(f[9] == doctest::Approx(0.1));
  CHECK(f[10] == doctest::Approx(0.6));
  CHECK(f[11] == doctest::Approx(0.4));
  CHECK(f[10] + f[11] == doctest::Approx(1.0));
  CHECK(f[12] == doctest::Approx(0.7));
}

TEST_CASE("lexical features need POS tags") {
  CHECK_THROWS_AS(pos_lexical_features(tokenize_plaintext("No tags.")), DataError);
}

TEST_CASE("word list proportions") {
  std::istringstream evp_in(
      "the\t*\tA1\ndog\tnoun\tA1\nbark\tverb\tA2\nloud\tadjective\tB1\nanalysis\tnoun\tB2\n"
      "hypothesis\tnoun\tC1\nparadigm\tnoun\tC2\nrun\tverb\tA1\ncat\tnoun\tA1\nbig\tadjective\tA1\n");
  const auto evp = read_cefr_lexicon(evp_in, "evp");
  std::istringstream awl_in("analyse\nhypothesis\nparadigm\n");
  const auto awl = read_wordlist(awl_in, "awl");

  const auto doc = tagged({{"The/DET", "dog/NOUN", "barks/VERB", "./PUNCT"},
                           {"Analysis/NOUN", "tests/VERB", "the/DET", "hypothesis/NOUN"},
                           {"Paradigms/NOUN", "shift/VERB"}});
  // lemmas are lowercased surfaces, so "barks", "tests", "paradigms", "shift" miss
  const auto f = wordlist_features(doc, awl, evp);
  const double n = 9;
  CHECK(f[0] == doctest::Approx(1 / n));  // hypothesis
  CHECK(f[1] == doctest::Approx(3 / n));  // the, dog, the
  CHECK(f[2] == doctest::Approx(0));
  CHECK(f[3] == doctest::Approx(0));
  CHECK(f[4] == doctest::Approx(1 / n));  // analysis
  CHECK(f[5] == doctest::Approx(1 / n));  // hypothesis
  CHECK(f[6] == doctest::Approx(0));
  CHECK(f[7] == doctest::Approx(4 / n));
  CHECK(std::accumulate(f.begin() + 1, f.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("every word in the AWL") {
  std::istringstream awl_in("alpha\nbeta\n");
  const auto awl = read_wordlist(awl_in, "awl");
  std::istringstream evp_in("zzz\tnoun\tA1\n");
  const auto evp = read_cefr_lexicon(evp_in, "evp");
  const auto f = wordlist_features(tokenize_plaintext("Alpha beta alpha."), awl, evp);
  CHECK(f[0] == 1.0);
  CHECK(f[7] == 1.0);
}

TEST_CASE("feature name lists match their widths") {
  CHECK(traditional_feature_names().size() == kTraditionalFeatureCount);
  CHECK(ttr_feature_names().size() == kTtrFeatureCount);
  CHECK(pos_lexical_feature_names().size() == kPosLexicalFeatureCount);
  CHECK(wordlist_feature_names().size() == kWordlistFeatureCount);
}
