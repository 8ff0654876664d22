#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "readlevel/corpus.hpp"
#include "readlevel/lexicons.hpp"

namespace readlevel {

/// Grammatical role of an entity in a sentence. Order matters: S > O > X.
enum class Role { Subject, Object, Other, Absent };

std::string_view role_symbol(Role r);
/// Subject relations (nsubj, csubj and their subtypes) give S, object
/// relations (obj, dobj, iobj) give O, anything else X.
Role role_from_deprel(std::string_view deprel);

struct EntityMention {
  enum class Kind { NamedEntity, GeneralNoun };

  std::size_t sentence = 0;
  std::size_t begin = 0;  // token span within the sentence, [begin, end)
  std::size_t end = 0;
  Kind kind = Kind::GeneralNoun;
  std::string key;  // lowercased NE text or head lemma
  Role role = Role::Other;
};

/// Mentions of one document: NE spans from BIO tags plus NOUN/PROPN tokens
/// that do not fall inside an NE span.
struct EntityAnalysis {
  std::vector<EntityMention> entities;
  std::size_t named_entities = 0;
  std::size_t general_nouns = 0;   // before overlap removal
  std::size_t overlapping_nouns = 0;
  std::vector<std::size_t> words_per_sentence;
};

EntityAnalysis extract_entities(const Document& doc);

inline constexpr std::size_t kEntityDensityFeatureCount = 9;
inline constexpr std::size_t kChainFeatureCount = 7;
inline constexpr std::size_t kEntityGridFeatureCount = 16;

/// [entities, unique entities, entities per sentence, unique entities per
///  sentence, NE share of words per sentence (averaged), NE share of words in
///  the document, NE share of entities, share of nouns removed as NE
///  overlaps, unique NE share of unique entities]
std::array<double, kEntityDensityFeatureCount> entity_density(const Document& doc);
std::span<const std::string_view> entity_density_feature_names();

/// Nouns (document token indices) linked by lexical relations. Always
/// holds at least two members.
struct LexicalChain {
  std::vector<std::size_t> members;
  std::vector<std::string> lemmas;

  std::size_t length() const { return members.size(); }
  std::size_t span() const { return members.back() - members.front(); }
};

/// Greedy single pass over NOUN/PROPN tokens in document order: a noun joins
/// the first chain whose latest member it is related to, otherwise it starts
/// a new candidate. Candidates left with one member are dropped.
std::vector<LexicalChain> build_chains(const Document& doc, const RelationTable& table);

/// [chains, chains per token, mean length, max length, mean span, max span,
///  chains spanning more than half the document's tokens]
std::array<double, kChainFeatureCount> chain_features(const Document& doc, std::span<const LexicalChain> chains);
std::span<const std::string_view> chain_feature_names();

/// Entities x sentences; each cell holds the strongest role of the entity in
/// that sentence or Absent.
struct EntityGrid {
  std::vector<std::string> entities;
  std::vector<std::vector<Role>> cells;  // cells[entity][sentence]
};

EntityGrid build_entity_grid(const Document& doc);

/// Transition probabilities between consecutive sentences in the order
/// SS, SO, SX, S-, OS, ..., --. All zero when there is no transition.
std::array<double, kEntityGridFeatureCount> entity_grid_features(const Document& doc);
std::array<double, kEntityGridFeatureCount> entity_grid_features(const EntityGrid& grid);
std::span<const std::string_view> entity_grid_feature_names();

}  // namespace readlevel
