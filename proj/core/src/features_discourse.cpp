#include "readlevel/features_discourse.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "readlevel/error.hpp"
#include "readlevel/text.hpp"

namespace readlevel {

namespace {

constexpr std::array<std::string_view, kEntityDensityFeatureCount> kDensityNames = {
    "ent_total",          "ent_unique",      "ent_per_sentence",       "ent_unique_per_sentence",
    "ent_ne_share_per_sentence", "ent_ne_share_doc", "ent_ne_share_entities", "ent_overlap_nouns_removed",
    "ent_unique_ne_share"};

constexpr std::array<std::string_view, kChainFeatureCount> kChainNames = {
    "chain_count", "chain_per_token", "chain_mean_length", "chain_max_length",
    "chain_mean_span", "chain_max_span", "chain_long_span_count"};

constexpr std::array<std::string_view, kEntityGridFeatureCount> kGridNames = {
    "grid_SS", "grid_SO", "grid_SX", "grid_S-", "grid_OS", "grid_OO", "grid_OX", "grid_O-",
    "grid_XS", "grid_XO", "grid_XX", "grid_X-", "grid_-S", "grid_-O", "grid_-X", "grid_--"};

bool is_noun(std::string_view pos) { return pos == "NOUN" || pos == "PROPN"; }

std::string noun_key(const Token& t) { return text::to_lower(t.lemma.empty() ? t.surface : t.lemma); }

// Splits "B-PER" into ('B', "PER"); a tag without a BIO prefix is treated
// as an inside tag of its own type.
std::pair<char, std::string_view> split_ne(std::string_view tag) {
  if (tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-') return {tag[0], tag.substr(2)};
  return {'I', tag};
}

double ratio(double a, double b) { return b > 0 ? a / b : 0.0; }

}  // namespace

std::string_view role_symbol(Role r) {
  switch (r) {
    case Role::Subject:
      return "S";
    case Role::Object:
      return "O";
    case Role::Other:
      return "X";
    case Role::Absent:
      return "-";
  }
  return "-";
}

Role role_from_deprel(std::string_view deprel) {
  const auto colon = deprel.find(':');
  const auto base = colon == std::string_view::npos ? deprel : deprel.substr(0, colon);
  if (base == "nsubj" || base == "csubj") return Role::Subject;
  if (base == "obj" || base == "dobj" || base == "iobj") return Role::Object;
  return Role::Other;
}

EntityAnalysis extract_entities(const Document& doc) {
  if (!doc.has_pos()) throw DataError(fmt::format("document '{}' has no POS tags", doc.id()));
  EntityAnalysis out;
  for (std::size_t s = 0; s < doc.sentence_count(); ++s) {
    const Sentence& sentence = doc.sentences()[s];
    std::size_t words = 0;
    for (const auto& t : sentence) words += text::is_word(t.surface) ? 1 : 0;
    out.words_per_sentence.push_back(words);

    // NE spans.
    std::vector<EntityMention> spans;
    std::vector<bool> in_span(sentence.size(), false);
    std::string_view open_type;
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      const std::string& tag = sentence[i].ne;
      if (tag == "O" || tag.empty()) {
        open_type = {};
        continue;
      }
      const auto [prefix, type] = split_ne(tag);
      if (prefix == 'B' || open_type.empty() || type != open_type) {
        EntityMention m;
        m.sentence = s;
        m.begin = i;
        m.end = i + 1;
        m.kind = EntityMention::Kind::NamedEntity;
        spans.push_back(m);
      } else {
        spans.back().end = i + 1;
      }
      open_type = type;
      in_span[i] = true;
    }
    for (auto& m : spans) {
      std::string key;
      for (std::size_t i = m.begin; i < m.end; ++i) {
        if (!key.empty()) key += ' ';
        key += text::to_lower(sentence[i].surface);
      }
      m.key = std::move(key);
      if (doc.has_syntax()) {
        for (std::size_t i = m.begin; i < m.end; ++i) {
          const int h = sentence[i].head;
          if (h == 0 || static_cast<std::size_t>(h - 1) < m.begin || static_cast<std::size_t>(h - 1) >= m.end) {
            m.role = role_from_deprel(sentence[i].deprel);
            break;
          }
        }
      }
    }
    out.named_entities += spans.size();

    // General nouns, dropping those inside an NE span. Mentions are kept in
    // token order within the sentence.
    std::vector<EntityMention> mentions;
    std::size_t next_span = 0;
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      while (next_span < spans.size() && spans[next_span].begin == i) mentions.push_back(spans[next_span++]);
      if (!is_noun(sentence[i].pos)) continue;
      ++out.general_nouns;
      if (in_span[i]) {
        ++out.overlapping_nouns;
        continue;
      }
      EntityMention m;
      m.sentence = s;
      m.begin = i;
      m.end = i + 1;
      m.kind = EntityMention::Kind::GeneralNoun;
      m.key = noun_key(sentence[i]);
      if (doc.has_syntax()) m.role = role_from_deprel(sentence[i].deprel);
      mentions.push_back(std::move(m));
    }
    out.entities.insert(out.entities.end(), mentions.begin(), mentions.end());
  }
  return out;
}

std::array<double, kEntityDensityFeatureCount> entity_density(const Document& doc) {
  const EntityAnalysis a = extract_entities(doc);
  const double sentences = static_cast<double>(doc.sentence_count());

  std::set<std::string> unique;
  std::set<std::string> unique_ne;
  std::vector<std::set<std::string>> unique_per_sentence(doc.sentence_count());
  std::vector<double> ne_per_sentence(doc.sentence_count(), 0.0);
  for (const auto& m : a.entities) {
    unique.insert(m.key);
    unique_per_sentence[m.sentence].insert(m.key);
    if (m.kind == EntityMention::Kind::NamedEntity) {
      unique_ne.insert(m.key);
      ++ne_per_sentence[m.sentence];
    }
  }
  double unique_sentence_sum = 0;
  double ne_share_sum = 0;
  double words = 0;
  for (std::size_t s = 0; s < doc.sentence_count(); ++s) {
    unique_sentence_sum += static_cast<double>(unique_per_sentence[s].size());
    ne_share_sum += ratio(ne_per_sentence[s], static_cast<double>(a.words_per_sentence[s]));
    words += static_cast<double>(a.words_per_sentence[s]);
  }
  const double total = static_cast<double>(a.entities.size());
  const double ne = static_cast<double>(a.named_entities);
  return {total,
          static_cast<double>(unique.size()),
          total / sentences,
          unique_sentence_sum / sentences,
          ne_share_sum / sentences,
          ratio(ne, words),
          ratio(ne, total),
          ratio(static_cast<double>(a.overlapping_nouns), static_cast<double>(a.general_nouns)),
          ratio(static_cast<double>(unique_ne.size()), static_cast<double>(unique.size()))};
}

std::span<const std::string_view> entity_density_feature_names() { return kDensityNames; }

std::vector<LexicalChain> build_chains(const Document& doc, const RelationTable& table) {
  if (!doc.has_pos()) throw DataError(fmt::format("document '{}' has no POS tags", doc.id()));
  std::vector<LexicalChain> candidates;
  std::size_t index = 0;
  for (const auto& sentence : doc.sentences()) {
    for (const auto& tok : sentence) {
      if (is_noun(tok.pos)) {
        const std::string lemma = noun_key(tok);
        auto it = std::find_if(candidates.begin(), candidates.end(),
                               [&](const LexicalChain& c) { return related(c.lemmas.back(), lemma, table); });
        if (it == candidates.end()) {
          candidates.push_back(LexicalChain{{index}, {lemma}});
        } else {
          it->members.push_back(index);
          it->lemmas.push_back(lemma);
        }
      }
      ++index;
    }
  }
  std::vector<LexicalChain> chains;
  for (auto& c : candidates) {
    if (c.length() >= 2) chains.push_back(std::move(c));
  }
  return chains;
}

std::array<double, kChainFeatureCount> chain_features(const Document& doc, std::span<const LexicalChain> chains) {
  std::array<double, kChainFeatureCount> out{};
  if (chains.empty()) return out;
  const double tokens = static_cast<double>(doc.word_count());
  double len_sum = 0;
  double span_sum = 0;
  double len_max = 0;
  double span_max = 0;
  double long_spans = 0;
  for (const auto& c : chains) {
    const double len = static_cast<double>(c.length());
    const double span = static_cast<double>(c.span());
    len_sum += len;
    span_sum += span;
    len_max = std::max(len_max, len);
    span_max = std::max(span_max, span);
    if (span > tokens / 2.0) ++long_spans;
  }
  const double n = static_cast<double>(chains.size());
  out = {n, n / tokens, len_sum / n, len_max, span_sum / n, span_max, long_spans};
  return out;
}

std::span<const std::string_view> chain_feature_names() { return kChainNames; }

EntityGrid build_entity_grid(const Document& doc) {
  const EntityAnalysis a = extract_entities(doc);
  EntityGrid grid;
  std::unordered_map<std::string, std::size_t> row_of;
  for (const auto& m : a.entities) {
    auto [it, inserted] = row_of.emplace(m.key, grid.entities.size());
    if (inserted) {
      grid.entities.push_back(m.key);
      grid.cells.emplace_back(doc.sentence_count(), Role::Absent);
    }
    Role& cell = grid.cells[it->second][m.sentence];
    cell = std::min(cell, m.role);
  }
  return grid;
}

std::array<double, kEntityGridFeatureCount> entity_grid_features(const EntityGrid& grid) {
  std::array<double, kEntityGridFeatureCount> counts{};
  double total = 0;
  for (const auto& row : grid.cells) {
    for (std::size_t s = 0; s + 1 < row.size(); ++s) {
      const auto from = static_cast<std::size_t>(row[s]);
      const auto to = static_cast<std::size_t>(row[s + 1]);
      ++counts[from * 4 + to];
      ++total;
    }
  }
  if (total > 0) {
    for (double& c : counts) c /= total;
  }
  return counts;
}

std::array<double, kEntityGridFeatureCount> entity_grid_features(const Document& doc) {
  return entity_grid_features(build_entity_grid(doc));
}

std::span<const std::string_view> entity_grid_feature_names() { return kGridNames; }

}  // namespace readlevel
