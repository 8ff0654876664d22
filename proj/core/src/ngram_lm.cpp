#include "readlevel/ngram_lm.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "readlevel/error.hpp"
#include "readlevel/text.hpp"

namespace readlevel {

std::string_view lm_source_name(LmSource source) { return source == LmSource::Surface ? "surface" : "pos"; }

LmSource parse_lm_source(std::string_view s) {
  if (s == "surface") return LmSource::Surface;
  if (s == "pos") return LmSource::Pos;
  throw DataError(fmt::format("unknown LM source '{}'", s));
}

std::size_t NgramModel::KeyHash::operator()(const Key& k) const noexcept {
  // FNV-1a over the ids.
  std::uint64_t h = 1469598103934665603ULL;
  for (std::uint32_t id : k.ids) {
    h ^= id;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

NgramModel::NgramModel(int order, LmSource source, std::vector<std::string> symbols)
    : order_(order), source_(source), symbols_(std::move(symbols)), levels_(static_cast<std::size_t>(order)) {
  for (std::uint32_t i = 0; i < symbols_.size(); ++i) index_.emplace(symbols_[i], i);
}

std::uint32_t NgramModel::id_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end() || it->second == kStartId) return kUnknownId;
  return it->second;
}

std::vector<std::uint32_t> NgramModel::ids_of(const std::vector<std::string>& tokens) const {
  std::vector<std::uint32_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (t == kSentenceStart) {
      ids.push_back(kStartId);
    } else {
      ids.push_back(id_of(t));
    }
  }
  return ids;
}

void NgramModel::add(std::span<const std::uint32_t> context, std::uint32_t word, std::uint64_t n) {
  auto& stats = levels_[context.size()][Key{{context.begin(), context.end()}}];
  stats.total += n;
  stats.followers[word] += n;
}

const NgramModel::ContextStats* NgramModel::find(std::span<const std::uint32_t> context) const {
  if (context.size() >= levels_.size()) return nullptr;
  const auto& level = levels_[context.size()];
  auto it = level.find(Key{{context.begin(), context.end()}});
  return it == level.end() ? nullptr : &it->second;
}

void NgramModel::finalize() {
  const double v = static_cast<double>(vocabulary_size());
  for (std::size_t len = 0; len < levels_.size(); ++len) {
    for (auto& [key, stats] : levels_[len]) {
      const double total = static_cast<double>(stats.total);
      const double types = static_cast<double>(stats.followers.size());
      const double reserved = types / (total + types);
      double seen_lower = 0.0;
      if (len == 0) {
        seen_lower = types / v;
      } else {
        std::span<const std::uint32_t> shorter(key.ids.begin() + 1, key.ids.end());
        // Summed in id order so a model rebuilt from its counts matches bit for bit.
        std::vector<std::uint32_t> words;
        words.reserve(stats.followers.size());
        for (const auto& entry : stats.followers) words.push_back(entry.first);
        std::sort(words.begin(), words.end());
        for (std::uint32_t word : words) seen_lower += prob(shorter, word);
      }
      // "<unk>" is never a training successor, so seen_lower < 1.
      stats.backoff_weight = reserved / (1.0 - seen_lower);
    }
  }
}

double NgramModel::prob(std::span<const std::uint32_t> context, std::uint32_t word) const {
  if (context.size() > static_cast<std::size_t>(order_ - 1)) {
    context = context.subspan(context.size() - static_cast<std::size_t>(order_ - 1));
  }
  double weight = 1.0;
  // Walk from the longest context down; each miss multiplies in the backoff
  // weight of the context that reserved the mass.
  while (true) {
    if (const ContextStats* stats = find(context)) {
      if (auto it = stats->followers.find(word); it != stats->followers.end()) {
        return weight * static_cast<double>(it->second) /
               static_cast<double>(stats->total + stats->followers.size());
      }
      weight *= stats->backoff_weight;
    }
    if (context.empty()) break;
    context = context.subspan(1);
  }
  return weight / static_cast<double>(vocabulary_size());
}

double NgramModel::prob(const std::vector<std::string>& context, std::string_view word) const {
  const auto ids = ids_of(context);
  return prob(ids, word == kSentenceStart ? kStartId : id_of(word));
}

std::uint64_t NgramModel::count(const std::vector<std::string>& ngram) const {
  if (ngram.empty()) return 0;
  const auto ids = ids_of(ngram);
  const ContextStats* stats = find(std::span<const std::uint32_t>(ids).first(ids.size() - 1));
  if (stats == nullptr) return 0;
  auto it = stats->followers.find(ids.back());
  return it == stats->followers.end() ? 0 : it->second;
}

std::uint64_t NgramModel::context_total(const std::vector<std::string>& context) const {
  const ContextStats* stats = find(ids_of(context));
  return stats == nullptr ? 0 : stats->total;
}

std::uint64_t NgramModel::context_types(const std::vector<std::string>& context) const {
  const ContextStats* stats = find(ids_of(context));
  return stats == nullptr ? 0 : stats->followers.size();
}

std::vector<std::vector<std::uint32_t>> NgramModel::contexts(std::size_t length) const {
  std::vector<std::vector<std::uint32_t>> out;
  if (length >= levels_.size()) return out;
  for (const auto& [key, stats] : levels_[length]) out.push_back(key.ids);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NgramModel::NgramCount> NgramModel::ngram_counts() const {
  std::vector<NgramCount> out;
  for (const auto& level : levels_) {
    for (const auto& [key, stats] : level) {
      for (const auto& [word, n] : stats.followers) {
        NgramCount c;
        c.ids = key.ids;
        c.ids.push_back(word);
        c.count = n;
        out.push_back(std::move(c));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const NgramCount& a, const NgramCount& b) {
    if (a.ids.size() != b.ids.size()) return a.ids.size() < b.ids.size();
    return a.ids < b.ids;
  });
  return out;
}

NgramModel NgramModel::from_counts(int order, LmSource source, std::vector<std::string> vocabulary,
                                   const std::vector<NgramCount>& counts) {
  if (order < 1 || order > kMaxLmOrder) throw DataError(fmt::format("LM order {} outside [1, 5]", order));
  if (vocabulary.size() < 3 || vocabulary[kStartId] != kSentenceStart || vocabulary[kEndId] != kSentenceEnd ||
      vocabulary[kUnknownId] != kUnknownWord) {
    throw DataError("LM vocabulary must start with <s>, </s>, <unk>");
  }
  NgramModel model(order, source, std::move(vocabulary));
  for (const auto& c : counts) {
    if (c.ids.empty() || c.ids.size() > static_cast<std::size_t>(order)) throw DataError("bad n-gram length in LM");
    for (std::uint32_t id : c.ids) {
      if (id >= model.symbols_.size()) throw DataError("n-gram id outside LM vocabulary");
    }
    std::span<const std::uint32_t> ids(c.ids);
    model.add(ids.first(ids.size() - 1), ids.back(), c.count);
  }
  if (model.levels_[0].empty()) throw DataError("LM has no unigram counts");
  model.finalize();
  return model;
}

std::vector<std::vector<std::string>> lm_sentences(const Document& doc, LmSource source) {
  if (source == LmSource::Pos && !doc.has_pos()) {
    throw DataError(fmt::format("document '{}' has no POS tags for a POS language model", doc.id()));
  }
  std::vector<std::vector<std::string>> out;
  out.reserve(doc.sentence_count());
  for (const auto& sentence : doc.sentences()) {
    std::vector<std::string> toks;
    for (const auto& tok : sentence) {
      if (source == LmSource::Pos) {
        toks.push_back(tok.pos);
      } else if (text::is_word(tok.surface)) {
        toks.push_back(text::to_lower(tok.surface));
      }
    }
    out.push_back(std::move(toks));
  }
  return out;
}

NgramModel train_lm_sentences(const std::vector<std::vector<std::string>>& sentences, int order, LmSource source) {
  if (order < 1 || order > kMaxLmOrder) throw DataError(fmt::format("LM order {} outside [1, 5]", order));
  if (sentences.empty()) throw DataError("cannot train a language model on an empty training set");

  std::vector<std::string> symbols = {std::string(kSentenceStart), std::string(kSentenceEnd),
                                      std::string(kUnknownWord)};
  std::unordered_map<std::string, std::uint32_t> ids;
  for (std::uint32_t i = 0; i < symbols.size(); ++i) ids.emplace(symbols[i], i);
  // Types get ids in first-seen order, which keeps training deterministic.
  for (const auto& s : sentences) {
    for (const auto& t : s) {
      if (t == kSentenceStart || t == kSentenceEnd || t == kUnknownWord) {
        throw DataError(fmt::format("reserved symbol '{}' in LM training data", t));
      }
      if (ids.emplace(t, static_cast<std::uint32_t>(symbols.size())).second) symbols.push_back(t);
    }
  }

  NgramModel model(order, source, std::move(symbols));
  const std::size_t pad = static_cast<std::size_t>(order - 1);
  std::vector<std::uint32_t> padded;
  for (const auto& s : sentences) {
    padded.assign(pad, kStartId);
    for (const auto& t : s) padded.push_back(ids.at(t));
    padded.push_back(kEndId);
    for (std::size_t i = pad; i < padded.size(); ++i) {
      for (std::size_t len = 0; len <= pad; ++len) {
        model.add(std::span<const std::uint32_t>(padded).subspan(i - len, len), padded[i], 1);
      }
    }
  }
  model.finalize();
  return model;
}

NgramModel train_lm(std::span<const Document* const> docs, int order, LmSource source) {
  if (order < 1 || order > kMaxLmOrder) throw DataError(fmt::format("LM order {} outside [1, 5]", order));
  if (docs.empty()) throw DataError("cannot train a language model on an empty training set");
  std::vector<std::vector<std::string>> sentences;
  for (const Document* doc : docs) {
    auto s = lm_sentences(*doc, source);
    sentences.insert(sentences.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  }
  return train_lm_sentences(sentences, order, source);
}

NgramModel train_lm(std::span<const Document> docs, int order, LmSource source) {
  std::vector<const Document*> ptrs;
  ptrs.reserve(docs.size());
  for (const auto& d : docs) ptrs.push_back(&d);
  return train_lm(std::span<const Document* const>(ptrs), order, source);
}

LmScore score(const NgramModel& model, const std::vector<std::vector<std::string>>& sentences) {
  if (sentences.empty()) throw DataError("cannot score an empty document");
  const std::size_t pad = static_cast<std::size_t>(model.order() - 1);
  LmScore result;
  std::vector<std::uint32_t> padded;
  for (const auto& s : sentences) {
    padded.assign(pad, kStartId);
    for (const auto& t : s) padded.push_back(model.id_of(t));
    padded.push_back(kEndId);
    for (std::size_t i = pad; i < padded.size(); ++i) {
      const auto context = std::span<const std::uint32_t>(padded).subspan(i - pad, pad);
      result.log_likelihood += std::log(model.prob(context, padded[i]));
      ++result.scored_tokens;
    }
  }
  result.perplexity = std::exp(-result.log_likelihood / static_cast<double>(result.scored_tokens));
  return result;
}

LmScore score(const NgramModel& model, const Document& doc) { return score(model, lm_sentences(doc, model.source())); }

}  // namespace readlevel
