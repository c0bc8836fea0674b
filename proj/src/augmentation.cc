//
// Copyright 2026 The bilstm-distill Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "distill/augmentation.h"

#include <stdexcept>

namespace distill {

void TaggedSentence::validate() const {
  if (tokens.empty()) throw std::invalid_argument("empty sentence");
  if (tokens.size() != tags.size()) {
    throw std::invalid_argument("sentence has " + std::to_string(tokens.size()) +
                                " tokens but " + std::to_string(tags.size()) + " tags");
  }
}

std::string_view provenance_name(Provenance p) {
  return p == Provenance::kOriginal ? "original" : "synthetic";
}

Provenance parse_provenance(std::string_view name) {
  if (name == "original") return Provenance::kOriginal;
  if (name == "synthetic") return Provenance::kSynthetic;
  throw std::invalid_argument("unknown provenance '" + std::string(name) + "'");
}

void AugConfig::validate() const {
  for (double p : {p_mask, p_pos, p_ng}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("augmentation probabilities must lie in [0, 1]");
    }
  }
  if (p_mask + p_pos > 1.0) {
    throw std::invalid_argument("p_mask + p_pos must not exceed 1");
  }
  if (n_iter == 0) throw std::invalid_argument("n_iter must be positive");
}

PairMode pair_mode_for_iteration(std::size_t iteration) {
  static constexpr PairMode kCycle[] = {PairMode::kFirstOnly, PairMode::kSecondOnly,
                                        PairMode::kBoth};
  return kCycle[iteration % 3];
}

AugStats& AugStats::operator+=(const AugStats& o) {
  tokens += o.tokens;
  masked += o.masked;
  pos_swapped += o.pos_swapped;
  kept += o.kept;
  ngram_opportunities += o.ngram_opportunities;
  ngram_triggered += o.ngram_triggered;
  for (std::size_t i = 0; i < ngram_lengths.size(); ++i) ngram_lengths[i] += o.ngram_lengths[i];
  synthesized += o.synthesized;
  duplicates += o.duplicates;
  return *this;
}

PosLexicon PosLexicon::build(std::span<const TaggedExample> corpus) {
  if (corpus.empty()) throw std::invalid_argument("cannot build a POS lexicon from no data");
  PosLexicon lex;
  auto add_sentence = [&lex](const TaggedSentence& s) {
    s.validate();
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (s.tags[i] == kUnknownTag || s.tokens[i] == kMaskToken) continue;
      ++lex.counts_[s.tags[i]][s.tokens[i]];
    }
  };
  for (const TaggedExample& ex : corpus) {
    add_sentence(ex.first);
    if (ex.second) add_sentence(*ex.second);
  }
  std::map<std::string, std::map<std::string, std::uint64_t>> by_word;
  for (const auto& [tag, words] : lex.counts_) {
    TagDistribution& d = lex.dists_[tag];
    std::uint64_t running = 0;
    for (const auto& [word, count] : words) {
      running += count;
      d.words.push_back(word);
      d.cumulative.push_back(running);
      by_word[word][tag] = count;
    }
  }
  for (const auto& [word, tags] : by_word) {
    const std::string* best = nullptr;
    std::uint64_t best_count = 0;
    for (const auto& [tag, count] : tags) {  // ascending tag order
      if (count > best_count) {
        best = &tag;
        best_count = count;
      }
    }
    lex.best_tag_.emplace(word, *best);
  }
  return lex;
}

std::size_t PosLexicon::count(std::string_view tag, std::string_view word) const {
  const auto t = counts_.find(std::string(tag));
  if (t == counts_.end()) return 0;
  const auto w = t->second.find(std::string(word));
  return w == t->second.end() ? 0 : w->second;
}

double PosLexicon::probability(std::string_view tag, std::string_view word) const {
  const auto d = dists_.find(std::string(tag));
  if (d == dists_.end()) return 0.0;
  return static_cast<double>(count(tag, word)) /
         static_cast<double>(d->second.cumulative.back());
}

std::vector<std::string> PosLexicon::tags() const {
  std::vector<std::string> out;
  for (const auto& [tag, _] : dists_) out.push_back(tag);
  return out;
}

std::string PosLexicon::most_frequent_tag(std::string_view word) const {
  const auto it = best_tag_.find(std::string(word));
  return it == best_tag_.end() ? std::string(kUnknownTag) : it->second;
}

TaggedSentence PosLexicon::tag(std::span<const std::string> tokens) const {
  TaggedSentence s;
  s.tokens.assign(tokens.begin(), tokens.end());
  for (const std::string& t : tokens) s.tags.push_back(most_frequent_tag(t));
  return s;
}

TaggedExample synthesize_example(const TaggedExample& example, const PosLexicon& lexicon,
                                 const AugConfig& config, std::size_t iteration,
                                 PairMode mode, AugStats* stats) {
  Rng rng(derive_seed(config.seed, fnv1a64(example.id), iteration));
  auto rewrite = [&](const TaggedSentence& s) {
    return ngram_sample(perturb_tokens(s, lexicon, config, rng, stats), config, rng, stats);
  };
  TaggedExample out;
  out.id = example.id + "#" + std::to_string(iteration);
  out.provenance = Provenance::kSynthetic;
  if (!example.is_pair()) {
    out.first = rewrite(example.first);
  } else {
    out.first = mode == PairMode::kSecondOnly ? example.first : rewrite(example.first);
    out.second = mode == PairMode::kFirstOnly ? *example.second : rewrite(*example.second);
  }
  return out;
}

namespace {

bool same_text(const TaggedExample& a, const TaggedExample& b) {
  if (a.first.tokens != b.first.tokens) return false;
  if (a.second.has_value() != b.second.has_value()) return false;
  return !a.second || a.second->tokens == b.second->tokens;
}

}  // namespace

std::vector<TaggedExample> augment_corpus(std::span<const TaggedExample> corpus,
                                          const AugConfig& config, AugStats* stats) {
  return augment_corpus(corpus, PosLexicon::build(corpus), config, stats);
}

std::vector<TaggedExample> augment_corpus(std::span<const TaggedExample> corpus,
                                          const PosLexicon& lexicon,
                                          const AugConfig& config, AugStats* stats) {
  config.validate();
  if (corpus.empty()) throw std::invalid_argument("cannot augment an empty corpus");
  std::vector<TaggedExample> out(corpus.begin(), corpus.end());
  for (TaggedExample& ex : out) ex.provenance = Provenance::kOriginal;
  AugStats local;
  for (const TaggedExample& ex : corpus) {
    std::vector<TaggedExample> variants;
    for (std::size_t it = 0; it < config.n_iter; ++it) {
      TaggedExample synthetic =
          synthesize_example(ex, lexicon, config, it, pair_mode_for_iteration(it), &local);
      const bool duplicate =
          same_text(synthetic, ex) ||
          std::any_of(variants.begin(), variants.end(),
                      [&](const TaggedExample& v) { return same_text(v, synthetic); });
      if (duplicate) {
        ++local.duplicates;
      } else {
        ++local.synthesized;
        variants.push_back(std::move(synthetic));
      }
    }
    std::move(variants.begin(), variants.end(), std::back_inserter(out));
  }
  if (stats != nullptr) *stats += local;
  return out;
}

}  // namespace distill
