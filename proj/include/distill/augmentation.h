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

#ifndef DISTILL_AUGMENTATION_H_
#define DISTILL_AUGMENTATION_H_

#include <array>
#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "distill/model.h"
#include "distill/rng.h"

namespace distill {

// Tag given to words the fallback tagger has never seen. Such words are
// never POS-swapped.
inline constexpr std::string_view kUnknownTag = "UNK-TAG";

struct TaggedSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;

  // Throws std::invalid_argument unless tokens and tags are non-empty and
  // equally long.
  void validate() const;
  bool operator==(const TaggedSentence&) const = default;
};

enum class Provenance { kOriginal, kSynthetic };

std::string_view provenance_name(Provenance p);
Provenance parse_provenance(std::string_view name);

struct TaggedExample {
  std::string id;
  TaggedSentence first;
  std::optional<TaggedSentence> second;
  std::optional<std::size_t> gold_label;
  Provenance provenance = Provenance::kOriginal;

  bool is_pair() const { return second.has_value(); }
  bool operator==(const TaggedExample&) const = default;
};

struct AugConfig {
  double p_mask = 0.1;
  double p_pos = 0.1;
  double p_ng = 0.25;
  std::size_t n_iter = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

// Which sentences of a pair one synthesis pass perturbs.
enum class PairMode { kFirstOnly, kSecondOnly, kBoth };

// first_only, second_only, both, first_only, ...
PairMode pair_mode_for_iteration(std::size_t iteration);

// Counters filled in by the augmentation routines.
struct AugStats {
  std::size_t tokens = 0;       // positions visited by perturb_tokens
  std::size_t masked = 0;
  std::size_t pos_swapped = 0;  // replacement drawn, possibly the same word
  std::size_t kept = 0;
  std::size_t ngram_opportunities = 0;
  std::size_t ngram_triggered = 0;
  std::array<std::size_t, 6> ngram_lengths{};  // index n in 1..5
  std::size_t synthesized = 0;
  std::size_t duplicates = 0;

  double mask_rate() const { return ratio(masked, tokens); }
  double pos_rate() const { return ratio(pos_swapped, tokens); }
  double ngram_rate() const { return ratio(ngram_triggered, ngram_opportunities); }

  AugStats& operator+=(const AugStats& other);

 private:
  static double ratio(std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  }
};

// Per-tag unigram counts over a tagged corpus, each tag's distribution
// normalized over the words seen with it.
class PosLexicon {
 public:
  // Throws std::invalid_argument on an empty corpus. Words tagged kUnknownTag
  // are not recorded.
  static PosLexicon build(std::span<const TaggedExample> corpus);

  bool has_tag(std::string_view tag) const { return dists_.contains(std::string(tag)); }
  std::size_t count(std::string_view tag, std::string_view word) const;
  // count(word, tag) / total count of tag; 0 for unseen pairs.
  double probability(std::string_view tag, std::string_view word) const;
  std::vector<std::string> tags() const;

  // Draws a word from the tag's distribution. The tag must be present.
  template <UniformSource R>
  const std::string& sample(std::string_view tag, R& rng) const {
    const TagDistribution& d = dists_.at(std::string(tag));
    const std::uint64_t draw = rng.uniform_int(d.cumulative.back());
    const auto it = std::upper_bound(d.cumulative.begin(), d.cumulative.end(), draw);
    return d.words[static_cast<std::size_t>(it - d.cumulative.begin())];
  }

  // Fallback tagger: the word's most frequent tag (ties to the
  // lexicographically smallest), or kUnknownTag.
  std::string most_frequent_tag(std::string_view word) const;
  TaggedSentence tag(std::span<const std::string> tokens) const;

 private:
  struct TagDistribution {
    std::vector<std::string> words;
    std::vector<std::uint64_t> cumulative;
  };

  std::map<std::string, std::map<std::string, std::uint64_t>> counts_;
  std::map<std::string, TagDistribution> dists_;
  std::unordered_map<std::string, std::string> best_tag_;
};

// One pass over the words: draw X ~ U[0,1) per position; X < p_mask masks,
// p_mask <= X < p_mask + p_pos swaps in a same-tag word, otherwise keep.
// Words whose tag the lexicon lacks are kept. Tags are unchanged.
template <UniformSource R>
TaggedSentence perturb_tokens(const TaggedSentence& sentence, const PosLexicon& lexicon,
                              const AugConfig& config, R& rng, AugStats* stats = nullptr) {
  TaggedSentence out = sentence;
  for (std::size_t i = 0; i < out.tokens.size(); ++i) {
    const double x = rng.uniform01();
    bool masked = false, swapped = false;
    if (x < config.p_mask) {
      out.tokens[i] = std::string(kMaskToken);
      masked = true;
    } else if (x < config.p_mask + config.p_pos && lexicon.has_tag(out.tags[i])) {
      out.tokens[i] = lexicon.sample(out.tags[i], rng);
      swapped = true;
    }
    if (stats != nullptr) {
      ++stats->tokens;
      stats->masked += masked;
      stats->pos_swapped += swapped;
      stats->kept += !masked && !swapped;
    }
  }
  return out;
}

// With probability p_ng keeps only a contiguous window of n tokens, n drawn
// uniformly from {1..5} and clamped to the sentence length, the start drawn
// uniformly. Otherwise returns the input.
template <UniformSource R>
TaggedSentence ngram_sample(const TaggedSentence& sentence, const AugConfig& config, R& rng,
                            AugStats* stats = nullptr) {
  if (stats != nullptr) ++stats->ngram_opportunities;
  if (!(rng.uniform01() < config.p_ng)) return sentence;
  const std::size_t len = sentence.tokens.size();
  const std::size_t drawn = 1 + static_cast<std::size_t>(rng.uniform_int(5));
  const std::size_t n = std::min(drawn, len);
  const std::size_t start = static_cast<std::size_t>(rng.uniform_int(len - n + 1));
  if (stats != nullptr) {
    ++stats->ngram_triggered;
    ++stats->ngram_lengths[drawn];
  }
  TaggedSentence out;
  out.tokens.assign(sentence.tokens.begin() + start, sentence.tokens.begin() + start + n);
  out.tags.assign(sentence.tags.begin() + start, sentence.tags.begin() + start + n);
  return out;
}

// Perturbs then n-gram samples each sentence designated by `mode` (single
// sentences ignore it) using a stream seeded from (seed, example id,
// iteration). The gold label is dropped and provenance becomes synthetic.
TaggedExample synthesize_example(const TaggedExample& example, const PosLexicon& lexicon,
                                 const AugConfig& config, std::size_t iteration,
                                 PairMode mode, AugStats* stats = nullptr);

// Originals followed by their synthetic variants: n_iter passes per example
// (cycling pair modes), dropping variants equal to the source or to an
// earlier variant of the same source. The lexicon is built from `corpus`.
std::vector<TaggedExample> augment_corpus(std::span<const TaggedExample> corpus,
                                          const AugConfig& config,
                                          AugStats* stats = nullptr);
std::vector<TaggedExample> augment_corpus(std::span<const TaggedExample> corpus,
                                          const PosLexicon& lexicon,
                                          const AugConfig& config,
                                          AugStats* stats = nullptr);

}  // namespace distill

#endif  // DISTILL_AUGMENTATION_H_
