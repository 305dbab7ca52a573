/* Copyright 2026 The ctckit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Decoders mapping a posterior matrix to label sequences.
//
// Ties are broken the same way everywhere: the lower class index wins a
// per-frame argmax, and between equal scores the lexicographically smaller
// label sequence ranks first.

#ifndef CTCKIT_DECODE_H_
#define CTCKIT_DECODE_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "ctckit/types.h"

namespace ctckit {

struct Hypothesis {
  LabelSequence labels;
  double score = 0.0;  // natural log probability

  bool operator==(const Hypothesis&) const = default;
};

struct DecodeResult {
  // Sorted by score, best first. Never contains duplicate label sequences.
  std::vector<Hypothesis> paths;
  // Set by prefix search when a segment fell back to beam search.
  bool approximate = false;

  const Hypothesis& best() const { return paths.front(); }
  bool operator==(const DecodeResult&) const = default;
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = std::uint64_t{1}
                                                           << 22;
inline constexpr std::size_t kDefaultBeamWidth = 100;
inline constexpr double kDefaultBlankThreshold = 0.999;
inline constexpr std::size_t kDefaultNodeBudget = 100000;
inline constexpr std::size_t kUnlimitedNodes =
    std::numeric_limits<std::size_t>::max();
inline constexpr std::size_t kFallbackBeamWidth = 32;

// Enumerates all K^input_len paths and ranks collapsed sequences by their
// summed probability. Sequences of probability zero are not reported.
// Throws BudgetExceeded when K^input_len > budget.
DecodeResult exact_decode(const PosteriorMatrix& probs, std::size_t input_len,
                          std::size_t top_paths,
                          std::uint64_t budget = kDefaultEnumerationBudget);

// Per-frame argmax followed by collapse. The score is the log probability
// of that single path, not of the label sequence.
DecodeResult best_path_decode(const PosteriorMatrix& probs,
                              std::size_t input_len);

// Best-first prefix search run independently on the segments between
// frames whose blank posterior exceeds blank_threshold. Such frames decode
// as blank. A segment that expands more than node_budget prefixes is
// decoded with beam search (width kFallbackBeamWidth) instead and the
// result is flagged approximate.
DecodeResult prefix_search_decode(const PosteriorMatrix& probs,
                                  std::size_t input_len,
                                  double blank_threshold = kDefaultBlankThreshold,
                                  std::size_t node_budget = kDefaultNodeBudget);

// Time-synchronous prefix beam search. Each prefix carries separate
// blank-ending and label-ending mass; beams are pruned to beam_width after
// every frame.
DecodeResult beam_search_decode(const PosteriorMatrix& probs,
                                std::size_t input_len,
                                std::size_t beam_width = kDefaultBeamWidth,
                                std::size_t top_paths = 1);

}  // namespace ctckit

#endif  // CTCKIT_DECODE_H_
