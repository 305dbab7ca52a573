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

// CTC negative log-likelihood and its gradient, computed with the
// forward-backward recursions over the blank-extended label sequence.
//
// Conventions used throughout:
//  * the blank is the last class, index K - 1;
//  * alpha(t, s) includes the emission at frame t, beta(t, s) covers frames
//    t+1 .. input_len-1, so logsumexp_s(alpha(t, s) + beta(t, s)) is the
//    sequence log-likelihood for every t;
//  * everything is natural-log, 64-bit.

#ifndef CTCKIT_LATTICE_H_
#define CTCKIT_LATTICE_H_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "ctckit/batch.h"
#include "ctckit/types.h"

namespace ctckit {

// [b, y_1, b, y_2, ..., y_L, b]; length 2L + 1.
using ExtendedLabels = std::vector<int>;

struct Lattice {
  Matrix alpha;  // input_len x (2L + 1), log domain
  Matrix beta;   // input_len x (2L + 1), log domain
  double log_likelihood = 0.0;
};

// Merges adjacent repeats, then drops blanks. Symbols must lie in
// [0, blank_index]; anything else throws DomainError.
LabelSequence collapse(std::span<const int> path, int blank_index);

ExtendedLabels extend_with_blanks(std::span<const int> labels, int blank_index);

// Minimum number of frames an alignment of `labels` needs: one per label
// plus one blank between each pair of equal neighbours.
std::size_t required_frames(std::span<const int> labels);

// Fills alpha and log_likelihood. Throws InfeasibleAlignment when
// input_len < required_frames, DomainError on inconsistent shapes.
Lattice ctc_forward(const PosteriorMatrix& probs, const ExtendedLabels& ext,
                    std::size_t input_len);

// Fills beta (and log_likelihood, from the backward side).
Lattice ctc_backward(const PosteriorMatrix& probs, const ExtendedLabels& ext,
                     std::size_t input_len);

// -log p(labels | probs) using the first input_len frames and the first
// label_len labels. Rows must be normalized to within 1e-6.
double ctc_loss(const PosteriorMatrix& probs, std::span<const int> labels,
                std::size_t input_len, std::size_t label_len);

struct LossAndGradient {
  double loss = 0.0;
  Matrix gradient;  // same shape as the logits; rows >= input_len are zero
};

// Loss and its gradient with respect to pre-softmax activations:
// softmax(logits)(t, k) - posterior occupancy of class k at frame t.
LossAndGradient ctc_gradient(const Matrix& logits, std::span<const int> labels,
                             std::size_t input_len, std::size_t label_len);

// Per-sequence losses; `batch.features[i]` holds the posteriors of
// sequence i. Errors carry the index of the failing sequence.
std::vector<double> ctc_loss_batch(const PaddedBatch& batch);

// Row-wise softmax, shifted by the row maximum.
Matrix softmax_rows(const Matrix& logits);
Matrix log_softmax_rows(const Matrix& logits);

}  // namespace ctckit

#endif  // CTCKIT_LATTICE_H_
