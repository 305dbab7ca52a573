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

#ifndef CTCKIT_BATCH_H_
#define CTCKIT_BATCH_H_

#include <cstddef>
#include <vector>

#include "ctckit/types.h"

namespace ctckit {

inline constexpr int kLabelPad = -1;

// The four inputs consumed by training and evaluation: network inputs,
// label sequences, input lengths and label lengths. Every member of
// `features` has the same T_max rows and every row of `labels` the same
// L_max entries; anything past the recorded lengths is padding.
struct PaddedBatch {
  std::vector<Matrix> features;            // B x (T_max x feature_dim)
  std::vector<std::vector<int>> labels;    // B x L_max, padded with -1
  std::vector<std::size_t> input_lengths;  // B
  std::vector<std::size_t> label_lengths;  // B

  std::size_t size() const { return features.size(); }
  std::size_t max_frames() const {
    return features.empty() ? 0 : static_cast<std::size_t>(features[0].rows());
  }
  std::size_t max_labels() const {
    return labels.empty() ? 0 : labels[0].size();
  }

  // The first label_lengths[i] labels of sequence i.
  LabelSequence Labels(std::size_t i) const {
    return LabelSequence(labels[i].begin(),
                         labels[i].begin() + label_lengths[i]);
  }

  // Throws DomainError if the four inputs disagree in size or a length
  // exceeds its padded extent.
  void Validate() const;
};

// Appends `extra_frames` frames of `frame_fill` and `extra_labels` label
// slots of kLabelPad to every sequence, leaving the lengths untouched.
PaddedBatch PadFurther(const PaddedBatch& batch, std::size_t extra_frames,
                       std::size_t extra_labels, double frame_fill = 0.0);

}  // namespace ctckit

#endif  // CTCKIT_BATCH_H_
