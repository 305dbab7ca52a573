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

#include "ctckit/batch.h"

#include <string>

namespace ctckit {

void PaddedBatch::Validate() const {
  const std::size_t n = features.size();
  if (labels.size() != n || input_lengths.size() != n ||
      label_lengths.size() != n) {
    throw DomainError("padded batch: the four inputs disagree in size");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (features[i].rows() != features[0].rows() ||
        features[i].cols() != features[0].cols()) {
      throw DomainError("padded batch: sequence " + std::to_string(i) +
                        " has a different padded shape");
    }
    if (labels[i].size() != labels[0].size()) {
      throw DomainError("padded batch: label row " + std::to_string(i) +
                        " has a different padded length");
    }
    if (input_lengths[i] > static_cast<std::size_t>(features[i].rows())) {
      throw DomainError("padded batch: input length of sequence " +
                        std::to_string(i) + " exceeds T_max");
    }
    if (label_lengths[i] > labels[i].size()) {
      throw DomainError("padded batch: label length of sequence " +
                        std::to_string(i) + " exceeds L_max");
    }
  }
}

PaddedBatch PadFurther(const PaddedBatch& batch, std::size_t extra_frames,
                       std::size_t extra_labels, double frame_fill) {
  PaddedBatch out = batch;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Matrix& src = batch.features[i];
    Matrix padded = Matrix::Constant(src.rows() + extra_frames, src.cols(),
                                     frame_fill);
    padded.topRows(src.rows()) = src;
    out.features[i] = std::move(padded);
    out.labels[i].resize(out.labels[i].size() + extra_labels, kLabelPad);
  }
  return out;
}

}  // namespace ctckit
