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

#ifndef CTCKIT_DATASET_H_
#define CTCKIT_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "ctckit/batch.h"
#include "ctckit/types.h"

namespace ctckit {

// Read access to observation/label pairs. Prediction only ever calls
// features() and input_length(); training and evaluation also call labels().
class SequenceSource {
 public:
  virtual ~SequenceSource() = default;
  virtual std::size_t size() const = 0;
  virtual std::size_t feature_dim() const = 0;
  // May carry padding rows past input_length(i).
  virtual const Matrix& features(std::size_t i) const = 0;
  virtual std::size_t input_length(std::size_t i) const {
    return static_cast<std::size_t>(features(i).rows());
  }
  virtual const LabelSequence& labels(std::size_t i) const = 0;
};

struct Sequence {
  Matrix features;  // T x feature_dim, T >= 1
  LabelSequence labels;

  bool operator==(const Sequence& other) const {
    return features.rows() == other.features.rows() &&
           features.cols() == other.features.cols() &&
           features == other.features && labels == other.labels;
  }
};

class Dataset : public SequenceSource {
 public:
  Dataset(std::size_t feature_dim, std::size_t num_labels);

  // Throws DataError if the sequence is empty, has the wrong width or
  // carries a label outside [0, num_labels).
  void Add(Sequence sequence);

  std::size_t size() const override { return sequences_.size(); }
  std::size_t feature_dim() const override { return feature_dim_; }
  std::size_t num_labels() const { return num_labels_; }
  const Matrix& features(std::size_t i) const override {
    return sequences_[i].features;
  }
  const LabelSequence& labels(std::size_t i) const override {
    return sequences_[i].labels;
  }
  const std::vector<Sequence>& sequences() const { return sequences_; }

  bool operator==(const Dataset& other) const {
    return feature_dim_ == other.feature_dim_ &&
           num_labels_ == other.num_labels_ && sequences_ == other.sequences_;
  }

 private:
  std::size_t feature_dim_;
  std::size_t num_labels_;
  std::vector<Sequence> sequences_;
};

// Presents a PaddedBatch as a source, padding included.
class PaddedBatchSource : public SequenceSource {
 public:
  explicit PaddedBatchSource(const PaddedBatch& batch);

  std::size_t size() const override { return batch_.size(); }
  std::size_t feature_dim() const override;
  const Matrix& features(std::size_t i) const override {
    return batch_.features[i];
  }
  std::size_t input_length(std::size_t i) const override {
    return batch_.input_lengths[i];
  }
  const LabelSequence& labels(std::size_t i) const override {
    return labels_[i];
  }

 private:
  const PaddedBatch& batch_;
  std::vector<LabelSequence> labels_;
};

// JSON Lines: a header {"feature_dim": F, "num_labels": N} followed by one
// {"features": [[...], ...], "labels": [...]} object per line. Errors name
// the offending line.
Dataset read_dataset(const std::filesystem::path& path);
void write_dataset(const Dataset& dataset, const std::filesystem::path& path);

// Pads the listed sequences of `source` into one batch.
PaddedBatch make_batch(const SequenceSource& source,
                       std::span<const std::size_t> indices);

// Deterministic permutation of [0, n) for the given seed.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

// Shuffles with `seed`, then cuts consecutive batches of batch_size (the
// last one may be smaller).
std::vector<PaddedBatch> make_batches(const SequenceSource& source,
                                      std::size_t batch_size,
                                      std::uint64_t seed);

struct SyntheticOptions {
  std::size_t num_sequences = 500;
  std::size_t num_labels = 4;
  std::size_t feature_dim = 4;
  std::pair<std::size_t, std::size_t> frames_per_label = {2, 4};
  std::pair<std::size_t, std::size_t> label_length = {1, 5};
  double sigma = 0.1;
  std::uint64_t seed = 0;
};

// Label sequences of uniform length in label_length; adjacent labels always
// differ. Each label emits a uniform number of frames in frames_per_label,
// each frame one-hot(label) over the first num_labels coordinates plus
// N(0, sigma^2) noise on every coordinate.
Dataset generate_synthetic(const SyntheticOptions& options);

}  // namespace ctckit

#endif  // CTCKIT_DATASET_H_
