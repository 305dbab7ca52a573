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

// CtcModel bundles a recurrent network with the CTC loss and exposes three
// branches over it:
//
//  * training   (train_on_batch, fit)   consumes features, labels, input
//                                       lengths and label lengths;
//  * prediction (predict)               consumes features and input lengths
//                                       only, then decodes;
//  * evaluation (evaluate)              consumes all four and reports loss,
//                                       label error rate, sequence error rate.
//
// A model is single-writer while training. The const members may run
// concurrently with each other.

#ifndef CTCKIT_MODEL_H_
#define CTCKIT_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "ctckit/batch.h"
#include "ctckit/dataset.h"
#include "ctckit/decode.h"
#include "ctckit/metrics.h"
#include "ctckit/net.h"
#include "ctckit/optimizer.h"

namespace ctckit {

struct DecodeOptions {
  bool greedy = true;
  std::size_t beam_width = kDefaultBeamWidth;
  std::size_t top_paths = 1;

  // Throws DomainError for zero widths or top_paths > beam_width.
  void Validate() const;
  bool operator==(const DecodeOptions&) const = default;
};

enum class Metric { kLoss, kLer, kSer };

// Parses a comma-separated list such as "loss,ler,ser".
std::set<Metric> ParseMetrics(std::string_view list);
std::string_view MetricName(Metric metric);

struct EpochRecord {
  double train_loss = 0.0;  // mean per-sequence loss before each step
  std::optional<double> validation_loss;
  double seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
};

struct FitOptions {
  std::size_t epochs = 1;
  std::size_t batch_size = 16;
  std::uint64_t shuffle_seed = 0;
  const SequenceSource* validation = nullptr;
  // When set, weights are written to <dir>/weights.epoch<N>.ctcw after each
  // epoch N (1-based).
  std::optional<std::filesystem::path> checkpoint_dir;
  std::function<void(std::size_t epoch, const EpochRecord&)> on_epoch;
};

struct BatchGradients {
  std::vector<double> losses;
  double mean_loss = 0.0;
  ParameterSet grads;  // of the mean loss
};

inline constexpr const char* kArchitectureFile = "architecture.json";
inline constexpr const char* kHyperparamsFile = "hyperparams.json";
inline constexpr const char* kWeightsFile = "weights.ctcw";

class CtcModel {
 public:
  // The loss is always CTC; only the optimizer is chosen here.
  static CtcModel compile(const NetworkSpec& spec, OptimizerKind optimizer,
                          double learning_rate, const DecodeOptions& decode,
                          std::uint64_t seed);
  static CtcModel compile(const NetworkSpec& spec,
                          std::string_view optimizer_name,
                          double learning_rate, const DecodeOptions& decode,
                          std::uint64_t seed);

  // Restores a model saved with save(). Weights come from `weights` when
  // given, else from <dir>/weights.ctcw when present, else from a fresh
  // initialization with the stored seed. Throws LoadError.
  static CtcModel load(const std::filesystem::path& dir,
                       const std::optional<std::filesystem::path>& weights = {});

  void save(const std::filesystem::path& dir) const;

  // Loss and mean-loss gradients without an optimizer step. Infeasible
  // sequences raise InfeasibleAlignment carrying their batch index.
  BatchGradients compute_gradients(const PaddedBatch& batch) const;

  // One forward/backward pass and optimizer step. Returns the pre-step mean
  // loss. Leaves the model untouched if anything throws.
  double train_on_batch(const PaddedBatch& batch);

  TrainHistory fit(const SequenceSource& train, const FitOptions& options);

  // Reads only features and input lengths. `decode` overrides the defaults
  // fixed at compile time.
  std::vector<DecodeResult> predict(
      const SequenceSource& source,
      const std::optional<DecodeOptions>& decode = {}) const;
  std::vector<DecodeResult> predict(
      std::span<const Matrix> features,
      std::span<const std::size_t> input_lengths,
      const std::optional<DecodeOptions>& decode = {}) const;

  MetricsReport evaluate(const SequenceSource& source,
                         const std::set<Metric>& metrics) const;

  // Per-sequence negative log-likelihood, in source order.
  std::vector<double> get_loss(const SequenceSource& source) const;

  // Posteriors trimmed to each sequence's input length.
  std::vector<PosteriorMatrix> get_probas(const SequenceSource& source) const;
  std::vector<PosteriorMatrix> get_probas(
      std::span<const Matrix> features,
      std::span<const std::size_t> input_lengths) const;

  const NetworkSpec& spec() const { return spec_; }
  const ParameterSet& params() const { return params_; }
  // Replaces the parameters after a shape audit.
  void set_params(ParameterSet params);
  const OptimizerState& optimizer() const { return optimizer_; }
  const DecodeOptions& decode_options() const { return decode_; }
  std::uint64_t seed() const { return seed_; }

  // Global-norm gradient clipping for train_on_batch; off by default.
  void set_clip_norm(std::optional<double> clip_norm);
  std::optional<double> clip_norm() const { return clip_norm_; }

 private:
  CtcModel(NetworkSpec spec, ParameterSet params, OptimizerState optimizer,
           DecodeOptions decode, std::uint64_t seed);

  PosteriorMatrix Posteriors(const Matrix& features,
                             std::size_t input_len) const;

  NetworkSpec spec_;
  ParameterSet params_;
  OptimizerState optimizer_;
  DecodeOptions decode_;
  std::uint64_t seed_;
  std::optional<double> clip_norm_;
};

}  // namespace ctckit

#endif  // CTCKIT_MODEL_H_
