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

#include "ctckit/model.h"

#include <chrono>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "ctckit/json_io.h"
#include "ctckit/lattice.h"
#include "ctckit/weights_io.h"

namespace ctckit {

using nlohmann::json;

void DecodeOptions::Validate() const {
  if (beam_width == 0) throw DomainError("decode: beam_width must be >= 1");
  if (top_paths == 0) throw DomainError("decode: top_paths must be >= 1");
  if (!greedy && top_paths > beam_width) {
    throw DomainError("decode: top_paths exceeds beam_width");
  }
}

std::set<Metric> ParseMetrics(std::string_view list) {
  std::set<Metric> metrics;
  std::size_t start = 0;
  while (start <= list.size()) {
    std::size_t end = list.find(',', start);
    if (end == std::string_view::npos) end = list.size();
    const std::string_view name = list.substr(start, end - start);
    if (name == "loss") {
      metrics.insert(Metric::kLoss);
    } else if (name == "ler") {
      metrics.insert(Metric::kLer);
    } else if (name == "ser") {
      metrics.insert(Metric::kSer);
    } else {
      throw DomainError("unknown metric '" + std::string(name) +
                        "' (expected loss, ler or ser)");
    }
    start = end + 1;
  }
  return metrics;
}

std::string_view MetricName(Metric metric) {
  switch (metric) {
    case Metric::kLoss:
      return "loss";
    case Metric::kLer:
      return "ler";
    case Metric::kSer:
      return "ser";
  }
  return "";
}

CtcModel::CtcModel(NetworkSpec spec, ParameterSet params,
                   OptimizerState optimizer, DecodeOptions decode,
                   std::uint64_t seed)
    : spec_(std::move(spec)),
      params_(std::move(params)),
      optimizer_(std::move(optimizer)),
      decode_(decode),
      seed_(seed) {}

CtcModel CtcModel::compile(const NetworkSpec& spec, OptimizerKind optimizer,
                           double learning_rate, const DecodeOptions& decode,
                           std::uint64_t seed) {
  spec.Validate();
  decode.Validate();
  ParameterSet params = net::init_params(spec, seed);
  audit_shapes(spec, params);
  OptimizerState state = make_optimizer(optimizer, learning_rate, params);
  return CtcModel(spec, std::move(params), std::move(state), decode, seed);
}

CtcModel CtcModel::compile(const NetworkSpec& spec,
                           std::string_view optimizer_name,
                           double learning_rate, const DecodeOptions& decode,
                           std::uint64_t seed) {
  return compile(spec, ParseOptimizerKind(optimizer_name), learning_rate,
                 decode, seed);
}

void CtcModel::set_params(ParameterSet params) {
  audit_shapes(spec_, params);
  params_ = std::move(params);
}

void CtcModel::set_clip_norm(std::optional<double> clip_norm) {
  if (clip_norm && !(*clip_norm > 0.0)) {
    throw DomainError("clip norm must be positive");
  }
  clip_norm_ = clip_norm;
}

PosteriorMatrix CtcModel::Posteriors(const Matrix& features,
                                     std::size_t input_len) const {
  net::ForwardResult out = net::forward(spec_, params_, features, input_len);
  return out.probs.topRows(static_cast<Eigen::Index>(input_len));
}

BatchGradients CtcModel::compute_gradients(const PaddedBatch& batch) const {
  batch.Validate();
  if (batch.size() == 0) throw DomainError("empty batch");
  BatchGradients result;
  result.grads = zeros_like(params_);
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    try {
      net::ForwardResult out =
          net::forward(spec_, params_, batch.features[i], batch.input_lengths[i]);
      LossAndGradient lg = ctc_gradient(out.logits, batch.labels[i],
                                        batch.input_lengths[i],
                                        batch.label_lengths[i]);
      lg.gradient *= scale;
      ParameterSet grads = net::backward(spec_, params_, out.cache, lg.gradient);
      for (auto& [name, g] : result.grads) g += grads.at(name);
      result.losses.push_back(lg.loss);
    } catch (const InfeasibleAlignment& e) {
      throw e.WithIndex(i);
    } catch (const NumericError& e) {
      throw NumericError("sequence " + std::to_string(i) + ": " + e.what());
    } catch (const DomainError& e) {
      throw DomainError("sequence " + std::to_string(i) + ": " + e.what());
    }
  }
  result.mean_loss =
      std::accumulate(result.losses.begin(), result.losses.end(), 0.0) * scale;
  return result;
}

double CtcModel::train_on_batch(const PaddedBatch& batch) {
  BatchGradients g = compute_gradients(batch);
  if (clip_norm_) clip_global_norm(g.grads, *clip_norm_);
  optimizer_step(optimizer_, params_, g.grads);
  return g.mean_loss;
}

TrainHistory CtcModel::fit(const SequenceSource& train,
                           const FitOptions& options) {
  if (options.batch_size == 0) throw DomainError("fit: batch_size must be >= 1");
  if (train.size() == 0 && options.epochs > 0) {
    throw DomainError("fit: empty training set");
  }
  TrainHistory history;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    const std::vector<std::size_t> order =
        shuffled_indices(train.size(), options.shuffle_seed + epoch);
    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size();
         start += options.batch_size, ++batch_index) {
      const auto members = std::span(order).subspan(
          start, std::min(options.batch_size, order.size() - start));
      const PaddedBatch batch = make_batch(train, members);
      const std::string where = "epoch " + std::to_string(epoch + 1) +
                                ", batch " + std::to_string(batch_index) +
                                ": ";
      try {
        loss_sum += train_on_batch(batch) * static_cast<double>(members.size());
      } catch (const InfeasibleAlignment& e) {
        throw e.WithIndex(members[*e.sequence_index()]);
      } catch (const NonFiniteGradient& e) {
        throw NonFiniteGradient(where + e.what());
      } catch (const NumericError& e) {
        throw NumericError(where + e.what());
      } catch (const DomainError& e) {
        throw DomainError(where + e.what());
      }
    }
    EpochRecord record;
    record.train_loss = loss_sum / static_cast<double>(train.size());
    if (options.validation != nullptr && options.validation->size() > 0) {
      const std::vector<double> losses = get_loss(*options.validation);
      record.validation_loss =
          std::accumulate(losses.begin(), losses.end(), 0.0) /
          static_cast<double>(losses.size());
    }
    if (options.checkpoint_dir) {
      std::filesystem::create_directories(*options.checkpoint_dir);
      write_weights(*options.checkpoint_dir /
                        ("weights.epoch" + std::to_string(epoch + 1) + ".ctcw"),
                    params_);
    }
    record.seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - started)
                         .count();
    if (options.on_epoch) options.on_epoch(epoch + 1, record);
    history.epochs.push_back(record);
  }
  return history;
}

std::vector<DecodeResult> CtcModel::predict(
    std::span<const Matrix> features, std::span<const std::size_t> input_lengths,
    const std::optional<DecodeOptions>& decode) const {
  if (features.size() != input_lengths.size()) {
    throw DomainError("predict: features and input lengths differ in count");
  }
  const DecodeOptions& options = decode ? *decode : decode_;
  options.Validate();
  std::vector<DecodeResult> results;
  results.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    const PosteriorMatrix probs = Posteriors(features[i], input_lengths[i]);
    if (options.greedy) {
      results.push_back(best_path_decode(probs, input_lengths[i]));
    } else {
      results.push_back(beam_search_decode(probs, input_lengths[i],
                                           options.beam_width,
                                           options.top_paths));
    }
  }
  return results;
}

std::vector<DecodeResult> CtcModel::predict(
    const SequenceSource& source,
    const std::optional<DecodeOptions>& decode) const {
  std::vector<Matrix> features;
  std::vector<std::size_t> lengths;
  features.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    const std::size_t len = source.input_length(i);
    features.push_back(source.features(i).topRows(static_cast<Eigen::Index>(len)));
    lengths.push_back(len);
  }
  return predict(features, lengths, decode);
}

std::vector<double> CtcModel::get_loss(const SequenceSource& source) const {
  std::vector<double> losses;
  losses.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    const std::size_t len = source.input_length(i);
    const LabelSequence& labels = source.labels(i);
    try {
      losses.push_back(ctc_loss(Posteriors(source.features(i), len), labels,
                                len, labels.size()));
    } catch (const InfeasibleAlignment& e) {
      throw e.WithIndex(i);
    }
  }
  return losses;
}

std::vector<PosteriorMatrix> CtcModel::get_probas(
    std::span<const Matrix> features,
    std::span<const std::size_t> input_lengths) const {
  if (features.size() != input_lengths.size()) {
    throw DomainError("get_probas: features and input lengths differ in count");
  }
  std::vector<PosteriorMatrix> out;
  out.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    out.push_back(Posteriors(features[i], input_lengths[i]));
  }
  return out;
}

std::vector<PosteriorMatrix> CtcModel::get_probas(
    const SequenceSource& source) const {
  std::vector<PosteriorMatrix> out;
  out.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    out.push_back(Posteriors(source.features(i), source.input_length(i)));
  }
  return out;
}

MetricsReport CtcModel::evaluate(const SequenceSource& source,
                                 const std::set<Metric>& metrics) const {
  if (source.size() == 0) throw DomainError("evaluate: empty dataset");
  MetricsReport report;
  if (metrics.contains(Metric::kLoss)) {
    const std::vector<double> losses = get_loss(source);
    report.loss = std::accumulate(losses.begin(), losses.end(), 0.0) /
                  static_cast<double>(losses.size());
  }
  if (metrics.contains(Metric::kLer) || metrics.contains(Metric::kSer)) {
    const std::vector<DecodeResult> decoded = predict(source);
    std::vector<LabelSequence> preds;
    std::vector<LabelSequence> truths;
    for (std::size_t i = 0; i < source.size(); ++i) {
      preds.push_back(decoded[i].paths.empty() ? LabelSequence{}
                                               : decoded[i].best().labels);
      truths.push_back(source.labels(i));
    }
    if (metrics.contains(Metric::kLer)) {
      std::vector<double> ler;
      for (std::size_t i = 0; i < preds.size(); ++i) {
        ler.push_back(label_error_rate(preds[i], truths[i]));
      }
      report.ler_mean = std::accumulate(ler.begin(), ler.end(), 0.0) /
                        static_cast<double>(ler.size());
      report.ler = std::move(ler);
    }
    if (metrics.contains(Metric::kSer)) {
      report.ser = sequence_error_rate(preds, truths);
    }
  }
  return report;
}

namespace {

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text << '\n';
  if (!out) throw DataError(path.string() + ": write failed");
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string(), "missing or unreadable");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw LoadError(path.string(), e.what());
  }
}

}  // namespace

void CtcModel::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  WriteText(dir / kArchitectureFile, ToJson(spec_).dump(2));
  const json hyper{{"optimizer", std::string(OptimizerKindName(optimizer_.kind))},
                   {"learning_rate", optimizer_.learning_rate},
                   {"decode", ToJson(decode_)},
                   {"seed", seed_}};
  WriteText(dir / kHyperparamsFile, hyper.dump(2));
  write_weights(dir / kWeightsFile, params_);
}

CtcModel CtcModel::load(const std::filesystem::path& dir,
                        const std::optional<std::filesystem::path>& weights) {
  const auto arch_path = dir / kArchitectureFile;
  const auto hyper_path = dir / kHyperparamsFile;
  NetworkSpec spec;
  try {
    spec = NetworkSpecFromJson(ReadJsonFile(arch_path));
  } catch (const LoadError&) {
    throw;
  } catch (const Error& e) {
    throw LoadError(arch_path.string(), e.what());
  }

  const json hyper = ReadJsonFile(hyper_path);
  OptimizerKind kind;
  double learning_rate = 0.0;
  DecodeOptions decode;
  std::uint64_t seed = 0;
  try {
    if (!hyper.is_object()) throw DataError("not a JSON object");
    kind = ParseOptimizerKind(hyper.at("optimizer").get<std::string>());
    learning_rate = hyper.at("learning_rate").get<double>();
    decode = DecodeOptionsFromJson(hyper.at("decode"));
    seed = hyper.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw LoadError(hyper_path.string(), e.what());
  } catch (const Error& e) {
    throw LoadError(hyper_path.string(), e.what());
  }

  CtcModel model = compile(spec, kind, learning_rate, decode, seed);
  std::optional<std::filesystem::path> source = weights;
  if (!source && std::filesystem::exists(dir / kWeightsFile)) {
    source = dir / kWeightsFile;
  }
  if (source) {
    ParameterSet params = read_weights(*source);
    try {
      audit_shapes(spec, params);
    } catch (const DomainError& e) {
      throw LoadError(source->string(), e.what());
    }
    model.params_ = std::move(params);
    model.optimizer_ = make_optimizer(kind, learning_rate, model.params_);
  }
  return model;
}

}  // namespace ctckit
