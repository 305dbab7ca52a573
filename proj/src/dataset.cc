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

#include "ctckit/dataset.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <string>

#include "json.hpp"

namespace ctckit {

using nlohmann::json;

Dataset::Dataset(std::size_t feature_dim, std::size_t num_labels)
    : feature_dim_(feature_dim), num_labels_(num_labels) {
  if (feature_dim == 0) throw DataError("dataset: feature_dim must be > 0");
  if (num_labels == 0) throw DataError("dataset: num_labels must be > 0");
}

void Dataset::Add(Sequence sequence) {
  if (sequence.features.rows() < 1) {
    throw DataError("dataset: a sequence needs at least one frame");
  }
  if (sequence.features.cols() != static_cast<Eigen::Index>(feature_dim_)) {
    throw DataError("dataset: sequence has " +
                    std::to_string(sequence.features.cols()) +
                    " features per frame, expected " +
                    std::to_string(feature_dim_));
  }
  for (int label : sequence.labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= num_labels_) {
      throw DataError("dataset: label " + std::to_string(label) +
                      " outside [0, " + std::to_string(num_labels_) + ")");
    }
  }
  sequences_.push_back(std::move(sequence));
}

PaddedBatchSource::PaddedBatchSource(const PaddedBatch& batch) : batch_(batch) {
  batch.Validate();
  for (std::size_t i = 0; i < batch.size(); ++i) {
    labels_.push_back(batch.Labels(i));
  }
}

std::size_t PaddedBatchSource::feature_dim() const {
  return batch_.features.empty()
             ? 0
             : static_cast<std::size_t>(batch_.features[0].cols());
}

namespace {

std::size_t ReadCount(const json& header, const char* key) {
  if (!header.contains(key) || !header[key].is_number_unsigned()) {
    throw DataError(std::string("header must carry a non-negative integer '") +
                    key + "'");
  }
  return header[key].get<std::size_t>();
}

Sequence ParseRecord(const json& record, std::size_t feature_dim) {
  if (!record.is_object() || !record.contains("features") ||
      !record.contains("labels")) {
    throw DataError("record must be an object with 'features' and 'labels'");
  }
  const json& rows = record["features"];
  const json& labels = record["labels"];
  if (!rows.is_array() || !labels.is_array()) {
    throw DataError("'features' and 'labels' must be arrays");
  }
  Sequence seq;
  seq.features.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(feature_dim));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const json& row = rows[t];
    if (!row.is_array() || row.size() != feature_dim) {
      throw DataError("frame " + std::to_string(t) + " does not have " +
                      std::to_string(feature_dim) + " features");
    }
    for (std::size_t k = 0; k < feature_dim; ++k) {
      if (!row[k].is_number()) {
        throw DataError("frame " + std::to_string(t) + " has a non-numeric "
                        "feature");
      }
      seq.features(t, k) = row[k].get<double>();
    }
  }
  for (const json& label : labels) {
    if (!label.is_number_integer()) {
      throw DataError("labels must be integers");
    }
    seq.labels.push_back(label.get<int>());
  }
  return seq;
}

}  // namespace

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open dataset");

  std::optional<Dataset> dataset;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json parsed = json::parse(line);
      if (!dataset) {
        if (!parsed.is_object()) throw DataError("header must be an object");
        dataset.emplace(ReadCount(parsed, "feature_dim"),
                        ReadCount(parsed, "num_labels"));
        continue;
      }
      dataset->Add(ParseRecord(parsed, dataset->feature_dim()));
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " +
                      e.what());
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " +
                      e.what());
    }
  }
  if (!dataset) throw DataError(path.string() + ": missing header line");
  return std::move(*dataset);
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path.string() + ": cannot write dataset");
  out << json{{"feature_dim", dataset.feature_dim()},
              {"num_labels", dataset.num_labels()}}
             .dump()
      << '\n';
  for (const Sequence& seq : dataset.sequences()) {
    json rows = json::array();
    for (Eigen::Index t = 0; t < seq.features.rows(); ++t) {
      json row = json::array();
      for (Eigen::Index k = 0; k < seq.features.cols(); ++k) {
        row.push_back(seq.features(t, k));
      }
      rows.push_back(std::move(row));
    }
    out << json{{"features", std::move(rows)}, {"labels", seq.labels}}.dump()
        << '\n';
  }
  if (!out) throw DataError(path.string() + ": write failed");
}

PaddedBatch make_batch(const SequenceSource& source,
                       std::span<const std::size_t> indices) {
  std::size_t max_frames = 0;
  std::size_t max_labels = 0;
  for (std::size_t i : indices) {
    max_frames = std::max(max_frames, source.input_length(i));
    max_labels = std::max(max_labels, source.labels(i).size());
  }
  PaddedBatch batch;
  const auto width = static_cast<Eigen::Index>(source.feature_dim());
  for (std::size_t i : indices) {
    const auto frames = static_cast<Eigen::Index>(source.input_length(i));
    const LabelSequence& labels = source.labels(i);
    Matrix padded = Matrix::Zero(static_cast<Eigen::Index>(max_frames), width);
    padded.topRows(frames) = source.features(i).topRows(frames);
    batch.features.push_back(std::move(padded));
    std::vector<int> padded_labels(max_labels, kLabelPad);
    std::copy(labels.begin(), labels.end(), padded_labels.begin());
    batch.labels.push_back(std::move(padded_labels));
    batch.input_lengths.push_back(static_cast<std::size_t>(frames));
    batch.label_lengths.push_back(labels.size());
  }
  return batch;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

std::vector<PaddedBatch> make_batches(const SequenceSource& source,
                                      std::size_t batch_size,
                                      std::uint64_t seed) {
  if (batch_size == 0) throw DomainError("batch_size must be >= 1");
  const std::vector<std::size_t> order = shuffled_indices(source.size(), seed);
  std::vector<PaddedBatch> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t count = std::min(batch_size, order.size() - start);
    batches.push_back(
        make_batch(source, std::span(order).subspan(start, count)));
  }
  return batches;
}

Dataset generate_synthetic(const SyntheticOptions& options) {
  const auto [min_frames, max_frames] = options.frames_per_label;
  const auto [min_length, max_length] = options.label_length;
  if (options.num_labels == 0) throw DomainError("synthetic: num_labels == 0");
  if (options.feature_dim < options.num_labels) {
    throw DomainError("synthetic: feature_dim must be >= num_labels");
  }
  if (min_frames == 0 || min_frames > max_frames) {
    throw DomainError("synthetic: invalid frames_per_label range");
  }
  if (min_length == 0 || min_length > max_length) {
    throw DomainError("synthetic: invalid label_length range");
  }
  if (options.num_labels == 1 && max_length > 1) {
    throw DomainError("synthetic: a single label cannot form sequences "
                      "without adjacent repeats");
  }
  if (!(options.sigma >= 0.0)) throw DomainError("synthetic: sigma < 0");

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> length_dist(min_length,
                                                         max_length);
  std::uniform_int_distribution<std::size_t> frames_dist(min_frames,
                                                         max_frames);
  std::uniform_int_distribution<int> first_label(
      0, static_cast<int>(options.num_labels) - 1);
  std::uniform_int_distribution<int> other_label(
      0, std::max(0, static_cast<int>(options.num_labels) - 2));
  std::normal_distribution<double> noise(0.0, options.sigma > 0.0 ? options.sigma
                                                                  : 1.0);

  Dataset dataset(options.feature_dim, options.num_labels);
  for (std::size_t n = 0; n < options.num_sequences; ++n) {
    Sequence seq;
    const std::size_t length = length_dist(rng);
    for (std::size_t i = 0; i < length; ++i) {
      int label = 0;
      if (i == 0) {
        label = first_label(rng);
      } else {
        // Uniform over the labels that differ from the previous one.
        label = other_label(rng);
        if (label >= seq.labels.back()) ++label;
      }
      seq.labels.push_back(label);
    }
    std::vector<std::size_t> durations;
    for (std::size_t i = 0; i < length; ++i) durations.push_back(frames_dist(rng));
    const std::size_t frames =
        std::accumulate(durations.begin(), durations.end(), std::size_t{0});
    seq.features = Matrix::Zero(static_cast<Eigen::Index>(frames),
                                static_cast<Eigen::Index>(options.feature_dim));
    Eigen::Index t = 0;
    for (std::size_t i = 0; i < length; ++i) {
      for (std::size_t k = 0; k < durations[i]; ++k, ++t) {
        seq.features(t, seq.labels[i]) = 1.0;
        if (options.sigma > 0.0) {
          for (Eigen::Index c = 0; c < seq.features.cols(); ++c) {
            seq.features(t, c) += noise(rng);
          }
        }
      }
    }
    dataset.Add(std::move(seq));
  }
  return dataset;
}

}  // namespace ctckit
