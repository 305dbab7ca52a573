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

#ifndef CTCKIT_METRICS_H_
#define CTCKIT_METRICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ctckit/types.h"

namespace ctckit {

struct MetricsReport {
  std::optional<double> loss;               // mean NLL over the dataset
  std::optional<std::vector<double>> ler;   // one entry per sequence
  std::optional<double> ler_mean;
  std::optional<double> ser;

  bool operator==(const MetricsReport&) const = default;
};

// Unit-cost Levenshtein distance.
std::size_t edit_distance(std::span<const int> a, std::span<const int> b);

// edit_distance(pred, truth) / |truth|. With an empty truth: 0 for an empty
// prediction, |pred| otherwise.
double label_error_rate(std::span<const int> pred, std::span<const int> truth);

// Fraction of positions where the prediction differs from the reference.
// Throws DomainError for empty or mismatched lists.
double sequence_error_rate(std::span<const LabelSequence> preds,
                           std::span<const LabelSequence> truths);

}  // namespace ctckit

#endif  // CTCKIT_METRICS_H_
