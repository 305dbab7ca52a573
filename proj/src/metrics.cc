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

#include "ctckit/metrics.h"

#include <algorithm>
#include <numeric>

namespace ctckit {

std::size_t edit_distance(std::span<const int> a, std::span<const int> b) {
  // Single rolling row over b.
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      const std::size_t substitute = diagonal + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({above + 1, row[j - 1] + 1, substitute});
      diagonal = above;
    }
  }
  return row[b.size()];
}

double label_error_rate(std::span<const int> pred, std::span<const int> truth) {
  if (truth.empty()) return static_cast<double>(pred.size());
  return static_cast<double>(edit_distance(pred, truth)) /
         static_cast<double>(truth.size());
}

double sequence_error_rate(std::span<const LabelSequence> preds,
                           std::span<const LabelSequence> truths) {
  if (preds.size() != truths.size()) {
    throw DomainError("sequence_error_rate: prediction and reference counts "
                      "differ");
  }
  if (preds.empty()) throw DomainError("sequence_error_rate: empty input");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] != truths[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(preds.size());
}

}  // namespace ctckit
