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

// Reference implementations used only by the tests. They are deliberately
// naive and share no code with the library.

#ifndef CTCKIT_TESTS_ORACLES_H_
#define CTCKIT_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "ctckit/types.h"

namespace ctckit::oracle {

inline std::vector<int> Collapse(const std::vector<int>& path, int blank) {
  std::vector<int> out;
  int prev = -1;
  for (int c : path) {
    if (c != prev && c != blank) out.push_back(c);
    prev = c;
  }
  return out;
}

// Probability of every collapsed label sequence, by summing the product of
// per-frame probabilities over all K^T paths.
inline std::map<std::vector<int>, double> SequenceProbabilities(
    const Matrix& probs, std::size_t input_len) {
  const int k = static_cast<int>(probs.cols());
  const int blank = k - 1;
  std::map<std::vector<int>, double> totals;
  std::vector<int> path(input_len, 0);
  while (true) {
    double p = 1.0;
    for (std::size_t t = 0; t < input_len; ++t) p *= probs(t, path[t]);
    totals[Collapse(path, blank)] += p;
    std::size_t pos = 0;
    while (pos < input_len && ++path[pos] == k) path[pos++] = 0;
    if (pos == input_len) break;
  }
  return totals;
}

inline double SequenceProbability(const Matrix& probs, std::size_t input_len,
                                  const std::vector<int>& labels) {
  const auto totals = SequenceProbabilities(probs, input_len);
  const auto it = totals.find(labels);
  return it == totals.end() ? 0.0 : it->second;
}

// Most probable sequence; ties go to the lexicographically smaller one.
inline std::pair<std::vector<int>, double> BestSequence(const Matrix& probs,
                                                        std::size_t input_len) {
  std::pair<std::vector<int>, double> best{{}, -1.0};
  for (const auto& [seq, p] : SequenceProbabilities(probs, input_len)) {
    if (p > best.second) best = {seq, p};
  }
  return best;
}

// Prefix beam search in linear probability space. Each prefix keeps the
// mass of paths ending in blank and ending in its last label; after every
// frame the best `width` prefixes survive (ties to the smaller sequence).
inline std::vector<std::pair<std::vector<int>, double>> BeamSearch(
    const Matrix& probs, std::size_t input_len, std::size_t width) {
  const int blank = static_cast<int>(probs.cols()) - 1;
  using Beams = std::map<std::vector<int>, std::pair<double, double>>;
  auto prune = [width](const Beams& all) {
    std::vector<std::pair<std::vector<int>, double>> ranked;
    for (const auto& [seq, m] : all) ranked.push_back({seq, m.first + m.second});
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > width) ranked.resize(width);
    return ranked;
  };
  Beams beams{{{}, {1.0, 0.0}}};
  for (std::size_t t = 0; t < input_len; ++t) {
    Beams next;
    for (const auto& [seq, m] : beams) {
      const double total = m.first + m.second;
      next[seq].first += total * probs(t, blank);
      if (!seq.empty()) next[seq].second += m.second * probs(t, seq.back());
      for (int c = 0; c < blank; ++c) {
        std::vector<int> ext = seq;
        ext.push_back(c);
        const double from =
            (!seq.empty() && seq.back() == c) ? m.first : total;
        next[ext].second += from * probs(t, c);
      }
    }
    beams.clear();
    for (const auto& [seq, p] : prune(next)) beams[seq] = next[seq];
  }
  return prune(beams);
}

// Levenshtein distance by memoized recursion over suffixes.
inline std::size_t EditDistance(const std::vector<int>& a,
                                const std::vector<int>& b) {
  std::vector<std::vector<long>> memo(a.size() + 1,
                                      std::vector<long>(b.size() + 1, -1));
  std::function<long(std::size_t, std::size_t)> go = [&](std::size_t i,
                                                         std::size_t j) -> long {
    if (i == a.size()) return static_cast<long>(b.size() - j);
    if (j == b.size()) return static_cast<long>(a.size() - i);
    long& m = memo[i][j];
    if (m >= 0) return m;
    if (a[i] == b[j]) return m = go(i + 1, j + 1);
    return m = 1 + std::min({go(i + 1, j), go(i, j + 1), go(i + 1, j + 1)});
  };
  return static_cast<std::size_t>(go(0, 0));
}

inline Matrix RandomPosteriors(std::mt19937_64& rng, std::size_t frames,
                               std::size_t classes) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Matrix m(frames, classes);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t k = 0; k < classes; ++k) m(t, k) = u(rng);
    m.row(t) /= m.row(t).sum();
  }
  return m;
}

inline Matrix RandomMatrix(std::mt19937_64& rng, std::size_t rows,
                           std::size_t cols, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

inline std::vector<int> RandomLabels(std::mt19937_64& rng, std::size_t length,
                                     int num_labels) {
  std::uniform_int_distribution<int> d(0, num_labels - 1);
  std::vector<int> labels(length);
  for (int& l : labels) l = d(rng);
  return labels;
}

// Central difference of f with respect to every entry of x.
inline Matrix NumericGradient(const std::function<double(const Matrix&)>& f,
                              const Matrix& x, double step = 1e-5) {
  Matrix grad(x.rows(), x.cols());
  Matrix probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = probe.data()[i];
    probe.data()[i] = saved + step;
    const double up = f(probe);
    probe.data()[i] = saved - step;
    const double down = f(probe);
    probe.data()[i] = saved;
    grad.data()[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

// |a - n| / max(|a|, |n|, floor). The floor keeps entries that are zero up to
// finite-difference roundoff from dominating.
inline double RelativeError(double analytic, double numeric,
                            double floor = 1e-3) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

inline double MaxRelativeError(const Matrix& analytic, const Matrix& numeric,
                               double floor = 1e-3) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    worst = std::max(worst, RelativeError(analytic.data()[i],
                                          numeric.data()[i], floor));
  }
  return worst;
}

}  // namespace ctckit::oracle

#endif  // CTCKIT_TESTS_ORACLES_H_
