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

#include "ctckit/decode.h"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>

#include "ctckit/lattice.h"
#include "ctckit/log_math.h"

namespace ctckit {
namespace {

void CheckInput(const PosteriorMatrix& probs, std::size_t input_len) {
  if (probs.cols() < 1) throw DomainError("decode: no classes");
  if (input_len > static_cast<std::size_t>(probs.rows())) {
    throw DomainError("decode: input_len " + std::to_string(input_len) +
                      " exceeds frame count " + std::to_string(probs.rows()));
  }
}

bool Ranks(const Hypothesis& a, const Hypothesis& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.labels < b.labels;
}

Matrix LogRows(const PosteriorMatrix& probs, std::size_t begin,
               std::size_t end) {
  Matrix out(end - begin, probs.cols());
  for (std::size_t t = begin; t < end; ++t) {
    for (Eigen::Index k = 0; k < probs.cols(); ++k) {
      out(t - begin, k) = SafeLog(probs(t, k));
    }
  }
  return out;
}

// Depth-first enumeration carrying the collapsed prefix, so each path costs
// O(1) per frame instead of a full collapse.
class Enumerator {
 public:
  Enumerator(const Matrix& log_probs, std::map<LabelSequence, double>* totals)
      : log_probs_(log_probs),
        blank_(static_cast<int>(log_probs.cols()) - 1),
        totals_(totals) {}

  void Run() { Visit(0, -1, 0.0); }

 private:
  void Visit(Eigen::Index t, int previous, double log_prob) {
    if (t == log_probs_.rows()) {
      auto [it, inserted] = totals_->try_emplace(prefix_, log_prob);
      if (!inserted) it->second = LogAdd(it->second, log_prob);
      return;
    }
    for (int k = 0; k <= blank_; ++k) {
      const double lp = log_probs_(t, k);
      if (lp == kLogZero) continue;
      const bool emits = k != blank_ && k != previous;
      if (emits) prefix_.push_back(k);
      Visit(t + 1, k, log_prob + lp);
      if (emits) prefix_.pop_back();
    }
  }

  const Matrix& log_probs_;
  const int blank_;
  std::map<LabelSequence, double>* totals_;
  LabelSequence prefix_;
};

struct BeamEntry {
  double blank = kLogZero;      // mass of paths ending in blank
  double non_blank = kLogZero;  // mass of paths ending in the last label
  double total() const { return LogAdd(blank, non_blank); }
};

using Beam = std::map<LabelSequence, BeamEntry>;

std::vector<Hypothesis> RankBeam(const Beam& beam) {
  std::vector<Hypothesis> ranked;
  ranked.reserve(beam.size());
  for (const auto& [labels, entry] : beam) {
    const double total = entry.total();
    if (total != kLogZero) ranked.push_back({labels, total});
  }
  std::sort(ranked.begin(), ranked.end(), Ranks);
  return ranked;
}

// Prefix search state: forward variables of a prefix over the segment.
struct PrefixNode {
  LabelSequence labels;
  std::vector<double> ends_label;  // paths emitting `labels`, last frame = label
  std::vector<double> ends_blank;  // ... last frame = blank
  double prefix_score = 0.0;       // log P(labeling starts with `labels`)
  double full_score = kLogZero;    // log P(labeling == `labels`)
};

struct PrefixOrder {
  bool operator()(const PrefixNode* a, const PrefixNode* b) const {
    // std::priority_queue pops the maximum; "a < b" means b pops first.
    if (a->prefix_score != b->prefix_score) {
      return a->prefix_score < b->prefix_score;
    }
    return a->labels > b->labels;
  }
};

PrefixNode EmptyPrefix(const Matrix& log_probs, int blank) {
  const std::size_t frames = log_probs.rows();
  PrefixNode node;
  node.ends_label.assign(frames, kLogZero);
  node.ends_blank.resize(frames);
  double acc = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    acc += log_probs(t, blank);
    node.ends_blank[t] = acc;
  }
  node.prefix_score = 0.0;
  node.full_score = node.ends_blank[frames - 1];
  return node;
}

PrefixNode Extend(const PrefixNode& parent, int label, const Matrix& log_probs,
                  int blank) {
  const std::size_t frames = log_probs.rows();
  const bool repeats = !parent.labels.empty() && parent.labels.back() == label;
  PrefixNode node;
  node.labels = parent.labels;
  node.labels.push_back(label);
  node.ends_label.resize(frames);
  node.ends_blank.resize(frames);

  node.ends_label[0] = parent.labels.empty() ? log_probs(0, label) : kLogZero;
  node.ends_blank[0] = kLogZero;
  double prefix = node.ends_label[0];
  for (std::size_t t = 1; t < frames; ++t) {
    const double fresh =
        LogAdd(parent.ends_blank[t - 1],
               repeats ? kLogZero : parent.ends_label[t - 1]);
    node.ends_label[t] =
        log_probs(t, label) + LogAdd(fresh, node.ends_label[t - 1]);
    node.ends_blank[t] = log_probs(t, blank) +
                         LogAdd(node.ends_blank[t - 1], node.ends_label[t - 1]);
    prefix = LogAdd(prefix, log_probs(t, label) + fresh);
  }
  node.prefix_score = prefix;
  node.full_score =
      LogAdd(node.ends_label[frames - 1], node.ends_blank[frames - 1]);
  return node;
}

// Exact best labeling of one segment, or nullopt when the budget runs out.
std::optional<Hypothesis> PrefixSearchSegment(const Matrix& log_probs,
                                              std::size_t node_budget) {
  const int blank = static_cast<int>(log_probs.cols()) - 1;
  // Heap-allocated so frontier pointers stay valid as the store grows.
  std::vector<std::unique_ptr<PrefixNode>> store;
  std::priority_queue<const PrefixNode*, std::vector<const PrefixNode*>,
                      PrefixOrder>
      frontier;

  store.push_back(std::make_unique<PrefixNode>(EmptyPrefix(log_probs, blank)));
  Hypothesis best{{}, store.back()->full_score};
  frontier.push(store.back().get());

  std::size_t expanded = 0;
  while (!frontier.empty()) {
    const PrefixNode* node = frontier.top();
    frontier.pop();
    if (node->prefix_score <= best.score) break;
    if (++expanded > node_budget) return std::nullopt;
    for (int label = 0; label < blank; ++label) {
      auto child =
          std::make_unique<PrefixNode>(Extend(*node, label, log_probs, blank));
      if (child->full_score > best.score ||
          (child->full_score == best.score && child->labels < best.labels)) {
        best = {child->labels, child->full_score};
      }
      if (child->prefix_score > best.score) {
        frontier.push(child.get());
        store.push_back(std::move(child));
      }
    }
  }
  return best;
}

}  // namespace

DecodeResult exact_decode(const PosteriorMatrix& probs, std::size_t input_len,
                          std::size_t top_paths, std::uint64_t budget) {
  CheckInput(probs, input_len);
  if (top_paths == 0) throw DomainError("exact_decode: top_paths must be >= 1");
  const auto classes = static_cast<std::uint64_t>(probs.cols());
  std::uint64_t paths = 1;
  for (std::size_t t = 0; t < input_len; ++t) {
    if (paths > budget / classes) {
      throw BudgetExceeded("exact_decode: " + std::to_string(classes) + "^" +
                           std::to_string(input_len) +
                           " paths exceed the enumeration budget of " +
                           std::to_string(budget));
    }
    paths *= classes;
  }

  std::map<LabelSequence, double> totals;
  Enumerator(LogRows(probs, 0, input_len), &totals).Run();

  DecodeResult result;
  for (auto& [labels, score] : totals) result.paths.push_back({labels, score});
  std::sort(result.paths.begin(), result.paths.end(), Ranks);
  if (result.paths.size() > top_paths) result.paths.resize(top_paths);
  return result;
}

DecodeResult best_path_decode(const PosteriorMatrix& probs,
                              std::size_t input_len) {
  CheckInput(probs, input_len);
  const int blank = static_cast<int>(probs.cols()) - 1;
  Path path(input_len);
  double score = 0.0;
  for (std::size_t t = 0; t < input_len; ++t) {
    int arg = 0;
    for (int k = 1; k <= blank; ++k) {
      if (probs(t, k) > probs(t, arg)) arg = k;
    }
    path[t] = arg;
    score += SafeLog(probs(t, arg));
  }
  DecodeResult result;
  result.paths.push_back({collapse(path, blank), score});
  return result;
}

DecodeResult beam_search_decode(const PosteriorMatrix& probs,
                                std::size_t input_len, std::size_t beam_width,
                                std::size_t top_paths) {
  CheckInput(probs, input_len);
  if (beam_width == 0) throw DomainError("beam_search: beam_width must be >= 1");
  if (top_paths == 0) throw DomainError("beam_search: top_paths must be >= 1");
  if (top_paths > beam_width) {
    throw DomainError("beam_search: top_paths " + std::to_string(top_paths) +
                      " exceeds beam_width " + std::to_string(beam_width));
  }
  const int blank = static_cast<int>(probs.cols()) - 1;

  Beam beam;
  beam[{}].blank = 0.0;
  for (std::size_t t = 0; t < input_len; ++t) {
    Beam next;
    const auto row = probs.row(t);
    const double log_blank = SafeLog(row(blank));
    for (const auto& [prefix, entry] : beam) {
      const double total = entry.total();
      if (log_blank != kLogZero) {
        auto& stay = next[prefix];
        stay.blank = LogAdd(stay.blank, total + log_blank);
      }
      for (int c = 0; c < blank; ++c) {
        const double lp = SafeLog(row(c));
        if (lp == kLogZero) continue;
        LabelSequence extended = prefix;
        extended.push_back(c);
        auto& grown = next[extended];
        if (!prefix.empty() && prefix.back() == c) {
          // A repeat only starts a new label after a blank.
          grown.non_blank = LogAdd(grown.non_blank, entry.blank + lp);
          auto& stay = next[prefix];
          stay.non_blank = LogAdd(stay.non_blank, entry.non_blank + lp);
        } else {
          grown.non_blank = LogAdd(grown.non_blank, total + lp);
        }
      }
    }
    std::vector<Hypothesis> ranked = RankBeam(next);
    if (ranked.size() > beam_width) ranked.resize(beam_width);
    beam.clear();
    for (const auto& hyp : ranked) beam.emplace(hyp.labels, next[hyp.labels]);
  }

  DecodeResult result;
  result.paths = RankBeam(beam);
  if (result.paths.size() > top_paths) result.paths.resize(top_paths);
  return result;
}

DecodeResult prefix_search_decode(const PosteriorMatrix& probs,
                                  std::size_t input_len,
                                  double blank_threshold,
                                  std::size_t node_budget) {
  CheckInput(probs, input_len);
  if (!(blank_threshold > 0.5 && blank_threshold <= 1.0)) {
    throw DomainError("prefix_search: blank_threshold must lie in (0.5, 1]");
  }
  const int blank = static_cast<int>(probs.cols()) - 1;

  DecodeResult result;
  Hypothesis joined{{}, 0.0};
  std::size_t t = 0;
  while (t < input_len) {
    if (probs(t, blank) > blank_threshold) {
      joined.score += SafeLog(probs(t, blank));
      ++t;
      continue;
    }
    std::size_t end = t;
    while (end < input_len && !(probs(end, blank) > blank_threshold)) ++end;

    const Matrix log_probs = LogRows(probs, t, end);
    std::optional<Hypothesis> segment =
        PrefixSearchSegment(log_probs, node_budget);
    if (!segment) {
      const Matrix slice = probs.middleRows(t, end - t);
      DecodeResult fallback =
          beam_search_decode(slice, end - t, kFallbackBeamWidth, 1);
      result.approximate = true;
      segment = fallback.paths.empty() ? Hypothesis{{}, kLogZero}
                                       : fallback.paths.front();
    }
    joined.labels.insert(joined.labels.end(), segment->labels.begin(),
                         segment->labels.end());
    joined.score += segment->score;
    t = end;
  }
  result.paths.push_back(std::move(joined));
  return result;
}

}  // namespace ctckit
