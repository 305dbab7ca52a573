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

#include "ctckit/lattice.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "ctckit/log_math.h"

namespace ctckit {

InfeasibleAlignment::InfeasibleAlignment(
    std::size_t input_len, std::size_t required,
    std::optional<std::size_t> sequence_index)
    : Error((sequence_index ? "sequence " + std::to_string(*sequence_index) +
                                  ": "
                            : std::string()) +
            "infeasible alignment: " + std::to_string(required) +
            " frames required, " + std::to_string(input_len) + " available"),
      input_len_(input_len),
      required_(required),
      sequence_index_(sequence_index) {}

double log_sum_exp(std::span<const double> values) {
  double max_value = kLogZero;
  for (double v : values) {
    if (std::isnan(v)) throw DomainError("log_sum_exp: NaN input");
    max_value = std::max(max_value, v);
  }
  if (max_value == kLogZero) return kLogZero;
  if (std::isinf(max_value)) return max_value;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max_value);
  return max_value + std::log(sum);
}

LabelSequence collapse(std::span<const int> path, int blank_index) {
  LabelSequence out;
  int previous = -1;
  for (int symbol : path) {
    if (symbol < 0 || symbol > blank_index) {
      throw DomainError("collapse: symbol " + std::to_string(symbol) +
                        " outside [0, " + std::to_string(blank_index) + "]");
    }
    if (symbol != previous && symbol != blank_index) out.push_back(symbol);
    previous = symbol;
  }
  return out;
}

ExtendedLabels extend_with_blanks(std::span<const int> labels,
                                  int blank_index) {
  ExtendedLabels ext;
  ext.reserve(2 * labels.size() + 1);
  for (int label : labels) {
    ext.push_back(blank_index);
    ext.push_back(label);
  }
  ext.push_back(blank_index);
  return ext;
}

std::size_t required_frames(std::span<const int> labels) {
  std::size_t required = labels.size();
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (labels[i] == labels[i - 1]) ++required;
  }
  return required;
}

namespace {

// Checks ext against the posterior width and returns its label part.
LabelSequence CheckExtended(const ExtendedLabels& ext, Eigen::Index classes) {
  const int blank = static_cast<int>(classes) - 1;
  if (ext.empty() || ext.size() % 2 == 0) {
    throw DomainError("extended labels must have odd length");
  }
  LabelSequence labels;
  for (std::size_t s = 0; s < ext.size(); ++s) {
    if (s % 2 == 0) {
      if (ext[s] != blank) {
        throw DomainError("extended labels: even position is not blank");
      }
    } else {
      if (ext[s] < 0 || ext[s] >= blank) {
        throw DomainError("label " + std::to_string(ext[s]) +
                          " outside [0, " + std::to_string(blank) + ")");
      }
      labels.push_back(ext[s]);
    }
  }
  return labels;
}

void CheckFrames(Eigen::Index rows, Eigen::Index cols, std::size_t input_len) {
  if (cols < 1) throw DomainError("posterior matrix has no classes");
  if (input_len == 0) throw DomainError("input_len must be at least 1");
  if (input_len > static_cast<std::size_t>(rows)) {
    throw DomainError("input_len " + std::to_string(input_len) +
                      " exceeds frame count " + std::to_string(rows));
  }
}

void CheckFeasible(std::span<const int> labels, std::size_t input_len) {
  const std::size_t required = required_frames(labels);
  if (input_len < required) throw InfeasibleAlignment(input_len, required);
}

Matrix LogOfRows(const PosteriorMatrix& probs, std::size_t input_len) {
  Matrix out(input_len, probs.cols());
  for (std::size_t t = 0; t < input_len; ++t) {
    for (Eigen::Index k = 0; k < probs.cols(); ++k) {
      out(t, k) = SafeLog(probs(t, k));
    }
  }
  return out;
}

bool SkipAllowed(const ExtendedLabels& ext, std::size_t from, std::size_t to,
                 int blank) {
  return ext[to] != blank && ext[to] != ext[from];
}

// Both recursions read log-emissions; log_probs holds exactly input_len rows.
Matrix ForwardLog(const Matrix& log_probs, const ExtendedLabels& ext,
                  double* log_likelihood) {
  const Eigen::Index frames = log_probs.rows();
  const std::size_t states = ext.size();
  const int blank = static_cast<int>(log_probs.cols()) - 1;
  Matrix alpha = Matrix::Constant(frames, states, kLogZero);

  alpha(0, 0) = log_probs(0, ext[0]);
  if (states > 1) alpha(0, 1) = log_probs(0, ext[1]);

  for (Eigen::Index t = 1; t < frames; ++t) {
    for (std::size_t s = 0; s < states; ++s) {
      double sum = alpha(t - 1, s);
      if (s >= 1) sum = LogAdd(sum, alpha(t - 1, s - 1));
      if (s >= 2 && SkipAllowed(ext, s - 2, s, blank)) {
        sum = LogAdd(sum, alpha(t - 1, s - 2));
      }
      alpha(t, s) = sum == kLogZero ? kLogZero : sum + log_probs(t, ext[s]);
    }
  }

  double ll = alpha(frames - 1, states - 1);
  if (states > 1) ll = LogAdd(ll, alpha(frames - 1, states - 2));
  *log_likelihood = ll;
  return alpha;
}

Matrix BackwardLog(const Matrix& log_probs, const ExtendedLabels& ext,
                   double* log_likelihood) {
  const Eigen::Index frames = log_probs.rows();
  const std::size_t states = ext.size();
  const int blank = static_cast<int>(log_probs.cols()) - 1;
  Matrix beta = Matrix::Constant(frames, states, kLogZero);

  beta(frames - 1, states - 1) = 0.0;
  if (states > 1) beta(frames - 1, states - 2) = 0.0;

  for (Eigen::Index t = frames - 2; t >= 0; --t) {
    for (std::size_t s = 0; s < states; ++s) {
      double sum = beta(t + 1, s) + log_probs(t + 1, ext[s]);
      if (s + 1 < states) {
        sum = LogAdd(sum, beta(t + 1, s + 1) + log_probs(t + 1, ext[s + 1]));
      }
      if (s + 2 < states && SkipAllowed(ext, s, s + 2, blank)) {
        sum = LogAdd(sum, beta(t + 1, s + 2) + log_probs(t + 1, ext[s + 2]));
      }
      beta(t, s) = sum;
    }
  }

  double ll = beta(0, 0) + log_probs(0, ext[0]);
  if (states > 1) ll = LogAdd(ll, beta(0, 1) + log_probs(0, ext[1]));
  *log_likelihood = ll;
  return beta;
}

void CheckNormalized(const PosteriorMatrix& probs, std::size_t input_len) {
  for (std::size_t t = 0; t < input_len; ++t) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < probs.cols(); ++k) {
      const double p = probs(t, k);
      if (!(p >= 0.0)) {
        throw DomainError("frame " + std::to_string(t) +
                          ": negative or NaN probability");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw DomainError("frame " + std::to_string(t) +
                        ": probabilities sum to " + std::to_string(sum));
    }
  }
}

std::span<const int> LabelPrefix(std::span<const int> labels,
                                 std::size_t label_len) {
  if (label_len > labels.size()) {
    throw DomainError("label_len " + std::to_string(label_len) +
                      " exceeds label buffer of " +
                      std::to_string(labels.size()));
  }
  return labels.first(label_len);
}

}  // namespace

Lattice ctc_forward(const PosteriorMatrix& probs, const ExtendedLabels& ext,
                    std::size_t input_len) {
  CheckFrames(probs.rows(), probs.cols(), input_len);
  CheckFeasible(CheckExtended(ext, probs.cols()), input_len);
  Lattice lattice;
  lattice.alpha =
      ForwardLog(LogOfRows(probs, input_len), ext, &lattice.log_likelihood);
  return lattice;
}

Lattice ctc_backward(const PosteriorMatrix& probs, const ExtendedLabels& ext,
                     std::size_t input_len) {
  CheckFrames(probs.rows(), probs.cols(), input_len);
  CheckFeasible(CheckExtended(ext, probs.cols()), input_len);
  Lattice lattice;
  lattice.beta =
      BackwardLog(LogOfRows(probs, input_len), ext, &lattice.log_likelihood);
  return lattice;
}

double ctc_loss(const PosteriorMatrix& probs, std::span<const int> labels,
                std::size_t input_len, std::size_t label_len) {
  CheckFrames(probs.rows(), probs.cols(), input_len);
  CheckNormalized(probs, input_len);
  const auto used = LabelPrefix(labels, label_len);
  const int blank = static_cast<int>(probs.cols()) - 1;
  return -ctc_forward(probs, extend_with_blanks(used, blank), input_len)
              .log_likelihood;
}

LossAndGradient ctc_gradient(const Matrix& logits, std::span<const int> labels,
                             std::size_t input_len, std::size_t label_len) {
  CheckFrames(logits.rows(), logits.cols(), input_len);
  const auto used = LabelPrefix(labels, label_len);
  const int blank = static_cast<int>(logits.cols()) - 1;
  const ExtendedLabels ext = extend_with_blanks(used, blank);
  CheckFeasible(CheckExtended(ext, logits.cols()), input_len);

  const Matrix log_probs = log_softmax_rows(logits.topRows(input_len));
  double ll_forward = 0.0;
  double ll_backward = 0.0;
  const Matrix alpha = ForwardLog(log_probs, ext, &ll_forward);
  const Matrix beta = BackwardLog(log_probs, ext, &ll_backward);
  if (!std::isfinite(ll_forward)) {
    throw NumericError("ctc_gradient: sequence log-likelihood is not finite");
  }

  LossAndGradient out;
  out.loss = -ll_forward;
  out.gradient = Matrix::Zero(logits.rows(), logits.cols());
  std::vector<double> occupancy(logits.cols());
  for (std::size_t t = 0; t < input_len; ++t) {
    std::fill(occupancy.begin(), occupancy.end(), kLogZero);
    for (std::size_t s = 0; s < ext.size(); ++s) {
      occupancy[ext[s]] = LogAdd(occupancy[ext[s]], alpha(t, s) + beta(t, s));
    }
    for (Eigen::Index k = 0; k < logits.cols(); ++k) {
      out.gradient(t, k) = std::exp(log_probs(t, k)) -
                           std::exp(occupancy[k] - ll_forward);
    }
  }
  return out;
}

std::vector<double> ctc_loss_batch(const PaddedBatch& batch) {
  batch.Validate();
  std::vector<double> losses;
  losses.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    try {
      losses.push_back(ctc_loss(batch.features[i], batch.labels[i],
                                batch.input_lengths[i],
                                batch.label_lengths[i]));
    } catch (const InfeasibleAlignment& e) {
      throw e.WithIndex(i);
    } catch (const DomainError& e) {
      throw DomainError("sequence " + std::to_string(i) + ": " + e.what());
    }
  }
  return losses;
}

Matrix log_softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const double max_value = logits.row(t).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index k = 0; k < logits.cols(); ++k) {
      sum += std::exp(logits(t, k) - max_value);
    }
    const double log_norm = max_value + std::log(sum);
    for (Eigen::Index k = 0; k < logits.cols(); ++k) {
      out(t, k) = logits(t, k) - log_norm;
    }
  }
  return out;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const double max_value = logits.row(t).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index k = 0; k < logits.cols(); ++k) {
      out(t, k) = std::exp(logits(t, k) - max_value);
      sum += out(t, k);
    }
    out.row(t) /= sum;
  }
  return out;
}

}  // namespace ctckit
