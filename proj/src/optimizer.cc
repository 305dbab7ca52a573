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

#include "ctckit/optimizer.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace ctckit {

OptimizerKind ParseOptimizerKind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "sgd") return OptimizerKind::kSgd;
  if (lower == "adam") return OptimizerKind::kAdam;
  throw DomainError("unknown optimizer '" + std::string(name) +
                    "' (expected sgd or adam)");
}

std::string_view OptimizerKindName(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

bool OptimizerState::operator==(const OptimizerState& other) const {
  auto same = [](const ParameterSet& a, const ParameterSet& b) {
    if (a.size() != b.size()) return false;
    for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
      if (ia->first != ib->first || ia->second.rows() != ib->second.rows() ||
          ia->second.cols() != ib->second.cols() || ia->second != ib->second) {
        return false;
      }
    }
    return true;
  };
  return kind == other.kind && learning_rate == other.learning_rate &&
         beta1 == other.beta1 && beta2 == other.beta2 &&
         epsilon == other.epsilon && step == other.step &&
         same(first_moment, other.first_moment) &&
         same(second_moment, other.second_moment);
}

OptimizerState make_optimizer(OptimizerKind kind, double learning_rate,
                              const ParameterSet& params) {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw DomainError("learning rate must be finite and non-negative");
  }
  OptimizerState state;
  state.kind = kind;
  state.learning_rate = learning_rate;
  if (kind == OptimizerKind::kAdam) {
    state.first_moment = zeros_like(params);
    state.second_moment = zeros_like(params);
  }
  return state;
}

void optimizer_step(OptimizerState& state, ParameterSet& params,
                    const ParameterSet& grads) {
  if (grads.size() != params.size()) {
    throw DomainError("optimizer: gradient and parameter sets differ");
  }
  for (const auto& [name, value] : params) {
    auto it = grads.find(name);
    if (it == grads.end() || it->second.rows() != value.rows() ||
        it->second.cols() != value.cols()) {
      throw DomainError("optimizer: gradient for " + name +
                        " is missing or misshapen");
    }
    if (!it->second.allFinite()) {
      throw NonFiniteGradient("optimizer: non-finite gradient in " + name);
    }
  }
  if (state.kind == OptimizerKind::kAdam &&
      (state.first_moment.size() != params.size() ||
       state.second_moment.size() != params.size())) {
    throw DomainError("optimizer: moment tensors do not match parameters");
  }

  ++state.step;
  if (state.kind == OptimizerKind::kSgd) {
    for (auto& [name, value] : params) {
      value -= state.learning_rate * grads.at(name);
    }
    return;
  }

  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (auto& [name, value] : params) {
    const Matrix& g = grads.at(name);
    Matrix& m = state.first_moment.at(name);
    Matrix& v = state.second_moment.at(name);
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
    for (Eigen::Index r = 0; r < value.rows(); ++r) {
      for (Eigen::Index c = 0; c < value.cols(); ++c) {
        const double m_hat = m(r, c) / correction1;
        const double v_hat = v(r, c) / correction2;
        value(r, c) -=
            state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
      }
    }
  }
}

double global_norm(const ParameterSet& grads) {
  double sum = 0.0;
  for (const auto& [name, g] : grads) sum += g.squaredNorm();
  return std::sqrt(sum);
}

double clip_global_norm(ParameterSet& grads, double max_norm) {
  if (!(max_norm > 0.0)) throw DomainError("clip norm must be positive");
  const double norm = global_norm(grads);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& [name, g] : grads) g *= scale;
  }
  return norm;
}

}  // namespace ctckit
