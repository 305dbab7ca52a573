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

#ifndef CTCKIT_OPTIMIZER_H_
#define CTCKIT_OPTIMIZER_H_

#include <cstdint>
#include <string_view>

#include "ctckit/net.h"

namespace ctckit {

enum class OptimizerKind { kSgd, kAdam };

// Accepts "sgd" and "adam" (case-insensitive). Throws DomainError otherwise.
OptimizerKind ParseOptimizerKind(std::string_view name);
std::string_view OptimizerKindName(OptimizerKind kind);

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  ParameterSet first_moment;   // Adam only
  ParameterSet second_moment;  // Adam only

  bool operator==(const OptimizerState&) const;
};

OptimizerState make_optimizer(OptimizerKind kind, double learning_rate,
                              const ParameterSet& params);

// Applies one update in place. On a non-finite gradient entry throws
// NonFiniteGradient before touching params or state. Single writer.
void optimizer_step(OptimizerState& state, ParameterSet& params,
                    const ParameterSet& grads);

double global_norm(const ParameterSet& grads);

// Rescales grads so their global L2 norm is at most max_norm. Returns the
// norm before clipping.
double clip_global_norm(ParameterSet& grads, double max_norm);

}  // namespace ctckit

#endif  // CTCKIT_OPTIMIZER_H_
