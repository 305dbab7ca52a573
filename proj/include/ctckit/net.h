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

// A small recurrent network: a stack of (optionally bidirectional) tanh-RNN
// or LSTM layers followed by a per-frame affine layer and softmax. The last
// output class is the CTC blank.
//
// Parameters are named "layer<i>.<fwd|bwd>.<tensor>" for recurrent layers
// and "output.W" / "output.b" for the affine layer. Tanh-RNN tensors are W
// (input weights), U (recurrent weights) and b. LSTM tensors exist once per
// gate, suffixed _i, _f, _g, _o (input, forget, cell candidate, output).

#ifndef CTCKIT_NET_H_
#define CTCKIT_NET_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ctckit/types.h"

namespace ctckit {

enum class LayerKind { kRnn, kLstm };

LayerKind ParseLayerKind(std::string_view name);
std::string_view LayerKindName(LayerKind kind);

struct LayerSpec {
  LayerKind kind = LayerKind::kLstm;
  std::size_t units = 0;  // per direction
  bool bidirectional = true;

  std::size_t output_width() const { return bidirectional ? 2 * units : units; }
  bool operator==(const LayerSpec&) const = default;
};

struct NetworkSpec {
  std::size_t feature_dim = 0;
  std::vector<LayerSpec> layers;
  std::size_t num_labels = 0;

  // Labels plus the blank.
  std::size_t num_classes() const { return num_labels + 1; }
  // Throws DomainError unless every width is positive and there is at least
  // one recurrent layer.
  void Validate() const;
  bool operator==(const NetworkSpec&) const = default;
};

// Ordered by name, which is also the serialization and RNG draw order.
using ParameterSet = std::map<std::string, Matrix>;

struct TensorShape {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  int rank = 2;  // biases are rank 1, stored as rows x 1
};

std::map<std::string, TensorShape> parameter_shapes(const NetworkSpec& spec);

// Throws DomainError if `params` does not hold exactly the tensors of
// `spec` with the expected shapes.
void audit_shapes(const NetworkSpec& spec, const ParameterSet& params);

ParameterSet zeros_like(const ParameterSet& params);
std::size_t parameter_count(const ParameterSet& params);

namespace net {

// Glorot-uniform weights, zero biases, forget-gate biases at 1.
ParameterSet init_params(const NetworkSpec& spec, std::uint64_t seed);

struct DirectionCache {
  Matrix hidden;  // input_len x units, indexed by frame
  Matrix cell;    // LSTM only
  Matrix gates;   // LSTM only: input_len x 4*units, activated i|f|g|o
};

struct LayerCache {
  Matrix input;  // input_len x layer input width
  DirectionCache forward;
  DirectionCache backward;  // empty for unidirectional layers
};

struct ForwardCache {
  std::size_t input_len = 0;
  std::size_t total_frames = 0;
  std::vector<LayerCache> layers;
  Matrix top;  // input_len x last layer output width
};

struct ForwardResult {
  Matrix logits;          // total_frames x K
  PosteriorMatrix probs;  // total_frames x K
  // Rows at or past input_len are masked: they carry the output bias only
  // and do not depend on the padded feature frames.
  std::size_t input_len = 0;
  ForwardCache cache;
};

ForwardResult forward(const NetworkSpec& spec, const ParameterSet& params,
                      const Matrix& features, std::size_t input_len);

// Gradients of every parameter given d(loss)/d(logits). Only the first
// cache.input_len rows of grad_logits are read.
ParameterSet backward(const NetworkSpec& spec, const ParameterSet& params,
                      const ForwardCache& cache, const Matrix& grad_logits);

}  // namespace net
}  // namespace ctckit

#endif  // CTCKIT_NET_H_
