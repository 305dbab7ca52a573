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

#include "ctckit/net.h"

#include <array>
#include <cmath>
#include <random>

#include "ctckit/lattice.h"

namespace ctckit {
namespace {

constexpr std::array<const char*, 4> kGates = {"i", "f", "g", "o"};

std::string Prefix(std::size_t layer, bool reverse) {
  return "layer" + std::to_string(layer) + (reverse ? ".bwd." : ".fwd.");
}

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::size_t LayerInputWidth(const NetworkSpec& spec, std::size_t layer) {
  return layer == 0 ? spec.feature_dim : spec.layers[layer - 1].output_width();
}

// Frame visited at `step` of a pass over `frames` frames.
Eigen::Index FrameAt(Eigen::Index step, Eigen::Index frames, bool reverse) {
  return reverse ? frames - 1 - step : step;
}

}  // namespace

LayerKind ParseLayerKind(std::string_view name) {
  if (name == "rnn") return LayerKind::kRnn;
  if (name == "lstm") return LayerKind::kLstm;
  throw DomainError("unknown layer kind '" + std::string(name) + "'");
}

std::string_view LayerKindName(LayerKind kind) {
  return kind == LayerKind::kRnn ? "rnn" : "lstm";
}

void NetworkSpec::Validate() const {
  if (feature_dim == 0) throw DomainError("network: feature_dim must be > 0");
  if (num_labels == 0) throw DomainError("network: num_labels must be > 0");
  if (layers.empty()) {
    throw DomainError("network: at least one recurrent layer is required");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].units == 0) {
      throw DomainError("network: layer " + std::to_string(l) +
                        " has zero units");
    }
  }
}

std::map<std::string, TensorShape> parameter_shapes(const NetworkSpec& spec) {
  spec.Validate();
  std::map<std::string, TensorShape> shapes;
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    const LayerSpec& layer = spec.layers[l];
    const auto in = static_cast<Eigen::Index>(LayerInputWidth(spec, l));
    const auto units = static_cast<Eigen::Index>(layer.units);
    for (bool reverse : {false, true}) {
      if (reverse && !layer.bidirectional) continue;
      const std::string prefix = Prefix(l, reverse);
      if (layer.kind == LayerKind::kRnn) {
        shapes[prefix + "W"] = {units, in, 2};
        shapes[prefix + "U"] = {units, units, 2};
        shapes[prefix + "b"] = {units, 1, 1};
      } else {
        for (const char* gate : kGates) {
          shapes[prefix + "W_" + gate] = {units, in, 2};
          shapes[prefix + "U_" + gate] = {units, units, 2};
          shapes[prefix + "b_" + gate] = {units, 1, 1};
        }
      }
    }
  }
  const auto top = static_cast<Eigen::Index>(spec.layers.back().output_width());
  const auto classes = static_cast<Eigen::Index>(spec.num_classes());
  shapes["output.W"] = {classes, top, 2};
  shapes["output.b"] = {classes, 1, 1};
  return shapes;
}

void audit_shapes(const NetworkSpec& spec, const ParameterSet& params) {
  const auto shapes = parameter_shapes(spec);
  if (shapes.size() != params.size()) {
    throw DomainError("shape audit: expected " + std::to_string(shapes.size()) +
                      " tensors, found " + std::to_string(params.size()));
  }
  for (const auto& [name, shape] : shapes) {
    auto it = params.find(name);
    if (it == params.end()) {
      throw DomainError("shape audit: missing tensor " + name);
    }
    if (it->second.rows() != shape.rows || it->second.cols() != shape.cols) {
      throw DomainError("shape audit: tensor " + name + " is " +
                        std::to_string(it->second.rows()) + "x" +
                        std::to_string(it->second.cols()) + ", expected " +
                        std::to_string(shape.rows) + "x" +
                        std::to_string(shape.cols));
    }
  }
}

ParameterSet zeros_like(const ParameterSet& params) {
  ParameterSet out;
  for (const auto& [name, value] : params) {
    out.emplace(name, Matrix::Zero(value.rows(), value.cols()));
  }
  return out;
}

std::size_t parameter_count(const ParameterSet& params) {
  std::size_t n = 0;
  for (const auto& [name, value] : params) n += value.size();
  return n;
}

namespace net {
namespace {

DirectionCache RunRnn(const ParameterSet& p, const std::string& prefix,
                      const Matrix& input, bool reverse) {
  const Matrix& w = p.at(prefix + "W");
  const Matrix& u = p.at(prefix + "U");
  const Matrix& b = p.at(prefix + "b");
  const Eigen::Index frames = input.rows();
  DirectionCache cache;
  cache.hidden.resize(frames, w.rows());
  Vector h = Vector::Zero(w.rows());
  for (Eigen::Index step = 0; step < frames; ++step) {
    const Eigen::Index t = FrameAt(step, frames, reverse);
    Vector a = w * input.row(t).transpose() + u * h + b.col(0);
    h = a.array().tanh();
    cache.hidden.row(t) = h.transpose();
  }
  return cache;
}

DirectionCache RunLstm(const ParameterSet& p, const std::string& prefix,
                       const Matrix& input, bool reverse) {
  std::array<const Matrix*, 4> w, u, b;
  for (std::size_t g = 0; g < 4; ++g) {
    w[g] = &p.at(prefix + "W_" + kGates[g]);
    u[g] = &p.at(prefix + "U_" + kGates[g]);
    b[g] = &p.at(prefix + "b_" + kGates[g]);
  }
  const Eigen::Index units = w[0]->rows();
  const Eigen::Index frames = input.rows();
  DirectionCache cache;
  cache.hidden.resize(frames, units);
  cache.cell.resize(frames, units);
  cache.gates.resize(frames, 4 * units);
  Vector h = Vector::Zero(units);
  Vector c = Vector::Zero(units);
  for (Eigen::Index step = 0; step < frames; ++step) {
    const Eigen::Index t = FrameAt(step, frames, reverse);
    const Vector x = input.row(t).transpose();
    std::array<Vector, 4> z;
    for (std::size_t g = 0; g < 4; ++g) {
      z[g] = *w[g] * x + *u[g] * h + b[g]->col(0);
    }
    const Vector in_gate = z[0].unaryExpr(&Sigmoid);
    const Vector forget = z[1].unaryExpr(&Sigmoid);
    const Vector candidate = z[2].array().tanh();
    const Vector out_gate = z[3].unaryExpr(&Sigmoid);
    c = forget.cwiseProduct(c) + in_gate.cwiseProduct(candidate);
    h = out_gate.cwiseProduct(Vector(c.array().tanh()));
    cache.cell.row(t) = c.transpose();
    cache.hidden.row(t) = h.transpose();
    cache.gates.row(t) << in_gate.transpose(), forget.transpose(),
        candidate.transpose(), out_gate.transpose();
  }
  return cache;
}

// Accumulates parameter gradients of one direction into `grads` and
// returns d(loss)/d(input).
Matrix BackpropRnn(const ParameterSet& p, const std::string& prefix,
                   const Matrix& input, const DirectionCache& cache,
                   const Matrix& grad_hidden, bool reverse,
                   ParameterSet* grads) {
  const Matrix& w = p.at(prefix + "W");
  const Matrix& u = p.at(prefix + "U");
  Matrix& dw = grads->at(prefix + "W");
  Matrix& du = grads->at(prefix + "U");
  Matrix& db = grads->at(prefix + "b");
  const Eigen::Index frames = input.rows();
  const Eigen::Index units = w.rows();
  Matrix grad_input = Matrix::Zero(frames, input.cols());
  Vector carry = Vector::Zero(units);
  for (Eigen::Index step = frames - 1; step >= 0; --step) {
    const Eigen::Index t = FrameAt(step, frames, reverse);
    const Vector h = cache.hidden.row(t).transpose();
    const Vector dh = grad_hidden.row(t).transpose() + carry;
    const Vector da = dh.cwiseProduct(Vector(1.0 - h.array().square()));
    dw.noalias() += da * input.row(t);
    if (step > 0) {
      const Eigen::Index prev = FrameAt(step - 1, frames, reverse);
      du.noalias() += da * cache.hidden.row(prev);
    }
    db.col(0) += da;
    grad_input.row(t) = (w.transpose() * da).transpose();
    carry = u.transpose() * da;
  }
  return grad_input;
}

Matrix BackpropLstm(const ParameterSet& p, const std::string& prefix,
                    const Matrix& input, const DirectionCache& cache,
                    const Matrix& grad_hidden, bool reverse,
                    ParameterSet* grads) {
  std::array<const Matrix*, 4> w, u;
  std::array<Matrix*, 4> dw, du, db;
  for (std::size_t g = 0; g < 4; ++g) {
    w[g] = &p.at(prefix + "W_" + kGates[g]);
    u[g] = &p.at(prefix + "U_" + kGates[g]);
    dw[g] = &grads->at(prefix + "W_" + kGates[g]);
    du[g] = &grads->at(prefix + "U_" + kGates[g]);
    db[g] = &grads->at(prefix + "b_" + kGates[g]);
  }
  const Eigen::Index frames = input.rows();
  const Eigen::Index units = w[0]->rows();
  Matrix grad_input = Matrix::Zero(frames, input.cols());
  Vector carry_h = Vector::Zero(units);
  Vector carry_c = Vector::Zero(units);
  for (Eigen::Index step = frames - 1; step >= 0; --step) {
    const Eigen::Index t = FrameAt(step, frames, reverse);
    const bool has_prev = step > 0;
    const Eigen::Index prev = has_prev ? FrameAt(step - 1, frames, reverse) : 0;

    const auto gates = cache.gates.row(t);
    const Vector in_gate = gates.segment(0, units).transpose();
    const Vector forget = gates.segment(units, units).transpose();
    const Vector candidate = gates.segment(2 * units, units).transpose();
    const Vector out_gate = gates.segment(3 * units, units).transpose();
    const Vector c = cache.cell.row(t).transpose();
    const Vector c_prev =
        has_prev ? Vector(cache.cell.row(prev).transpose()) : Vector::Zero(units);
    const Vector tanh_c = c.array().tanh();

    const Vector dh = grad_hidden.row(t).transpose() + carry_h;
    const Vector d_out = dh.cwiseProduct(tanh_c);
    const Vector dc =
        dh.cwiseProduct(out_gate)
            .cwiseProduct(Vector(1.0 - tanh_c.array().square())) +
        carry_c;

    std::array<Vector, 4> dz;
    dz[0] = dc.cwiseProduct(candidate).cwiseProduct(
        Vector(in_gate.array() * (1.0 - in_gate.array())));
    dz[1] = dc.cwiseProduct(c_prev).cwiseProduct(
        Vector(forget.array() * (1.0 - forget.array())));
    dz[2] = dc.cwiseProduct(in_gate).cwiseProduct(
        Vector(1.0 - candidate.array().square()));
    dz[3] = d_out.cwiseProduct(
        Vector(out_gate.array() * (1.0 - out_gate.array())));

    Vector dx = Vector::Zero(input.cols());
    Vector dh_prev = Vector::Zero(units);
    for (std::size_t g = 0; g < 4; ++g) {
      dw[g]->noalias() += dz[g] * input.row(t);
      if (has_prev) du[g]->noalias() += dz[g] * cache.hidden.row(prev);
      db[g]->col(0) += dz[g];
      dx.noalias() += w[g]->transpose() * dz[g];
      dh_prev.noalias() += u[g]->transpose() * dz[g];
    }
    grad_input.row(t) = dx.transpose();
    carry_h = dh_prev;
    carry_c = dc.cwiseProduct(forget);
  }
  return grad_input;
}

}  // namespace

ParameterSet init_params(const NetworkSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ParameterSet params;
  for (const auto& [name, shape] : parameter_shapes(spec)) {
    Matrix value = Matrix::Zero(shape.rows, shape.cols);
    if (shape.rank == 2) {
      const double bound = std::sqrt(6.0 / static_cast<double>(shape.rows +
                                                               shape.cols));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (Eigen::Index r = 0; r < value.rows(); ++r) {
        for (Eigen::Index c = 0; c < value.cols(); ++c) value(r, c) = dist(rng);
      }
    } else if (name.ends_with(".b_f")) {
      value.setConstant(1.0);
    }
    params.emplace(name, std::move(value));
  }
  return params;
}

ForwardResult forward(const NetworkSpec& spec, const ParameterSet& params,
                      const Matrix& features, std::size_t input_len) {
  audit_shapes(spec, params);
  if (features.cols() != static_cast<Eigen::Index>(spec.feature_dim)) {
    throw DomainError("forward: features have " +
                      std::to_string(features.cols()) + " columns, expected " +
                      std::to_string(spec.feature_dim));
  }
  if (input_len > static_cast<std::size_t>(features.rows())) {
    throw DomainError("forward: input_len exceeds the number of frames");
  }

  ForwardResult result;
  ForwardCache& cache = result.cache;
  cache.input_len = input_len;
  cache.total_frames = features.rows();
  const auto frames = static_cast<Eigen::Index>(input_len);

  Matrix current = features.topRows(frames);
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    const LayerSpec& layer = spec.layers[l];
    LayerCache lc;
    lc.input = std::move(current);
    auto run = layer.kind == LayerKind::kRnn ? &RunRnn : &RunLstm;
    lc.forward = run(params, Prefix(l, false), lc.input, false);
    if (layer.bidirectional) {
      lc.backward = run(params, Prefix(l, true), lc.input, true);
      current.resize(frames, layer.output_width());
      current << lc.forward.hidden, lc.backward.hidden;
    } else {
      current = lc.forward.hidden;
    }
    cache.layers.push_back(std::move(lc));
  }
  cache.top = std::move(current);

  const Matrix& w = params.at("output.W");
  const Matrix& b = params.at("output.b");
  result.logits.resize(features.rows(), w.rows());
  for (Eigen::Index t = 0; t < features.rows(); ++t) {
    if (t < frames) {
      result.logits.row(t) = (w * cache.top.row(t).transpose() + b.col(0))
                                 .transpose();
    } else {
      result.logits.row(t) = b.col(0).transpose();
    }
  }
  result.probs = softmax_rows(result.logits);
  result.input_len = input_len;
  return result;
}

ParameterSet backward(const NetworkSpec& spec, const ParameterSet& params,
                      const ForwardCache& cache, const Matrix& grad_logits) {
  audit_shapes(spec, params);
  if (cache.layers.size() != spec.layers.size()) {
    throw DomainError("backward: cache does not match the network");
  }
  const auto frames = static_cast<Eigen::Index>(cache.input_len);
  if (grad_logits.rows() < frames ||
      grad_logits.cols() != static_cast<Eigen::Index>(spec.num_classes())) {
    throw DomainError("backward: grad_logits has the wrong shape");
  }
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    const LayerCache& lc = cache.layers[l];
    if (lc.input.rows() != frames ||
        lc.input.cols() != static_cast<Eigen::Index>(LayerInputWidth(spec, l)) ||
        lc.forward.hidden.cols() !=
            static_cast<Eigen::Index>(spec.layers[l].units)) {
      throw DomainError("backward: cache does not match layer " +
                        std::to_string(l));
    }
  }

  ParameterSet grads = zeros_like(params);
  const Matrix& w_out = params.at("output.W");
  const auto g = grad_logits.topRows(frames);
  grads.at("output.W").noalias() = g.transpose() * cache.top;
  grads.at("output.b").col(0) = g.colwise().sum().transpose();
  Matrix grad_output = g * w_out;

  for (std::size_t l = spec.layers.size(); l-- > 0;) {
    const LayerSpec& layer = spec.layers[l];
    const LayerCache& lc = cache.layers[l];
    const auto units = static_cast<Eigen::Index>(layer.units);
    auto backprop = layer.kind == LayerKind::kRnn ? &BackpropRnn : &BackpropLstm;
    Matrix grad_input =
        backprop(params, Prefix(l, false), lc.input, lc.forward,
                 grad_output.leftCols(units), false, &grads);
    if (layer.bidirectional) {
      grad_input += backprop(params, Prefix(l, true), lc.input, lc.backward,
                             grad_output.rightCols(units), true, &grads);
    }
    grad_output = std::move(grad_input);
  }
  return grads;
}

}  // namespace net
}  // namespace ctckit
