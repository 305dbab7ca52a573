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

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ctckit/lattice.h"
#include "oracles.h"

namespace ctckit {
namespace {

NetworkSpec MakeSpec(std::size_t feature_dim, std::vector<LayerSpec> layers,
                     std::size_t num_labels) {
  NetworkSpec spec;
  spec.feature_dim = feature_dim;
  spec.layers = std::move(layers);
  spec.num_labels = num_labels;
  return spec;
}

double Loss(const NetworkSpec& spec, const ParameterSet& params,
            const Matrix& x, std::size_t len, const std::vector<int>& labels) {
  const net::ForwardResult out = net::forward(spec, params, x, len);
  return ctc_gradient(out.logits, labels, len, labels.size()).loss;
}

// Largest relative error between backward() and central differences over
// every parameter entry.
double GradientAudit(const NetworkSpec& spec, std::uint64_t seed,
                     std::size_t frames, const std::vector<int>& labels) {
  std::mt19937_64 rng(seed);
  ParameterSet params = net::init_params(spec, seed);
  // Nonzero biases so their gradients are exercised away from symmetry.
  for (auto& [name, value] : params) {
    if (value.cols() == 1) value += oracle::RandomMatrix(rng, value.rows(), 1, 0.3);
  }
  const Matrix x = oracle::RandomMatrix(rng, frames, spec.feature_dim);
  const net::ForwardResult out = net::forward(spec, params, x, frames);
  const LossAndGradient lg =
      ctc_gradient(out.logits, labels, frames, labels.size());
  const ParameterSet grads = net::backward(spec, params, out.cache, lg.gradient);

  double worst = 0.0;
  for (auto& [name, value] : params) {
    const Matrix numeric = oracle::NumericGradient(
        [&, &name = name](const Matrix& probe) {
          ParameterSet p = params;
          p.at(name) = probe;
          return Loss(spec, p, x, frames, labels);
        },
        value);
    worst = std::max(worst, oracle::MaxRelativeError(grads.at(name), numeric));
  }
  return worst;
}

TEST(LayerKindTest, ParsesNames) {
  EXPECT_EQ(ParseLayerKind("rnn"), LayerKind::kRnn);
  EXPECT_EQ(ParseLayerKind("lstm"), LayerKind::kLstm);
  EXPECT_THROW(ParseLayerKind("gru"), DomainError);
  EXPECT_EQ(LayerKindName(LayerKind::kLstm), "lstm");
}

TEST(NetworkSpecTest, Validation) {
  EXPECT_THROW(MakeSpec(3, {}, 2).Validate(), DomainError);
  EXPECT_THROW(MakeSpec(0, {{LayerKind::kRnn, 4, true}}, 2).Validate(),
               DomainError);
  EXPECT_THROW(MakeSpec(3, {{LayerKind::kRnn, 0, true}}, 2).Validate(),
               DomainError);
  EXPECT_THROW(MakeSpec(3, {{LayerKind::kRnn, 4, true}}, 0).Validate(),
               DomainError);
  EXPECT_NO_THROW(MakeSpec(3, {{LayerKind::kRnn, 4, true}}, 2).Validate());
}

TEST(ShapesTest, OutputWidthIsLabelsPlusBlank) {
  const NetworkSpec spec = MakeSpec(5, {{LayerKind::kRnn, 4, true}}, 7);
  const auto shapes = parameter_shapes(spec);
  EXPECT_EQ(shapes.at("output.W").rows, 8);
  EXPECT_EQ(shapes.at("output.W").cols, 8);
  EXPECT_EQ(shapes.at("output.b").rank, 1);
  EXPECT_EQ(shapes.at("layer0.bwd.U").rows, 4);
  EXPECT_EQ(shapes.size(), 8u);
}

TEST(ShapesTest, ThreeBidirectionalLstmLayers) {
  const LayerSpec lstm{LayerKind::kLstm, 128, true};
  const NetworkSpec spec = MakeSpec(20, {lstm, lstm, lstm}, 80);
  const ParameterSet params = net::init_params(spec, 1);
  EXPECT_NO_THROW(audit_shapes(spec, params));
  EXPECT_EQ(params.at("output.W").rows(), 81);
  EXPECT_EQ(params.at("output.W").cols(), 256);
  EXPECT_EQ(params.at("layer1.fwd.W_g").cols(), 256);
  // 3 layers x 2 directions x 4 gates x (W, U, b) + output W, b.
  EXPECT_EQ(params.size(), 3u * 2 * 4 * 3 + 2);
}

TEST(ShapesTest, AuditRejectsMismatch) {
  const NetworkSpec spec = MakeSpec(3, {{LayerKind::kRnn, 4, false}}, 2);
  ParameterSet params = net::init_params(spec, 0);
  ParameterSet missing = params;
  missing.erase("layer0.fwd.U");
  EXPECT_THROW(audit_shapes(spec, missing), DomainError);
  ParameterSet wrong = params;
  wrong.at("output.b") = Matrix::Zero(4, 1);
  EXPECT_THROW(audit_shapes(spec, wrong), DomainError);
  ParameterSet extra = params;
  extra["layer0.bwd.W"] = Matrix::Zero(4, 3);
  EXPECT_THROW(audit_shapes(spec, extra), DomainError);
}

TEST(InitTest, DeterministicInSeed) {
  const NetworkSpec spec = MakeSpec(3, {{LayerKind::kLstm, 4, true}}, 2);
  EXPECT_EQ(net::init_params(spec, 42), net::init_params(spec, 42));
  EXPECT_NE(net::init_params(spec, 42), net::init_params(spec, 43));
}

TEST(InitTest, GlorotBound) {
  const NetworkSpec spec = MakeSpec(2, {{LayerKind::kRnn, 3, false}}, 2);
  const double bound = std::sqrt(6.0 / 5.0);
  EXPECT_NEAR(bound, 1.0954451150103321, 1e-15);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Matrix w = net::init_params(spec, seed).at("layer0.fwd.W");
    ASSERT_EQ(w.rows(), 3);
    ASSERT_EQ(w.cols(), 2);
    EXPECT_LE(w.cwiseAbs().maxCoeff(), bound);
  }
}

TEST(InitTest, BiasesZeroExceptForgetGate) {
  const NetworkSpec spec = MakeSpec(3, {{LayerKind::kLstm, 4, true}}, 2);
  const ParameterSet params = net::init_params(spec, 5);
  for (const auto& [name, value] : params) {
    if (value.cols() != 1) continue;
    const double expected = name.ends_with(".b_f") ? 1.0 : 0.0;
    EXPECT_TRUE((value.array() == expected).all()) << name;
  }
}

TEST(ForwardTest, RowsNormalized) {
  std::mt19937_64 rng(3);
  const NetworkSpec spec = MakeSpec(
      3, {{LayerKind::kLstm, 6, true}, {LayerKind::kRnn, 4, false}}, 4);
  const ParameterSet params = net::init_params(spec, 3);
  const Matrix x = oracle::RandomMatrix(rng, 9, 3);
  const net::ForwardResult out = net::forward(spec, params, x, 9);
  ASSERT_EQ(out.probs.rows(), 9);
  ASSERT_EQ(out.probs.cols(), 5);
  for (Eigen::Index t = 0; t < 9; ++t) {
    EXPECT_NEAR(out.probs.row(t).sum(), 1.0, 1e-9);
    EXPECT_GE(out.probs.row(t).minCoeff(), 0.0);
  }
}

TEST(ForwardTest, ZeroParametersGiveUniformRows) {
  std::mt19937_64 rng(4);
  const NetworkSpec spec = MakeSpec(3, {{LayerKind::kRnn, 5, true}}, 3);
  const ParameterSet params = zeros_like(net::init_params(spec, 0));
  const net::ForwardResult out =
      net::forward(spec, params, oracle::RandomMatrix(rng, 4, 3), 4);
  EXPECT_TRUE(out.probs.isApproxToConstant(0.25, 1e-15));
}

TEST(ForwardTest, DirectionalitySymmetry) {
  Matrix x(2, 2);
  x << 1.0, -0.5, 0.25, 2.0;
  const Matrix reversed = x.colwise().reverse();

  const NetworkSpec uni = MakeSpec(2, {{LayerKind::kRnn, 3, false}}, 2);
  const ParameterSet uni_params = net::init_params(uni, 9);
  const Matrix a = net::forward(uni, uni_params, x, 2).probs;
  const Matrix b = net::forward(uni, uni_params, reversed, 2).probs;
  EXPECT_FALSE(b.isApprox(Matrix(a.colwise().reverse()), 1e-6));

  const NetworkSpec bi = MakeSpec(2, {{LayerKind::kRnn, 3, true}}, 2);
  ParameterSet p = net::init_params(bi, 9);
  for (const char* t : {"W", "U", "b"}) {
    p.at(std::string("layer0.bwd.") + t) = p.at(std::string("layer0.fwd.") + t);
  }
  p.at("output.W").rightCols(3) = p.at("output.W").leftCols(3);
  const Matrix c = net::forward(bi, p, x, 2).probs;
  const Matrix d = net::forward(bi, p, reversed, 2).probs;
  EXPECT_TRUE(d.isApprox(Matrix(c.colwise().reverse()), 1e-14));
}

TEST(ForwardTest, PaddingDoesNotLeak) {
  std::mt19937_64 rng(6);
  const NetworkSpec spec = MakeSpec(3, {{LayerKind::kLstm, 4, true}}, 2);
  const ParameterSet params = net::init_params(spec, 6);
  const Matrix x = oracle::RandomMatrix(rng, 5, 3);
  Matrix padded(9, 3);
  padded << x, oracle::RandomMatrix(rng, 4, 3);
  const net::ForwardResult a = net::forward(spec, params, x, 5);
  const net::ForwardResult b = net::forward(spec, params, padded, 5);
  EXPECT_EQ(a.logits, b.logits.topRows(5));
  EXPECT_EQ(a.probs, b.probs.topRows(5));
  for (Eigen::Index t = 5; t < 9; ++t) {
    EXPECT_EQ(b.logits.row(t), params.at("output.b").col(0).transpose());
  }
}

TEST(ForwardTest, ShapeMismatch) {
  const NetworkSpec spec = MakeSpec(3, {{LayerKind::kRnn, 4, true}}, 2);
  const ParameterSet params = net::init_params(spec, 0);
  EXPECT_THROW(net::forward(spec, params, Matrix::Zero(4, 2), 4), DomainError);
  EXPECT_THROW(net::forward(spec, params, Matrix::Zero(4, 3), 5), DomainError);
  ParameterSet broken = params;
  broken.at("layer0.fwd.W") = Matrix::Zero(2, 2);
  EXPECT_THROW(net::forward(spec, broken, Matrix::Zero(4, 3), 4), DomainError);
}

TEST(BackwardTest, ZeroUpstreamGivesZeroGradients) {
  std::mt19937_64 rng(2);
  const NetworkSpec spec = MakeSpec(3, {{LayerKind::kLstm, 4, true}}, 2);
  const ParameterSet params = net::init_params(spec, 2);
  const net::ForwardResult out =
      net::forward(spec, params, oracle::RandomMatrix(rng, 5, 3), 5);
  const ParameterSet grads =
      net::backward(spec, params, out.cache, Matrix::Zero(5, 3));
  for (const auto& [name, g] : grads) EXPECT_TRUE(g.isZero(0.0)) << name;
}

TEST(BackwardTest, RejectsMismatchedUpstream) {
  const NetworkSpec spec = MakeSpec(3, {{LayerKind::kRnn, 4, true}}, 2);
  const ParameterSet params = net::init_params(spec, 2);
  const net::ForwardResult out =
      net::forward(spec, params, Matrix::Ones(5, 3), 5);
  EXPECT_THROW(net::backward(spec, params, out.cache, Matrix::Zero(5, 4)),
               DomainError);
}

TEST(BackwardTest, IdenticalSequencesContributeIdentically) {
  std::mt19937_64 rng(8);
  const NetworkSpec spec = MakeSpec(3, {{LayerKind::kRnn, 4, true}}, 2);
  const ParameterSet params = net::init_params(spec, 8);
  const Matrix x = oracle::RandomMatrix(rng, 5, 3);
  const std::vector<int> labels{0, 1};
  auto grads = [&] {
    const net::ForwardResult out = net::forward(spec, params, x, 5);
    return net::backward(spec, params, out.cache,
                         ctc_gradient(out.logits, labels, 5, 2).gradient);
  };
  EXPECT_EQ(grads(), grads());
}

TEST(BackwardTest, BidirectionalRnnMatchesFiniteDifferences) {
  const NetworkSpec spec = MakeSpec(3, {{LayerKind::kRnn, 5, true}}, 2);
  EXPECT_LE(GradientAudit(spec, 1, 4, {0, 1}), 1e-5);
}

TEST(BackwardTest, StackedLstmMatchesFiniteDifferences) {
  const NetworkSpec spec = MakeSpec(
      2, {{LayerKind::kLstm, 3, true}, {LayerKind::kLstm, 2, false}}, 2);
  EXPECT_LE(GradientAudit(spec, 2, 5, {1, 1}), 1e-5);
}

TEST(BackwardTest, MixedStackMatchesFiniteDifferences) {
  const NetworkSpec spec = MakeSpec(
      3, {{LayerKind::kRnn, 3, false}, {LayerKind::kLstm, 3, true}}, 3);
  EXPECT_LE(GradientAudit(spec, 3, 6, {2, 0, 1}), 1e-5);
}

TEST(BackwardTest, PaddedFramesDoNotContribute) {
  std::mt19937_64 rng(10);
  const NetworkSpec spec = MakeSpec(3, {{LayerKind::kLstm, 4, true}}, 2);
  const ParameterSet params = net::init_params(spec, 10);
  const Matrix x = oracle::RandomMatrix(rng, 4, 3);
  Matrix padded(7, 3);
  padded << x, oracle::RandomMatrix(rng, 3, 3);
  const std::vector<int> labels{1, 0};
  auto grads = [&](const Matrix& in) {
    const net::ForwardResult out = net::forward(spec, params, in, 4);
    return net::backward(spec, params, out.cache,
                         ctc_gradient(out.logits, labels, 4, 2).gradient);
  };
  EXPECT_EQ(grads(x), grads(padded));
}

}  // namespace
}  // namespace ctckit
