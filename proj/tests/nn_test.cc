/*
 * Copyright 2026 The MQFL Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "mqfl/errors.h"
#include "mqfl/nn/attention.h"
#include "mqfl/nn/layers.h"
#include "mqfl/nn/loss.h"
#include "mqfl/nn/model.h"
#include "mqfl/nn/optimizer.h"
#include "mqfl/nn/train.h"
#include "mqfl/nn/weights.h"

namespace mqfl::nn {
namespace {

constexpr double kH = 1e-5;
constexpr double kRelTol = 1e-5;

// |a - b| relative to max(1, |a|, |b|).
double RelErr(double a, double b) {
  return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)});
}

Tensor RandomTensor(const Shape& s, Prng& g, double lo = -1, double hi = 1) {
  Tensor t(s);
  std::uniform_real_distribution<double> d(lo, hi);
  for (auto& v : t.values()) v = d(g);
  return t;
}

double Dot(const Tensor& a, const Tensor& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Central-difference check of a layer's input and parameter gradients for
// the scalar u . layer(x). Returns the worst relative error.
double CheckLayerGrad(Layer& layer, const Tensor& x, Prng& g) {
  Tensor y = layer.Forward(x);
  Tensor u = RandomTensor(y.shape(), g);
  for (Param* p : layer.Params()) p->grad.Fill(0.0);
  layer.Forward(x);
  Tensor dx = layer.Backward(u);
  double worst = 0;
  Tensor xp = x;
  for (size_t i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + kH;
    const double fp = Dot(u, layer.Forward(xp));
    xp[i] = x[i] - kH;
    const double fm = Dot(u, layer.Forward(xp));
    xp[i] = x[i];
    worst = std::max(worst, RelErr((fp - fm) / (2 * kH), dx[i]));
  }
  for (Param* p : layer.Params()) {
    for (size_t i = 0; i < p->value.size(); ++i) {
      const double orig = p->value[i];
      p->value[i] = orig + kH;
      const double fp = Dot(u, layer.Forward(x));
      p->value[i] = orig - kH;
      const double fm = Dot(u, layer.Forward(x));
      p->value[i] = orig;
      worst = std::max(worst, RelErr((fp - fm) / (2 * kH), p->grad[i]));
    }
  }
  return worst;
}

TEST(DenseTest, IdentityPassesInputThrough) {
  Prng g(1);
  Dense d(4, 4, g);
  d.weight().value.Fill(0.0);
  for (size_t i = 0; i < 4; ++i) d.weight().value[i * 4 + i] = 1.0;
  Tensor x = Tensor::Vector({0.5, -2, 3, 7});
  EXPECT_EQ(d.Forward(x).vec(), x.vec());
  EXPECT_THROW(d.Forward(Tensor::Vector({1, 2})), ContractViolation);
}

TEST(ConvTest, AllOnesKernelSumsWindow) {
  Prng g(2);
  Conv2d c(1, 1, 3, g);
  c.weight().value.Fill(1.0);
  Tensor y = c.Forward(Tensor({1, 3, 3}, 1.0));
  ASSERT_EQ(y.shape(), (Shape{1, 1, 1}));
  EXPECT_EQ(y[0], 9.0);
}

TEST(MaxPoolTest, PicksWindowMaximum) {
  MaxPool2d p(2);
  Tensor x({1, 2, 4}, std::vector<double>{1, 5, 2, 0, 3, 4, 8, -1});
  Tensor y = p.Forward(x);
  EXPECT_EQ(y.vec(), (std::vector<double>{5, 8}));
  Tensor dx = p.Backward(Tensor({1, 1, 2}, std::vector<double>{1, 2}));
  EXPECT_EQ(dx.vec(), (std::vector<double>{0, 1, 0, 0, 0, 0, 2, 0}));
}

TEST(GradCheckTest, Dense) {
  Prng g(10);
  for (int t = 0; t < 50; ++t) {
    Dense d(1 + g() % 5, 1 + g() % 5, g);
    for (auto& v : d.bias().value.values()) v = RandomTensor({1}, g)[0];
    EXPECT_LE(CheckLayerGrad(d, RandomTensor({d.weight().value.dim(1)}, g), g), kRelTol);
  }
}

TEST(GradCheckTest, Conv2d) {
  Prng g(11);
  for (int t = 0; t < 50; ++t) {
    const size_t cin = 1 + g() % 2, cout = 1 + g() % 3, k = 1 + g() % 3;
    Conv2d c(cin, cout, k, g);
    EXPECT_LE(CheckLayerGrad(c, RandomTensor({cin, k + g() % 3, k + g() % 3}, g), g), kRelTol);
  }
}

TEST(GradCheckTest, MaxPoolAndActivations) {
  Prng g(12);
  for (int t = 0; t < 50; ++t) {
    MaxPool2d p(2);
    EXPECT_LE(CheckLayerGrad(p, RandomTensor({2, 4, 5}, g), g), kRelTol);
    ActivationLayer relu(Activation::kRelu), th(Activation::kTanh);
    EXPECT_LE(CheckLayerGrad(relu, RandomTensor({7}, g), g), kRelTol);
    EXPECT_LE(CheckLayerGrad(th, RandomTensor({2, 3}, g), g), kRelTol);
    Flatten f;
    EXPECT_LE(CheckLayerGrad(f, RandomTensor({2, 2, 2}, g), g), kRelTol);
  }
}

TEST(GradCheckTest, QuantumLayer) {
  Prng g(13);
  for (int t = 0; t < 50; ++t) {
    QuantumLayer q(3, 2, g);
    EXPECT_LE(CheckLayerGrad(q, RandomTensor({3}, g, -3, 3), g), kRelTol);
  }
}

TEST(GradCheckTest, MultiHeadSelfAttention) {
  Prng g(14);
  for (int t = 0; t < 50; ++t) {
    const size_t heads = 1 + g() % 3;
    MultiHeadAttention m(heads * 2, heads, g);
    for (auto* b : {&m.bq(), &m.bk(), &m.bv(), &m.bo()})
      for (auto& v : b->value.values()) v = RandomTensor({1}, g)[0];
    EXPECT_LE(CheckLayerGrad(m, RandomTensor({1 + g() % 4, heads * 2}, g), g), kRelTol);
  }
}

TEST(GradCheckTest, AttentionSeparateInputs) {
  Prng g(15);
  for (int t = 0; t < 50; ++t) {
    MultiHeadAttention m(4, 2, g);
    Tensor xq = RandomTensor({2, 4}, g), xk = RandomTensor({3, 4}, g), xv = RandomTensor({3, 4}, g);
    Tensor u = RandomTensor({2, 4}, g);
    m.Attend(xq, xk, xv);
    for (Param* p : m.Params()) p->grad.Fill(0.0);
    auto gr = m.AttendBackward(u);
    auto check = [&](Tensor& x, const Tensor& analytic) {
      for (size_t i = 0; i < x.size(); ++i) {
        const double o = x[i];
        x[i] = o + kH;
        const double fp = Dot(u, m.Attend(xq, xk, xv));
        x[i] = o - kH;
        const double fm = Dot(u, m.Attend(xq, xk, xv));
        x[i] = o;
        EXPECT_LE(RelErr((fp - fm) / (2 * kH), analytic[i]), kRelTol);
      }
    };
    check(xq, gr.dq);
    check(xk, gr.dk);
    check(xv, gr.dv);
  }
}

TEST(AttentionTest, ExactMatchDominates) {
  // Orthogonal unit keys; the query matches key 1 with scaled logit 10.
  const size_t dk = 4;
  Tensor k({4, dk});
  for (size_t i = 0; i < 4; ++i) k[i * dk + i] = 1.0;
  Tensor q({1, dk});
  q[1] = 10.0 * std::sqrt(static_cast<double>(dk));
  Prng g(16);
  Tensor v = RandomTensor({4, 3}, g);
  Tensor w;
  Tensor out = ScaledDotAttention(q, k, v, &w);
  EXPECT_GT(w[1], 0.99);
  for (size_t c = 0; c < 3; ++c) EXPECT_NEAR(out[c], v[3 + c], 2 * (1 - w[1]));
}

TEST(AttentionTest, EqualKeysAverageValues) {
  Prng g(17);
  Tensor q = RandomTensor({2, 3}, g);
  Tensor k({5, 3}, 0.7);
  Tensor v = RandomTensor({5, 2}, g);
  Tensor w;
  Tensor out = ScaledDotAttention(q, k, v, &w);
  for (double a : w.values()) EXPECT_NEAR(a, 0.2, 1e-15);
  for (size_t r = 0; r < 2; ++r)
    for (size_t c = 0; c < 2; ++c) {
      double mean = 0;
      for (size_t j = 0; j < 5; ++j) mean += v[j * 2 + c] / 5;
      EXPECT_NEAR(out[r * 2 + c], mean, 1e-15);
    }
}

TEST(AttentionTest, HeadDivisibility) {
  Prng g(18);
  EXPECT_THROW(MultiHeadAttention(6, 4, g), ConfigError);
  EXPECT_NO_THROW(MultiHeadAttention(6, 2, g));
}

TEST(SoftmaxTest, ClosedForms) {
  auto u = Softmax(std::vector<double>{3, 3, 3, 3});
  for (double p : u) EXPECT_DOUBLE_EQ(p, 0.25);
  auto p = Softmax(std::vector<double>{std::log(2.0), 0.0});
  EXPECT_NEAR(p[0], 2.0 / 3, 1e-12);
  EXPECT_NEAR(p[1], 1.0 / 3, 1e-12);
  for (int l = 0; l < 4; ++l) EXPECT_NEAR(CrossEntropy(u, l), std::log(4.0), 1e-15);
  EXPECT_THROW(CrossEntropy(u, 4), ContractViolation);
}

TEST(SoftmaxTest, SimplexForLargeLogits) {
  Prng g(19);
  for (int t = 0; t < 1000; ++t) {
    Tensor z = RandomTensor({1 + g() % 10}, g, -1e3, 1e3);
    auto p = Softmax(z.values());
    double s = 0;
    for (double v : p) {
      EXPECT_GE(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(SoftmaxTest, BackwardMatchesFiniteDifferences) {
  Prng g(20);
  for (int t = 0; t < 50; ++t) {
    Tensor z = RandomTensor({5}, g, -3, 3), u = RandomTensor({5}, g);
    auto f = [&](const Tensor& zz) {
      auto p = Softmax(zz.values());
      double s = 0;
      for (size_t i = 0; i < 5; ++i) s += u[i] * p[i];
      return s;
    };
    auto gz = SoftmaxBackward(Softmax(z.values()), u.values());
    std::vector<double> gce;
    SoftmaxCrossEntropy(z.values(), 2, &gce);
    for (size_t i = 0; i < 5; ++i) {
      Tensor zp = z, zm = z;
      zp[i] += kH;
      zm[i] -= kH;
      EXPECT_LE(RelErr((f(zp) - f(zm)) / (2 * kH), gz[i]), kRelTol);
      const double ce = (SoftmaxCrossEntropy(zp.values(), 2, nullptr) -
                         SoftmaxCrossEntropy(zm.values(), 2, nullptr)) / (2 * kH);
      EXPECT_LE(RelErr(ce, gce[i]), kRelTol);
    }
  }
}

TEST(OptimizerTest, UpdateRules) {
  Param p("w", Tensor::Vector({1.0}));
  p.grad[0] = 0.5;
  std::vector<Param*> ps = {&p};
  Sgd sgd(0.1);
  sgd.Step(ps);
  EXPECT_DOUBLE_EQ(p.value[0], 0.95);

  Param z("z", Tensor::Vector({2.0, -3.0}));
  std::vector<Param*> zs = {&z};
  Sgd(0.1).Step(zs);
  Adam adam0(0.1);
  adam0.Step(zs);
  EXPECT_EQ(z.value.vec(), (std::vector<double>{2.0, -3.0}));

  Param a("a", Tensor::Vector({0.0}));
  a.grad[0] = 1.0;
  std::vector<Param*> as = {&a};
  Adam adam(1e-3);
  adam.Step(as);
  // m_hat = 1, v_hat = 1: step = lr / (1 + eps).
  EXPECT_NEAR(a.value[0], -1e-3 / (1.0 + 1e-8), 1e-18);
  std::vector<Param*> two = {&a, &z};
  EXPECT_THROW(adam.Step(two), ContractViolation);
  EXPECT_THROW(Sgd(0.0), ConfigError);
  EXPECT_THROW(MakeOptimizer("rmsprop", 0.1), ConfigError);
}

std::unique_ptr<Classifier> SmallClassifier(uint64_t seed, size_t in = 2) {
  Prng g(seed);
  auto net = BuildSequential({{.type = "dense", .out = 8, .activation = "tanh"},
                              {.type = "dense", .out = 2}},
                             {in}, g, "clf");
  return std::make_unique<Classifier>(std::move(net));
}

std::vector<Example> SeparableSet(size_t n, uint64_t seed) {
  Prng g(seed);
  std::uniform_real_distribution<double> d(-1, 1);
  std::vector<Example> out;
  while (out.size() < n) {
    double a = d(g), b = d(g);
    if (std::fabs(a + b) < 0.2) continue;  // margin
    out.push_back({{Tensor::Vector({a, b})}, {a + b > 0 ? 1 : 0}});
  }
  return out;
}

TEST(TrainTest, OneEpochOnOneSampleLowersItsLoss) {
  auto m = SmallClassifier(21);
  std::vector<Example> one = {{{Tensor::Vector({0.3, -0.8})}, {1}}};
  const double before = Evaluate(*m, one).loss;
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 1;
  TrainLocal(*m, one, cfg);
  EXPECT_LT(Evaluate(*m, one).loss, before);
}

TEST(TrainTest, DeterministicForSeed) {
  auto data = SeparableSet(40, 22);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.seed = 5;
  auto a = SmallClassifier(1);
  auto b = SmallClassifier(1);
  auto ra = TrainLocal(*a, data, cfg);
  auto rb = TrainLocal(*b, data, cfg);
  EXPECT_EQ(ra.weights.values, rb.weights.values);
}

TEST(TrainTest, SeparableSetReachesFullAccuracy) {
  auto data = SeparableSet(40, 23);
  auto m = SmallClassifier(2);
  TrainConfig cfg;
  cfg.epochs = 25;
  cfg.batch_size = 1;
  cfg.lr = 1e-2;
  auto r = TrainLocal(*m, data, cfg);
  EXPECT_EQ(Evaluate(*m, data).accuracy[0], 1.0);
  EXPECT_LE(r.history.size(), 25u);
}

TEST(TrainTest, EmptyDataRejected) {
  auto m = SmallClassifier(3);
  TrainConfig cfg;
  EXPECT_THROW(TrainLocal(*m, std::vector<Example>{}, cfg), InputError);
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.Validate(), ConfigError);
}

TEST(TrainTest, PlateauRaisesLearningRate) {
  // Identical inputs with balanced labels: loss settles at ln 2 and stalls.
  std::vector<Example> data;
  for (int i = 0; i < 8; ++i) data.push_back({{Tensor::Vector({0.0, 0.0})}, {i % 2}});
  auto m = SmallClassifier(4);
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.batch_size = 8;
  cfg.optimizer = "sgd";
  cfg.lr = 0.5;
  auto r = TrainLocal(*m, data, cfg);
  EXPECT_TRUE(r.plateau_triggered);
  EXPECT_EQ(r.history.front().lr, 0.5);
  EXPECT_EQ(r.history.back().lr, 3e-3);
}

TEST(WeightsTest, FlattenLoadRoundtrip) {
  auto a = SmallClassifier(5);
  FlatWeights w = FlattenWeights(*a);
  EXPECT_EQ(w.values.size(), a->ParamCount());
  EXPECT_EQ(w.values.size(), 2u * 8 + 8 + 8 * 2 + 2);
  auto b = SmallClassifier(6);
  EXPECT_NE(FlattenWeights(*b).values, w.values);
  LoadWeights(*b, w);
  EXPECT_EQ(FlattenWeights(*b).values, w.values);

  auto wide = SmallClassifier(7, 3);
  EXPECT_THROW(LoadWeights(*wide, w), ContractViolation);
  EXPECT_NE(FlattenWeights(*wide).LayoutHash(), w.LayoutHash());
}

TEST(WeightsTest, CheckpointRoundtrip) {
  auto a = SmallClassifier(8);
  FlatWeights w = FlattenWeights(*a);
  w.values[0] = 1.0 / 3.0;
  const auto path = (std::filesystem::temp_directory_path() / "mqfl_ckpt_test.bin").string();
  SaveCheckpoint(path, w, {42, 7});
  CheckpointInfo info;
  FlatWeights back = LoadCheckpoint(path, &info);
  EXPECT_EQ(back.values, w.values);
  EXPECT_TRUE(back.SameLayout(w));
  EXPECT_EQ(info.seed, 42u);
  EXPECT_EQ(info.round, 7);
  {
    std::FILE* f = std::fopen(path.c_str(), "r+b");
    std::fputc('X', f);
    std::fclose(f);
  }
  EXPECT_THROW(LoadCheckpoint(path), ParseError);
  std::filesystem::remove(path);
  EXPECT_THROW(LoadCheckpoint(path), InputError);
}

TEST(BuilderTest, ImageStackComposes) {
  Prng g(9);
  auto net = BuildSequential({{.type = "conv2d", .channels = 4, .kernel = 3},
                              {.type = "relu"},
                              {.type = "maxpool", .k = 2},
                              {.type = "dense", .out = 6},
                              {.type = "quantum", .qubits = 6, .layers = 2}},
                             {1, 16, 16}, g, "img");
  EXPECT_EQ(net->OutputShape({1, 16, 16}), (Shape{6}));
  Tensor y = net->Forward(Tensor({1, 16, 16}, 0.1));
  for (double v : y.values()) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_THROW(BuildSequential({{.type = "quantum", .qubits = 6, .layers = 1}}, {5}, g, "x"),
               ConfigError);
  EXPECT_THROW(BuildSequential({{.type = "bogus"}}, {5}, g, "x"), ConfigError);
}

}  // namespace
}  // namespace mqfl::nn
