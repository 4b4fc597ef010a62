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
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "mqfl/errors.h"
#include "mqfl/mqmoe/model.h"
#include "mqfl/nn/loss.h"
#include "mqfl/nn/train.h"

namespace mqfl::mqmoe {
namespace {

using nn::Example;
using nn::Param;
using nn::Prng;
using nn::Tensor;

constexpr double kH = 1e-5;
constexpr double kRelTol = 1e-5;
constexpr double kOracleTol = 1e-10;

double RelErr(double a, double b) {
  return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)});
}

Tensor RandomTensor(const nn::Shape& s, Prng& g, double lo = -1, double hi = 1) {
  Tensor t(s);
  std::uniform_real_distribution<double> d(lo, hi);
  for (auto& v : t.values()) v = d(g);
  return t;
}

// Sequence expert: 5 -> dense 3 -> circuit; image expert: [1,4,4] conv ->
// relu -> pool -> dense 3 -> circuit.
MqmoeConfig TinyConfig(bool quantum = true) {
  MqmoeConfig c;
  c.qubits = 3;
  c.pqc_layers = 1;
  c.attention_heads = 1;
  c.quantum = quantum;
  c.experts.push_back({"sequence", {5}, {{.type = "dense", .out = 3}}, 2});
  c.experts.push_back({"image",
                       {1, 4, 4},
                       {{.type = "conv2d", .channels = 2, .kernel = 3},
                        {.type = "relu"},
                        {.type = "maxpool", .k = 2},
                        {.type = "dense", .out = 3}},
                       3});
  return c;
}

Example RandomSample(Prng& g) {
  std::uniform_int_distribution<int> l2(0, 1), l3(0, 2);
  return {{RandomTensor({5}, g), RandomTensor({1, 4, 4}, g)}, {l2(g), l3(g)}};
}

// Dense statevector oracle: each wire starts at (cos x/2, i sin x/2), each
// layer is a full 2^d x 2^d matrix product.
using Cx = std::complex<double>;
using Mat = std::vector<std::vector<Cx>>;

Mat Kron(const Mat& a, const Mat& b) {
  Mat out(a.size() * b.size(), std::vector<Cx>(a.size() * b.size()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a.size(); ++j)
      for (size_t k = 0; k < b.size(); ++k)
        for (size_t l = 0; l < b.size(); ++l) out[i * b.size() + k][j * b.size() + l] = a[i][j] * b[k][l];
  return out;
}

std::vector<Cx> Apply(const Mat& m, const std::vector<Cx>& v) {
  std::vector<Cx> out(v.size());
  for (size_t i = 0; i < v.size(); ++i)
    for (size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

std::vector<double> CircuitOracle(const std::vector<double>& x, const Tensor& angles, int layers) {
  const size_t d = x.size(), dim = size_t{1} << d;
  std::vector<Cx> psi = {1.0};
  for (size_t w = 0; w < d; ++w) {
    std::vector<Cx> next;
    for (Cx a : psi) {
      next.push_back(a * std::cos(x[w] / 2));
      next.push_back(a * Cx(0, std::sin(x[w] / 2)));
    }
    psi = next;
  }
  for (int l = 0; l < layers; ++l) {
    Mat u = {{1.0}};
    for (size_t w = 0; w < d; ++w) {
      const double t = angles[l * d + w];
      u = Kron(u, {{std::cos(t / 2), Cx(0, -std::sin(t / 2))},
                   {Cx(0, -std::sin(t / 2)), std::cos(t / 2)}});
    }
    psi = Apply(u, psi);
    for (size_t c = 0; c + 1 < d; ++c) {
      std::vector<Cx> out(dim);
      for (size_t b = 0; b < dim; ++b) {
        const bool ctrl = (b >> (d - 1 - c)) & 1;
        out[ctrl ? b ^ (size_t{1} << (d - 2 - c)) : b] = psi[b];
      }
      psi = out;
    }
  }
  std::vector<double> z(d, 0.0);
  for (size_t b = 0; b < dim; ++b)
    for (size_t w = 0; w < d; ++w) z[w] += std::norm(psi[b]) * (((b >> (d - 1 - w)) & 1) ? -1 : 1);
  return z;
}

TEST(ExpertTest, ZeroWeightsGiveAllOnes) {
  MqmoeModel m(TinyConfig(), 1);
  for (Param* p : m.expert(0).Params()) p->value.Fill(0.0);
  auto e = m.ExpertForward(0, Tensor({5}));
  for (double v : e) EXPECT_NEAR(v, 1.0, 1e-15);
}

TEST(ExpertTest, BoundedOutputs) {
  MqmoeModel m(MqmoeConfig::Reference(64, 16, 4, 4), 2);
  Prng g(3);
  for (int t = 0; t < 1000; ++t) {
    const size_t j = t % 2;
    Tensor x = j == 0 ? RandomTensor({64}, g, -5, 5) : RandomTensor({1, 16, 16}, g, -5, 5);
    for (double v : m.ExpertForward(j, x)) {
      EXPECT_GE(v, -1.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(ExpertTest, MatchesComposedOracle) {
  MqmoeModel m(TinyConfig(), 4);
  Prng g(5);
  auto& dense = dynamic_cast<nn::Dense&>(m.expert(0).layer(0));
  auto& q = dynamic_cast<nn::QuantumLayer&>(m.expert(0).layer(1));
  for (int t = 0; t < 20; ++t) {
    Tensor x = RandomTensor({5}, g);
    std::vector<double> z(3);
    for (size_t o = 0; o < 3; ++o) {
      z[o] = dense.bias().value[o];
      for (size_t i = 0; i < 5; ++i) z[o] += dense.weight().value[o * 5 + i] * x[i];
    }
    auto want = CircuitOracle(z, q.angles().value, 1);
    auto got = m.ExpertForward(0, x);
    for (size_t i = 0; i < 3; ++i) EXPECT_NEAR(got[i], want[i], kOracleTol);
  }
}

TEST(GateTest, ClosedForms) {
  MqmoeModel m(TinyConfig(), 6);
  m.gate_layer().weight().value.Fill(0.0);
  m.gate_layer().bias().value.Fill(0.0);
  Prng g(7);
  auto u = m.Gate(RandomTensor({6}, g));
  EXPECT_EQ(u, (std::vector<double>{0.5, 0.5}));
  m.gate_layer().bias().value[0] = std::log(3.0);
  auto p = m.Gate(RandomTensor({6}, g));
  EXPECT_NEAR(p[0], 0.75, 1e-12);
  EXPECT_NEAR(p[1], 0.25, 1e-12);
}

TEST(GateTest, SimplexOverRandomSamples) {
  MqmoeModel m(TinyConfig(), 8);
  Prng g(9);
  for (int t = 0; t < 1000; ++t) {
    m.Logits(RandomSample(g));
    const auto& gate = m.last_trace().gate;
    double s = 0;
    for (double v : gate) {
      EXPECT_GE(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(GateTest, GradientMatchesFiniteDifferences) {
  MqmoeModel m(TinyConfig(), 10);
  Prng g(11);
  for (int t = 0; t < 50; ++t) {
    Tensor fused = RandomTensor({6}, g);
    std::vector<double> u = RandomTensor({2}, g).vec();
    auto f = [&](const Tensor& x) {
      auto p = m.Gate(x);
      return u[0] * p[0] + u[1] * p[1];
    };
    auto gate = m.Gate(fused);
    Tensor dfused = m.gate_layer().Backward(Tensor::Vector(nn::SoftmaxBackward(gate, u)));
    for (size_t i = 0; i < 6; ++i) {
      Tensor a = fused, b = fused;
      a[i] += kH;
      b[i] -= kH;
      EXPECT_LE(RelErr((f(a) - f(b)) / (2 * kH), dfused[i]), kRelTol);
    }
  }
}

TEST(CombineTest, OneHotAndSymmetry) {
  Prng g(12);
  std::vector<std::vector<double>> e = {RandomTensor({6}, g).vec(), RandomTensor({6}, g).vec(),
                                        RandomTensor({6}, g).vec()};
  for (size_t j = 0; j < 3; ++j) {
    std::vector<double> gate(3, 0.0);
    gate[j] = 1.0;
    EXPECT_EQ(Combine(gate, e), e[j]);
  }
  std::vector<double> v = e[0], neg(6);
  for (size_t i = 0; i < 6; ++i) neg[i] = -v[i];
  for (double y : Combine({0.5, 0.5}, {v, neg})) EXPECT_EQ(y, 0.0);
  EXPECT_THROW(Combine({1.0}, e), ContractViolation);
}

TEST(CombineTest, DirectSummationOracle) {
  Prng g(13);
  for (int t = 0; t < 200; ++t) {
    const size_t m = 1 + g() % 5;
    std::vector<std::vector<double>> e;
    for (size_t j = 0; j < m; ++j) e.push_back(RandomTensor({4}, g).vec());
    auto gate = nn::Softmax(RandomTensor({m}, g).vec());
    auto y = Combine(gate, e);
    for (size_t i = 0; i < 4; ++i) {
      double want = 0.0;
      for (size_t j = 0; j < m; ++j) want = want + gate[j] * e[j][i];
      EXPECT_EQ(y[i], want);
    }
  }
}

TEST(CombineTest, LinearityInTheGate) {
  // Dyadic values with few significant bits: every product and sum is
  // representable, so both sides are computed without rounding.
  Prng g(14);
  std::uniform_int_distribution<int> eighth(0, 8), sixty4(-64, 64), quarter(0, 4);
  for (int t = 0; t < 1000; ++t) {
    const size_t m = 2;
    std::vector<std::vector<double>> e(m, std::vector<double>(5));
    for (auto& row : e)
      for (auto& v : row) v = sixty4(g) / 64.0;
    const double a1 = eighth(g) / 8.0, b1 = eighth(g) / 8.0;
    std::vector<double> g1 = {a1, 1 - a1}, g2 = {b1, 1 - b1};
    const double alpha = quarter(g) / 4.0;
    std::vector<double> mix = {alpha * g1[0] + (1 - alpha) * g2[0],
                               alpha * g1[1] + (1 - alpha) * g2[1]};
    auto lhs = Combine(mix, e);
    auto y1 = Combine(g1, e), y2 = Combine(g2, e);
    for (size_t i = 0; i < 5; ++i) EXPECT_EQ(lhs[i], alpha * y1[i] + (1 - alpha) * y2[i]);
  }
  // General reals agree to rounding.
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::vector<double>> e = {RandomTensor({5}, g).vec(), RandomTensor({5}, g).vec()};
    auto g1 = nn::Softmax(RandomTensor({2}, g).vec()), g2 = nn::Softmax(RandomTensor({2}, g).vec());
    const double alpha = RandomTensor({1}, g, 0, 1)[0];
    auto lhs = Combine({alpha * g1[0] + (1 - alpha) * g2[0], alpha * g1[1] + (1 - alpha) * g2[1]}, e);
    auto y1 = Combine(g1, e), y2 = Combine(g2, e);
    for (size_t i = 0; i < 5; ++i) EXPECT_NEAR(lhs[i], alpha * y1[i] + (1 - alpha) * y2[i], 1e-15);
  }
}

TEST(MqmoeTest, PinnedZeroGateHidesExpert) {
  MqmoeModel m(TinyConfig(), 15);
  m.OverrideGate(std::vector<double>{1.0, 0.0});
  Prng g(16);
  Example ex = RandomSample(g);
  auto base = m.Logits(ex);
  for (int t = 0; t < 20; ++t) {
    ex.inputs[1] = RandomTensor({1, 4, 4}, g, -3, 3);
    EXPECT_EQ(m.Logits(ex), base);
  }
  EXPECT_THROW(m.OverrideGate(std::vector<double>{0.7, 0.7}), ContractViolation);
  EXPECT_THROW(m.OverrideGate(std::vector<double>{1.0}), ContractViolation);
}

TEST(MqmoeTest, OneHotGateRecoversExpert) {
  MqmoeModel m(TinyConfig(), 17);
  Prng g(18);
  for (size_t j = 0; j < 2; ++j) {
    std::vector<double> onehot(2, 0.0);
    onehot[j] = 1.0;
    m.OverrideGate(onehot);
    m.Logits(RandomSample(g));
    EXPECT_EQ(m.last_trace().combined, m.last_trace().expert_outputs[j]);
  }
}

TEST(MqmoeTest, DeterministicAndFinite) {
  MqmoeModel a(TinyConfig(), 19), b(TinyConfig(), 19), c(TinyConfig(), 20);
  Prng g(21);
  Example ex = RandomSample(g);
  auto la = a.Logits(ex);
  EXPECT_EQ(la, b.Logits(ex));
  EXPECT_NE(la, c.Logits(ex));
  for (const auto& head : la)
    for (double v : head) EXPECT_TRUE(std::isfinite(v));
  ASSERT_EQ(la.size(), 2u);
  EXPECT_EQ(la[0].size(), 2u);
  EXPECT_EQ(la[1].size(), 3u);
}

TEST(MqmoeTest, ForwardMatchesModuleComposition) {
  MqmoeModel m(TinyConfig(), 22);
  Prng g(23);
  for (int t = 0; t < 20; ++t) {
    Example ex = RandomSample(g);
    auto got = m.Logits(ex);
    // Oracle: circuits from the dense oracle, attention/gate/heads from
    // their own modules, combination summed by hand.
    std::vector<std::vector<double>> e(2);
    {
      auto& dense = dynamic_cast<nn::Dense&>(m.expert(0).layer(0));
      std::vector<double> z(3);
      for (size_t o = 0; o < 3; ++o) {
        z[o] = dense.bias().value[o];
        for (size_t i = 0; i < 5; ++i) z[o] += dense.weight().value[o * 5 + i] * ex.inputs[0][i];
      }
      e[0] = CircuitOracle(z, dynamic_cast<nn::QuantumLayer&>(m.expert(0).layer(1)).angles().value, 1);
      auto& img = m.expert(1);
      Tensor h = ex.inputs[1];
      for (size_t l = 0; l + 1 < img.size(); ++l) h = img.layer(l).Forward(h);
      auto& qi = dynamic_cast<nn::QuantumLayer&>(img.layer(img.size() - 1));
      e[1] = CircuitOracle(h.vec(), qi.angles().value, 1);
    }
    Tensor tokens({2, 3});
    for (size_t j = 0; j < 2; ++j)
      for (size_t i = 0; i < 3; ++i) tokens[j * 3 + i] = e[j][i];
    Tensor fused = m.attention().Forward(tokens).Reshaped({6});
    auto gate = nn::Softmax(m.gate_layer().Forward(fused).vec());
    std::vector<double> y(3);
    for (size_t i = 0; i < 3; ++i) y[i] = gate[0] * e[0][i] + gate[1] * e[1][i];
    for (size_t j = 0; j < 2; ++j) {
      auto want = m.head(j).Forward(Tensor::Vector(y)).vec();
      for (size_t c = 0; c < want.size(); ++c) EXPECT_NEAR(got[j][c], want[c], kOracleTol);
    }
  }
}

// Central differences of the summed cross-entropy over every parameter.
double FullGradCheck(MqmoeModel& m, const Example& ex) {
  m.ZeroGrad();
  m.ForwardBackward(ex);
  auto loss = [&] {
    auto logits = m.Logits(ex);
    double s = 0;
    for (size_t j = 0; j < logits.size(); ++j) s += nn::SoftmaxCrossEntropy(logits[j], ex.labels[j], nullptr);
    return s;
  };
  double worst = 0;
  for (Param* p : m.Params()) {
    for (size_t i = 0; i < p->value.size(); ++i) {
      const double o = p->value[i];
      p->value[i] = o + kH;
      const double fp = loss();
      p->value[i] = o - kH;
      const double fm = loss();
      p->value[i] = o;
      worst = std::max(worst, RelErr((fp - fm) / (2 * kH), p->grad[i]));
    }
  }
  return worst;
}

TEST(MqmoeTest, FullGradientCheck) {
  Prng g(24);
  for (int t = 0; t < 10; ++t) {
    MqmoeModel m(TinyConfig(), 100 + t);
    EXPECT_LE(FullGradCheck(m, RandomSample(g)), kRelTol);
  }
}

TEST(MqmoeTest, ClassicalModeGradientCheck) {
  Prng g(25);
  for (int t = 0; t < 10; ++t) {
    MqmoeModel m(TinyConfig(false), 200 + t);
    EXPECT_LE(FullGradCheck(m, RandomSample(g)), kRelTol);
  }
}

TEST(MqmoeTest, ZeroGateWeightZeroesCombinationGradient) {
  MqmoeModel m(TinyConfig(), 26);
  m.OverrideGate(std::vector<double>{0.0, 1.0});
  Prng g(27);
  m.ZeroGrad();
  m.ForwardBackward(RandomSample(g));
  for (Param* p : m.expert(0).Params())
    for (double v : p->grad.values()) EXPECT_EQ(v, 0.0);
  double other = 0;
  for (Param* p : m.expert(1).Params())
    for (double v : p->grad.values()) other += std::fabs(v);
  EXPECT_GT(other, 0.0);
}

TEST(MqmoeTest, OneStepLowersBatchLoss) {
  MqmoeModel m(TinyConfig(), 28);
  Prng g(29);
  std::vector<Example> batch;
  for (int i = 0; i < 8; ++i) batch.push_back(RandomSample(g));
  const double before = nn::Evaluate(m, batch).loss;
  nn::TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 8;
  nn::TrainLocal(m, batch, cfg);
  EXPECT_LT(nn::Evaluate(m, batch).loss, before);
}

TEST(MqmoeTest, InputAndConfigErrors) {
  MqmoeModel m(TinyConfig(), 30);
  Prng g(31);
  Example ex = RandomSample(g);
  ex.inputs.pop_back();
  EXPECT_THROW(m.Logits(ex), InputError);
  ex = RandomSample(g);
  ex.inputs[1] = Tensor();
  EXPECT_THROW(m.Logits(ex), InputError);
  auto bad = TinyConfig();
  bad.experts[0].encoder[0].out = 4;
  EXPECT_THROW(MqmoeModel(bad, 1), ConfigError);
  bad = TinyConfig(false);
  bad.experts[0].encoder[0].out = 4;
  EXPECT_THROW(MqmoeModel(bad, 1), ConfigError);
}

}  // namespace
}  // namespace mqfl::mqmoe
