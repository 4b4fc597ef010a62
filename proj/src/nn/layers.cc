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

#include "mqfl/nn/layers.h"

#include <cmath>
#include <limits>
#include <numbers>

#include "mqfl/errors.h"

namespace mqfl::nn {

namespace {

// Glorot-uniform fill.
Tensor GlorotUniform(Shape shape, size_t fan_in, size_t fan_out, Prng& prng) {
  Tensor t(std::move(shape));
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> d(-a, a);
  for (auto& v : t.values()) v = d(prng);
  return t;
}

}  // namespace

Activation ParseActivation(const std::string& name) {
  if (name == "none" || name.empty()) return Activation::kNone;
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw ConfigError("unknown activation '" + name + "'", "activation");
}

// ---- Dense ----------------------------------------------------------------

Dense::Dense(size_t in, size_t out, Prng& prng, const std::string& name)
    : in_(in), out_(out),
      w_(name + ".w", GlorotUniform({out, in}, in, out, prng)),
      b_(name + ".b", Tensor({out})) {
  if (in == 0 || out == 0) throw ConfigError("dense sizes must be positive", name);
}

Shape Dense::OutputShape(const Shape& input) const {
  if (input != Shape{in_}) {
    throw ContractViolation("dense expects " + ShapeString({in_}) + ", got " +
                            ShapeString(input));
  }
  return {out_};
}

Tensor Dense::Forward(const Tensor& x) {
  CheckShape(x, {in_}, "dense input");
  x_ = x;
  Tensor y({out_});
  for (size_t o = 0; o < out_; ++o) {
    double s = b_.value[o];
    const double* row = &w_.value[o * in_];
    for (size_t i = 0; i < in_; ++i) s += row[i] * x[i];
    y[o] = s;
  }
  return y;
}

Tensor Dense::Backward(const Tensor& g) {
  CheckShape(g, {out_}, "dense grad");
  Tensor dx({in_});
  for (size_t o = 0; o < out_; ++o) {
    b_.grad[o] += g[o];
    double* wg = &w_.grad[o * in_];
    const double* w = &w_.value[o * in_];
    for (size_t i = 0; i < in_; ++i) {
      wg[i] += g[o] * x_[i];
      dx[i] += g[o] * w[i];
    }
  }
  return dx;
}

// ---- Conv2d ---------------------------------------------------------------

Conv2d::Conv2d(size_t in_channels, size_t out_channels, size_t kernel, Prng& prng,
               const std::string& name)
    : cin_(in_channels), cout_(out_channels), k_(kernel),
      w_(name + ".w", GlorotUniform({out_channels, in_channels, kernel, kernel},
                                    in_channels * kernel * kernel,
                                    out_channels * kernel * kernel, prng)),
      b_(name + ".b", Tensor({out_channels})) {
  if (!cin_ || !cout_ || !k_) throw ConfigError("conv sizes must be positive", name);
}

Shape Conv2d::OutputShape(const Shape& in) const {
  if (in.size() != 3 || in[0] != cin_ || in[1] < k_ || in[2] < k_) {
    throw ContractViolation("conv expects [" + std::to_string(cin_) +
                            ", H>=k, W>=k], got " + ShapeString(in));
  }
  return {cout_, in[1] - k_ + 1, in[2] - k_ + 1};
}

Tensor Conv2d::Forward(const Tensor& x) {
  const Shape os = OutputShape(x.shape());
  x_ = x;
  const size_t h = x.dim(1), w = x.dim(2), oh = os[1], ow = os[2];
  Tensor y(os);
  for (size_t o = 0; o < cout_; ++o) {
    for (size_t r = 0; r < oh; ++r) {
      for (size_t c = 0; c < ow; ++c) {
        double s = b_.value[o];
        for (size_t ci = 0; ci < cin_; ++ci)
          for (size_t i = 0; i < k_; ++i)
            for (size_t j = 0; j < k_; ++j)
              s += w_.value[((o * cin_ + ci) * k_ + i) * k_ + j] *
                   x[(ci * h + r + i) * w + c + j];
        y[(o * oh + r) * ow + c] = s;
      }
    }
  }
  return y;
}

Tensor Conv2d::Backward(const Tensor& g) {
  const Shape os = OutputShape(x_.shape());
  CheckShape(g, os, "conv grad");
  const size_t h = x_.dim(1), w = x_.dim(2), oh = os[1], ow = os[2];
  Tensor dx(x_.shape());
  for (size_t o = 0; o < cout_; ++o) {
    for (size_t r = 0; r < oh; ++r) {
      for (size_t c = 0; c < ow; ++c) {
        const double go = g[(o * oh + r) * ow + c];
        b_.grad[o] += go;
        for (size_t ci = 0; ci < cin_; ++ci)
          for (size_t i = 0; i < k_; ++i)
            for (size_t j = 0; j < k_; ++j) {
              const size_t wi = ((o * cin_ + ci) * k_ + i) * k_ + j;
              const size_t xi = (ci * h + r + i) * w + c + j;
              w_.grad[wi] += go * x_[xi];
              dx[xi] += go * w_.value[wi];
            }
      }
    }
  }
  return dx;
}

// ---- MaxPool2d ------------------------------------------------------------

MaxPool2d::MaxPool2d(size_t k) : k_(k) {
  if (k == 0) throw ConfigError("pool size must be positive", "maxpool");
}

Shape MaxPool2d::OutputShape(const Shape& in) const {
  if (in.size() != 3 || in[1] < k_ || in[2] < k_) {
    throw ContractViolation("maxpool expects [C, H>=k, W>=k], got " + ShapeString(in));
  }
  return {in[0], in[1] / k_, in[2] / k_};
}

Tensor MaxPool2d::Forward(const Tensor& x) {
  const Shape os = OutputShape(x.shape());
  in_shape_ = x.shape();
  const size_t h = x.dim(1), w = x.dim(2);
  Tensor y(os);
  argmax_.assign(y.size(), 0);
  for (size_t ch = 0; ch < os[0]; ++ch)
    for (size_t r = 0; r < os[1]; ++r)
      for (size_t c = 0; c < os[2]; ++c) {
        double best = -std::numeric_limits<double>::infinity();
        size_t arg = 0;
        for (size_t i = 0; i < k_; ++i)
          for (size_t j = 0; j < k_; ++j) {
            const size_t xi = (ch * h + r * k_ + i) * w + c * k_ + j;
            if (x[xi] > best) {
              best = x[xi];
              arg = xi;
            }
          }
        const size_t yi = (ch * os[1] + r) * os[2] + c;
        y[yi] = best;
        argmax_[yi] = arg;
      }
  return y;
}

Tensor MaxPool2d::Backward(const Tensor& g) {
  if (g.size() != argmax_.size()) throw ContractViolation("maxpool grad shape");
  Tensor dx(in_shape_);
  for (size_t i = 0; i < g.size(); ++i) dx[argmax_[i]] += g[i];
  return dx;
}

// ---- Activations ----------------------------------------------------------

ActivationLayer::ActivationLayer(Activation act) : act_(act) {}

std::string ActivationLayer::kind() const {
  switch (act_) {
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
    default: return "identity";
  }
}

Tensor ActivationLayer::Forward(const Tensor& x) {
  Tensor y = x;
  if (act_ == Activation::kRelu) {
    for (auto& v : y.values()) v = v > 0 ? v : 0.0;
  } else if (act_ == Activation::kTanh) {
    for (auto& v : y.values()) v = std::tanh(v);
  }
  y_ = y;
  return y;
}

Tensor ActivationLayer::Backward(const Tensor& g) {
  CheckShape(g, y_.shape(), "activation grad");
  Tensor dx = g;
  if (act_ == Activation::kRelu) {
    for (size_t i = 0; i < dx.size(); ++i) if (y_[i] <= 0) dx[i] = 0.0;
  } else if (act_ == Activation::kTanh) {
    for (size_t i = 0; i < dx.size(); ++i) dx[i] *= 1.0 - y_[i] * y_[i];
  }
  return dx;
}

// ---- Flatten --------------------------------------------------------------

Tensor Flatten::Forward(const Tensor& x) {
  in_shape_ = x.shape();
  return x.Reshaped({x.size()});
}

Tensor Flatten::Backward(const Tensor& g) { return g.Reshaped(in_shape_); }

// ---- QuantumLayer ---------------------------------------------------------

QuantumLayer::QuantumLayer(int qubits, int layers, Prng& prng, const std::string& name)
    : qubits_(qubits), layers_(layers) {
  if (qubits < 1 || qubits > quantum::kMaxQubits || layers < 1) {
    throw ConfigError("quantum layer needs 1.." + std::to_string(quantum::kMaxQubits) +
                          " qubits and at least one layer", name);
  }
  Tensor a({static_cast<size_t>(layers), static_cast<size_t>(qubits)});
  std::uniform_real_distribution<double> d(0.0, 2.0 * std::numbers::pi);
  for (auto& v : a.values()) v = d(prng);
  angles_ = Param(name + ".theta", std::move(a));
}

quantum::PqcConfig QuantumLayer::config() const {
  return quantum::PqcConfig{qubits_, layers_, angles_.value.vec()};
}

Shape QuantumLayer::OutputShape(const Shape& input) const {
  const Shape want{static_cast<size_t>(qubits_)};
  if (input != want) {
    throw ContractViolation("quantum layer expects " + ShapeString(want) + ", got " +
                            ShapeString(input));
  }
  return want;
}

Tensor QuantumLayer::Forward(const Tensor& x) {
  OutputShape(x.shape());
  x_ = x.vec();
  return Tensor::Vector(quantum::QuantumLayerForward(x_, config()));
}

Tensor QuantumLayer::Backward(const Tensor& g) {
  OutputShape(g.shape());
  quantum::QuantumGradient qg = quantum::ParamShiftGrad(x_, config(), g.values());
  for (size_t i = 0; i < qg.angles.size(); ++i) angles_.grad[i] += qg.angles[i];
  return Tensor::Vector(std::move(qg.inputs));
}

// ---- Sequential -----------------------------------------------------------

Tensor Sequential::Forward(const Tensor& x) {
  Tensor h = x;
  for (auto& l : layers_) h = l->Forward(h);
  return h;
}

Tensor Sequential::Backward(const Tensor& g) {
  Tensor d = g;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) d = (*it)->Backward(d);
  return d;
}

std::vector<Param*> Sequential::Params() {
  std::vector<Param*> out;
  for (auto& l : layers_) {
    auto p = l->Params();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

Shape Sequential::OutputShape(const Shape& input) const {
  Shape s = input;
  for (const auto& l : layers_) s = l->OutputShape(s);
  return s;
}

}  // namespace mqfl::nn
