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

#ifndef MQFL_NN_LAYERS_H_
#define MQFL_NN_LAYERS_H_

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "mqfl/nn/tensor.h"
#include "mqfl/quantum/statevector.h"

namespace mqfl::nn {

using Prng = std::mt19937_64;

// Trainable tensor with its accumulated gradient.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;

  Param() = default;
  Param(std::string n, Tensor v)
      : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}
};

// One sample at a time: Forward caches what Backward needs, Backward adds
// into parameter gradients and returns the gradient for the input.
class Layer {
 public:
  virtual ~Layer() = default;
  virtual std::string kind() const = 0;
  virtual Tensor Forward(const Tensor& x) = 0;
  virtual Tensor Backward(const Tensor& grad_out) = 0;
  virtual std::vector<Param*> Params() { return {}; }
  virtual Shape OutputShape(const Shape& input) const = 0;
};

enum class Activation { kNone, kRelu, kTanh };
Activation ParseActivation(const std::string& name);

// y = W x + b on rank-1 inputs; W is [out, in].
class Dense : public Layer {
 public:
  Dense(size_t in, size_t out, Prng& prng, const std::string& name = "dense");
  std::string kind() const override { return "dense"; }
  Tensor Forward(const Tensor& x) override;
  Tensor Backward(const Tensor& grad_out) override;
  std::vector<Param*> Params() override { return {&w_, &b_}; }
  Shape OutputShape(const Shape& input) const override;

  Param& weight() { return w_; }
  Param& bias() { return b_; }

 private:
  size_t in_, out_;
  Param w_, b_;
  Tensor x_;
};

// Valid cross-correlation, stride 1. Input [C, H, W], kernel [O, C, k, k].
class Conv2d : public Layer {
 public:
  Conv2d(size_t in_channels, size_t out_channels, size_t kernel, Prng& prng,
         const std::string& name = "conv");
  std::string kind() const override { return "conv2d"; }
  Tensor Forward(const Tensor& x) override;
  Tensor Backward(const Tensor& grad_out) override;
  std::vector<Param*> Params() override { return {&w_, &b_}; }
  Shape OutputShape(const Shape& input) const override;

  Param& weight() { return w_; }
  Param& bias() { return b_; }

 private:
  size_t cin_, cout_, k_;
  Param w_, b_;
  Tensor x_;
};

// Non-overlapping k x k max windows over [C, H, W]; trailing rows and
// columns that do not fill a window are dropped.
class MaxPool2d : public Layer {
 public:
  explicit MaxPool2d(size_t k);
  std::string kind() const override { return "maxpool"; }
  Tensor Forward(const Tensor& x) override;
  Tensor Backward(const Tensor& grad_out) override;
  Shape OutputShape(const Shape& input) const override;

 private:
  size_t k_;
  Shape in_shape_;
  std::vector<size_t> argmax_;
};

class ActivationLayer : public Layer {
 public:
  explicit ActivationLayer(Activation act);
  std::string kind() const override;
  Tensor Forward(const Tensor& x) override;
  Tensor Backward(const Tensor& grad_out) override;
  Shape OutputShape(const Shape& input) const override { return input; }

 private:
  Activation act_;
  Tensor y_;
};

class Flatten : public Layer {
 public:
  std::string kind() const override { return "flatten"; }
  Tensor Forward(const Tensor& x) override;
  Tensor Backward(const Tensor& grad_out) override;
  Shape OutputShape(const Shape& input) const override { return {ShapeSize(input)}; }

 private:
  Shape in_shape_;
};

// Angle-encoded parameterized circuit; output j = <Z_j>. Gradients for both
// the circuit angles and the inputs come from the parameter-shift rule.
class QuantumLayer : public Layer {
 public:
  QuantumLayer(int qubits, int layers, Prng& prng, const std::string& name = "pqc");
  std::string kind() const override { return "quantum"; }
  Tensor Forward(const Tensor& x) override;
  Tensor Backward(const Tensor& grad_out) override;
  std::vector<Param*> Params() override { return {&angles_}; }
  Shape OutputShape(const Shape& input) const override;

  quantum::PqcConfig config() const;
  Param& angles() { return angles_; }

 private:
  int qubits_, layers_;
  Param angles_;
  std::vector<double> x_;
};

// Layers applied in order.
class Sequential : public Layer {
 public:
  Sequential() = default;
  void Add(std::unique_ptr<Layer> layer) { layers_.push_back(std::move(layer)); }
  template <typename L, typename... Args>
  L& Emplace(Args&&... args) {
    auto p = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *p;
    layers_.push_back(std::move(p));
    return ref;
  }

  std::string kind() const override { return "sequential"; }
  Tensor Forward(const Tensor& x) override;
  Tensor Backward(const Tensor& grad_out) override;
  std::vector<Param*> Params() override;
  Shape OutputShape(const Shape& input) const override;

  size_t size() const { return layers_.size(); }
  Layer& layer(size_t i) { return *layers_[i]; }

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

}  // namespace mqfl::nn

#endif  // MQFL_NN_LAYERS_H_
