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

#ifndef MQFL_NN_MODEL_H_
#define MQFL_NN_MODEL_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mqfl/nn/layers.h"

namespace mqfl::nn {

// One sample: an input tensor per modality and a class label per output
// head.
struct Example {
  std::vector<Tensor> inputs;
  std::vector<int> labels;
};

// Anything train_local can fit.
class Trainable {
 public:
  virtual ~Trainable() = default;
  virtual size_t num_heads() const = 0;
  // Per-head class logits.
  virtual std::vector<std::vector<double>> Logits(const Example& ex) = 0;
  // Summed cross-entropy over heads; adds the gradient into Params().
  virtual double ForwardBackward(const Example& ex) = 0;
  virtual std::vector<Param*> Params() = 0;

  void ZeroGrad();
  void ScaleGrad(double factor);
  size_t ParamCount();
};

// Single-input, single-head network.
class Classifier : public Trainable {
 public:
  explicit Classifier(std::unique_ptr<Sequential> net) : net_(std::move(net)) {}
  size_t num_heads() const override { return 1; }
  std::vector<std::vector<double>> Logits(const Example& ex) override;
  double ForwardBackward(const Example& ex) override;
  std::vector<Param*> Params() override { return net_->Params(); }
  Sequential& net() { return *net_; }

 private:
  std::unique_ptr<Sequential> net_;
};

// Builds a Sequential from a JSON-like layer list description. Each layer
// is one of: dense{out, activation}, conv2d{channels, kernel}, maxpool{k},
// flatten, relu, tanh, quantum{qubits, layers}, mha{heads}.
struct LayerSpec {
  std::string type;
  size_t out = 0;
  size_t channels = 0;
  size_t kernel = 0;
  size_t k = 0;
  int qubits = 0;
  int layers = 0;
  size_t heads = 0;
  std::string activation;
};
std::unique_ptr<Sequential> BuildSequential(const std::vector<LayerSpec>& specs,
                                            const Shape& input, Prng& prng,
                                            const std::string& prefix);

}  // namespace mqfl::nn

#endif  // MQFL_NN_MODEL_H_
