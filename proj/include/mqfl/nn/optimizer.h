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

#ifndef MQFL_NN_OPTIMIZER_H_
#define MQFL_NN_OPTIMIZER_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mqfl/nn/layers.h"

namespace mqfl::nn {

class Optimizer {
 public:
  explicit Optimizer(double lr);
  virtual ~Optimizer() = default;
  // Applies one update from each param's accumulated gradient.
  virtual void Step(std::span<Param* const> params) = 0;
  double lr() const { return lr_; }
  void set_lr(double lr);

 protected:
  double lr_;
};

class Sgd : public Optimizer {
 public:
  using Optimizer::Optimizer;
  void Step(std::span<Param* const> params) override;
};

// Adam with bias correction; moments are bound to the parameter layout of
// the first Step and a later layout change throws ContractViolation.
class Adam : public Optimizer {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);
  void Step(std::span<Param* const> params) override;
  long steps() const { return t_; }

 private:
  double b1_, b2_, eps_;
  long t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

// "sgd" or "adam"; anything else is a ConfigError.
std::unique_ptr<Optimizer> MakeOptimizer(const std::string& name, double lr);

}  // namespace mqfl::nn

#endif  // MQFL_NN_OPTIMIZER_H_
