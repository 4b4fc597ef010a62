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

#include "mqfl/nn/optimizer.h"

#include <cmath>

#include "mqfl/errors.h"

namespace mqfl::nn {

namespace {

void CheckGrad(const Param& p) {
  if (p.grad.shape() != p.value.shape()) {
    throw ContractViolation("gradient shape differs from parameter " + p.name);
  }
}

}  // namespace

Optimizer::Optimizer(double lr) : lr_(lr) {
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive", "lr");
}

void Optimizer::set_lr(double lr) {
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive", "lr");
  lr_ = lr;
}

void Sgd::Step(std::span<Param* const> params) {
  for (Param* p : params) {
    CheckGrad(*p);
    for (size_t i = 0; i < p->value.size(); ++i) p->value[i] -= lr_ * p->grad[i];
  }
}

Adam::Adam(double lr, double beta1, double beta2, double eps)
    : Optimizer(lr), b1_(beta1), b2_(beta2), eps_(eps) {}

void Adam::Step(std::span<Param* const> params) {
  if (t_ == 0) {
    m_.clear();
    v_.clear();
    for (Param* p : params) {
      m_.emplace_back(p->value.size(), 0.0);
      v_.emplace_back(p->value.size(), 0.0);
    }
  } else if (params.size() != m_.size()) {
    throw ContractViolation("parameter layout changed between optimizer steps");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  for (size_t k = 0; k < params.size(); ++k) {
    Param& p = *params[k];
    CheckGrad(p);
    if (p.value.size() != m_[k].size()) {
      throw ContractViolation("parameter layout changed between optimizer steps");
    }
    for (size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      m_[k][i] = b1_ * m_[k][i] + (1 - b1_) * g;
      v_[k][i] = b2_ * v_[k][i] + (1 - b2_) * g * g;
      const double mh = m_[k][i] / c1;
      const double vh = v_[k][i] / c2;
      p.value[i] -= lr_ * mh / (std::sqrt(vh) + eps_);
    }
  }
}

std::unique_ptr<Optimizer> MakeOptimizer(const std::string& name, double lr) {
  if (name == "sgd") return std::make_unique<Sgd>(lr);
  if (name == "adam") return std::make_unique<Adam>(lr);
  throw ConfigError("unknown optimizer '" + name + "'", "optimizer");
}

}  // namespace mqfl::nn
