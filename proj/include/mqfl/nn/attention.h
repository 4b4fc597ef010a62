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

#ifndef MQFL_NN_ATTENTION_H_
#define MQFL_NN_ATTENTION_H_

#include <string>
#include <vector>

#include "mqfl/nn/layers.h"

namespace mqfl::nn {

// softmax(Q K^T / sqrt(d_k)) V for Q [Tq, dk], K [Tk, dk], V [Tk, dv].
// When `weights` is given it receives the [Tq, Tk] attention matrix.
Tensor ScaledDotAttention(const Tensor& q, const Tensor& k, const Tensor& v,
                          Tensor* weights = nullptr);

// Multi-head attention over token matrices [T, d_model]. Projections W_q,
// W_k, W_v, W_o are [d_model, d_model] with biases; heads split the
// projected columns evenly.
class MultiHeadAttention : public Layer {
 public:
  // Throws ConfigError unless d_model % heads == 0.
  MultiHeadAttention(size_t d_model, size_t heads, Prng& prng,
                     const std::string& name = "mha");

  struct Grads {
    Tensor dq, dk, dv;
  };

  Tensor Attend(const Tensor& xq, const Tensor& xk, const Tensor& xv);
  Grads AttendBackward(const Tensor& grad_out);

  // Self-attention: Attend(x, x, x).
  std::string kind() const override { return "mha"; }
  Tensor Forward(const Tensor& x) override;
  Tensor Backward(const Tensor& grad_out) override;
  std::vector<Param*> Params() override {
    return {&wq_, &bq_, &wk_, &bk_, &wv_, &bv_, &wo_, &bo_};
  }
  Shape OutputShape(const Shape& input) const override;

  size_t d_model() const { return d_; }
  size_t heads() const { return h_; }
  Param& wq() { return wq_; }
  Param& wk() { return wk_; }
  Param& wv() { return wv_; }
  Param& wo() { return wo_; }
  Param& bq() { return bq_; }
  Param& bk() { return bk_; }
  Param& bv() { return bv_; }
  Param& bo() { return bo_; }

 private:
  size_t d_, h_, dk_;
  Param wq_, bq_, wk_, bk_, wv_, bv_, wo_, bo_;
  // Forward cache.
  Tensor xq_, xk_, xv_, q_, k_, v_, concat_;
  std::vector<Tensor> attn_;
};

}  // namespace mqfl::nn

#endif  // MQFL_NN_ATTENTION_H_
