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

#include "mqfl/nn/attention.h"

#include <cmath>

#include "mqfl/errors.h"
#include "mqfl/nn/loss.h"

namespace mqfl::nn {

namespace {

Tensor Glorot(size_t rows, size_t cols, Prng& prng) {
  Tensor t({rows, cols});
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> d(-a, a);
  for (auto& v : t.values()) v = d(prng);
  return t;
}

// y = x W^T + b, x [T, in], W [out, in].
Tensor Project(const Tensor& x, const Tensor& w, const Tensor& b) {
  const size_t t = x.dim(0), in = x.dim(1), out = w.dim(0);
  Tensor y({t, out});
  for (size_t r = 0; r < t; ++r)
    for (size_t o = 0; o < out; ++o) {
      double s = b[o];
      for (size_t i = 0; i < in; ++i) s += x[r * in + i] * w[o * in + i];
      y[r * out + o] = s;
    }
  return y;
}

// Accumulates dW += g^T x, db += colsum(g); returns dx = g W.
Tensor ProjectBackward(const Tensor& x, const Tensor& w, const Tensor& g, Param& wp,
                       Param& bp) {
  const size_t t = x.dim(0), in = x.dim(1), out = w.dim(0);
  Tensor dx({t, in});
  for (size_t r = 0; r < t; ++r)
    for (size_t o = 0; o < out; ++o) {
      const double go = g[r * out + o];
      bp.grad[o] += go;
      for (size_t i = 0; i < in; ++i) {
        wp.grad[o * in + i] += go * x[r * in + i];
        dx[r * in + i] += go * w[o * in + i];
      }
    }
  return dx;
}

}  // namespace

Tensor ScaledDotAttention(const Tensor& q, const Tensor& k, const Tensor& v,
                          Tensor* weights) {
  if (q.rank() != 2 || k.rank() != 2 || v.rank() != 2 || q.dim(1) != k.dim(1) ||
      k.dim(0) != v.dim(0)) {
    throw ContractViolation("attention shapes do not compose");
  }
  const size_t tq = q.dim(0), tk = k.dim(0), dk = q.dim(1), dv = v.dim(1);
  const double inv = 1.0 / std::sqrt(static_cast<double>(dk));
  Tensor a({tq, tk});
  Tensor out({tq, dv});
  std::vector<double> logits(tk);
  for (size_t i = 0; i < tq; ++i) {
    for (size_t j = 0; j < tk; ++j) {
      double s = 0;
      for (size_t c = 0; c < dk; ++c) s += q[i * dk + c] * k[j * dk + c];
      logits[j] = s * inv;
    }
    auto p = Softmax(logits);
    for (size_t j = 0; j < tk; ++j) {
      a[i * tk + j] = p[j];
      for (size_t c = 0; c < dv; ++c) out[i * dv + c] += p[j] * v[j * dv + c];
    }
  }
  if (weights) *weights = std::move(a);
  return out;
}

MultiHeadAttention::MultiHeadAttention(size_t d_model, size_t heads, Prng& prng,
                                       const std::string& name)
    : d_(d_model), h_(heads), dk_(heads ? d_model / heads : 0) {
  if (heads == 0 || d_model == 0 || d_model % heads != 0) {
    throw ConfigError("d_model (" + std::to_string(d_model) +
                          ") must be divisible by the head count (" +
                          std::to_string(heads) + ")", name);
  }
  wq_ = Param(name + ".wq", Glorot(d_, d_, prng));
  wk_ = Param(name + ".wk", Glorot(d_, d_, prng));
  wv_ = Param(name + ".wv", Glorot(d_, d_, prng));
  wo_ = Param(name + ".wo", Glorot(d_, d_, prng));
  bq_ = Param(name + ".bq", Tensor({d_}));
  bk_ = Param(name + ".bk", Tensor({d_}));
  bv_ = Param(name + ".bv", Tensor({d_}));
  bo_ = Param(name + ".bo", Tensor({d_}));
}

Shape MultiHeadAttention::OutputShape(const Shape& in) const {
  if (in.size() != 2 || in[1] != d_) {
    throw ContractViolation("attention expects [T, " + std::to_string(d_) + "], got " +
                            ShapeString(in));
  }
  return in;
}

Tensor MultiHeadAttention::Attend(const Tensor& xq, const Tensor& xk, const Tensor& xv) {
  OutputShape(xq.shape());
  OutputShape(xk.shape());
  OutputShape(xv.shape());
  if (xk.dim(0) != xv.dim(0)) throw ContractViolation("key/value token counts differ");
  xq_ = xq;
  xk_ = xk;
  xv_ = xv;
  q_ = Project(xq, wq_.value, bq_.value);
  k_ = Project(xk, wk_.value, bk_.value);
  v_ = Project(xv, wv_.value, bv_.value);
  const size_t tq = xq.dim(0), tk = xk.dim(0);
  concat_ = Tensor({tq, d_});
  attn_.assign(h_, Tensor());
  for (size_t h = 0; h < h_; ++h) {
    Tensor qh({tq, dk_}), kh({tk, dk_}), vh({tk, dk_});
    for (size_t r = 0; r < tq; ++r)
      for (size_t c = 0; c < dk_; ++c) qh[r * dk_ + c] = q_[r * d_ + h * dk_ + c];
    for (size_t r = 0; r < tk; ++r)
      for (size_t c = 0; c < dk_; ++c) {
        kh[r * dk_ + c] = k_[r * d_ + h * dk_ + c];
        vh[r * dk_ + c] = v_[r * d_ + h * dk_ + c];
      }
    Tensor oh = ScaledDotAttention(qh, kh, vh, &attn_[h]);
    for (size_t r = 0; r < tq; ++r)
      for (size_t c = 0; c < dk_; ++c) concat_[r * d_ + h * dk_ + c] = oh[r * dk_ + c];
  }
  return Project(concat_, wo_.value, bo_.value);
}

MultiHeadAttention::Grads MultiHeadAttention::AttendBackward(const Tensor& g) {
  CheckShape(g, concat_.shape(), "attention grad");
  const size_t tq = xq_.dim(0), tk = xk_.dim(0);
  const double inv = 1.0 / std::sqrt(static_cast<double>(dk_));
  Tensor dconcat = ProjectBackward(concat_, wo_.value, g, wo_, bo_);
  Tensor dq({tq, d_}), dk({tk, d_}), dv({tk, d_});
  for (size_t h = 0; h < h_; ++h) {
    const Tensor& a = attn_[h];
    const size_t off = h * dk_;
    for (size_t i = 0; i < tq; ++i) {
      // dA_ij = dO_i . V_j ; dS = A (dA - sum_j A dA)
      std::vector<double> da(tk, 0.0);
      double dot = 0;
      for (size_t j = 0; j < tk; ++j) {
        for (size_t c = 0; c < dk_; ++c) da[j] += dconcat[i * d_ + off + c] * v_[j * d_ + off + c];
        dot += a[i * tk + j] * da[j];
      }
      for (size_t j = 0; j < tk; ++j) {
        const double aij = a[i * tk + j];
        const double ds = aij * (da[j] - dot) * inv;
        for (size_t c = 0; c < dk_; ++c) {
          dv[j * d_ + off + c] += aij * dconcat[i * d_ + off + c];
          dq[i * d_ + off + c] += ds * k_[j * d_ + off + c];
          dk[j * d_ + off + c] += ds * q_[i * d_ + off + c];
        }
      }
    }
  }
  Grads out;
  out.dq = ProjectBackward(xq_, wq_.value, dq, wq_, bq_);
  out.dk = ProjectBackward(xk_, wk_.value, dk, wk_, bk_);
  out.dv = ProjectBackward(xv_, wv_.value, dv, wv_, bv_);
  return out;
}

Tensor MultiHeadAttention::Forward(const Tensor& x) { return Attend(x, x, x); }

Tensor MultiHeadAttention::Backward(const Tensor& g) {
  Grads gr = AttendBackward(g);
  Tensor dx = gr.dq;
  for (size_t i = 0; i < dx.size(); ++i) dx[i] += gr.dk[i] + gr.dv[i];
  return dx;
}

}  // namespace mqfl::nn
