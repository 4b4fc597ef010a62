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

#include "mqfl/ckks/encoder.h"

#include <array>
#include <cmath>
#include <utility>

#include "mqfl/errors.h"
#include "mqfl/ring/modular.h"

namespace mqfl::ckks {

namespace {

void BitReverse(std::vector<std::complex<double>>& v) {
  const size_t n = v.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j >= bit; bit >>= 1) j -= bit;
    j += bit;
    if (i < j) std::swap(v[i], v[j]);
  }
}

// Below this magnitude a scaled coefficient is reduced through int64.
constexpr double kInt64Safe = 9.0e18;

}  // namespace

Encoder::Encoder(ContextPtr context) : context_(std::move(context)) {
  if (!context_) throw ContractViolation("encoder needs a context");
}

// Evaluates the length-n/2 complex polynomial at zeta^(5^j), output in slot
// order. Input is the folded coefficient vector u_k = m_k + i m_{k+n/2}.
void Encoder::SpecialFft(std::vector<std::complex<double>>& v) const {
  const size_t slots = v.size();
  const uint64_t m = 2 * context_->degree();
  const auto& rot = context_->rot_group();
  const auto& roots = context_->root_powers();
  BitReverse(v);
  for (size_t len = 2; len <= slots; len <<= 1) {
    const size_t half = len >> 1;
    const uint64_t quarter = len << 2;
    for (size_t i = 0; i < slots; i += len) {
      for (size_t j = 0; j < half; ++j) {
        uint64_t idx = (rot[j] % quarter) * (m / quarter);
        std::complex<double> a = v[i + j];
        std::complex<double> b = v[i + j + half] * roots[idx];
        v[i + j] = a + b;
        v[i + j + half] = a - b;
      }
    }
  }
}

void Encoder::SpecialFftInverse(std::vector<std::complex<double>>& v) const {
  const size_t slots = v.size();
  const uint64_t m = 2 * context_->degree();
  const auto& rot = context_->rot_group();
  const auto& roots = context_->root_powers();
  for (size_t len = slots; len >= 2; len >>= 1) {
    const size_t half = len >> 1;
    const uint64_t quarter = len << 2;
    for (size_t i = 0; i < slots; i += len) {
      for (size_t j = 0; j < half; ++j) {
        uint64_t idx = (quarter - rot[j] % quarter) * (m / quarter);
        std::complex<double> a = v[i + j] + v[i + j + half];
        std::complex<double> b = (v[i + j] - v[i + j + half]) * roots[idx];
        v[i + j] = a;
        v[i + j + half] = b;
      }
    }
  }
  BitReverse(v);
  const double inv = 1.0 / static_cast<double>(slots);
  for (auto& x : v) x *= inv;
}

Plaintext Encoder::Encode(std::span<const double> values) const {
  return Encode(values, context_->default_scale(), context_->max_level());
}

Plaintext Encoder::Encode(std::span<const double> values, double scale,
                          int level) const {
  const size_t n = context_->degree();
  const size_t slots = n / 2;
  if (values.size() > slots) {
    throw CapacityError("cannot encode " + std::to_string(values.size()) +
                        " values into " + std::to_string(slots) + " slots");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ContractViolation("encoding scale must be positive and finite");
  }
  const ring::Chain& chain = context_->ChainAt(level);

  std::vector<std::complex<double>> u(slots);
  for (size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ContractViolation("cannot encode a non-finite value");
    }
    u[i] = values[i];
  }
  SpecialFftInverse(u);

  // Coefficients must stay well inside (-Q/2, Q/2).
  const double limit_log2 = context_->LogModulus(level) - 2.0;
  ring::RnsPoly poly = ring::RnsPoly::Zero(n, chain, ring::Domain::kCoefficient);
  auto put = [&](size_t k, double c) {
    long double scaled = std::round(static_cast<long double>(c) * scale);
    if (scaled != 0 && std::log2(std::fabs(static_cast<double>(scaled))) > limit_log2) {
      throw ContractViolation("scaled value does not fit under the level modulus");
    }
    if (std::fabs(static_cast<double>(scaled)) < kInt64Safe) {
      int64_t s = static_cast<int64_t>(scaled);
      for (size_t r = 0; r < chain.size(); ++r) {
        poly.mutable_row(r)[k] = ring::ReduceSigned(s, chain[r]->value());
      }
      return;
    }
    for (size_t r = 0; r < chain.size(); ++r) {
      const long double q = static_cast<long double>(chain[r]->value());
      long double rem = std::fmod(scaled, q);
      if (rem < 0) rem += q;
      uint64_t v = static_cast<uint64_t>(rem);
      if (v >= chain[r]->value()) v -= chain[r]->value();
      poly.mutable_row(r)[k] = v;
    }
  };
  for (size_t i = 0; i < slots; ++i) {
    put(i, u[i].real());
    put(i + slots, u[i].imag());
  }
  poly.ToEvaluation();
  return Plaintext{std::move(poly), scale, level};
}

std::vector<std::complex<double>> Encoder::DecodeComplex(const Plaintext& pt) const {
  const size_t n = context_->degree();
  const size_t slots = n / 2;
  if (pt.poly.degree() != n || pt.level < 0 || pt.level > context_->max_level() ||
      !ring::SameChain(pt.poly.chain(), context_->ChainAt(pt.level))) {
    throw ContractViolation("plaintext does not belong to this context");
  }
  ring::RnsPoly poly = pt.poly;
  if (poly.domain() == ring::Domain::kEvaluation) poly.ToCoefficient();

  const ring::CrtComposer& composer = context_->composer(pt.level);
  const size_t primes = poly.num_primes();
  std::array<uint64_t, ring::CrtComposer::kMaxPrimes> residues{};
  auto coeff = [&](size_t k) {
    for (size_t r = 0; r < primes; ++r) residues[r] = poly.row(r)[k];
    return static_cast<double>(composer.ComposeCentered({residues.data(), primes}) /
                               static_cast<long double>(pt.scale));
  };
  std::vector<std::complex<double>> u(slots);
  for (size_t i = 0; i < slots; ++i) u[i] = {coeff(i), coeff(i + slots)};
  SpecialFft(u);
  return u;
}

std::vector<double> Encoder::Decode(const Plaintext& pt) const {
  auto z = DecodeComplex(pt);
  std::vector<double> out(z.size());
  for (size_t i = 0; i < z.size(); ++i) out[i] = z[i].real();
  return out;
}

}  // namespace mqfl::ckks
