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

#include "mqfl/ring/rns_poly.h"

#include <algorithm>
#include <array>
#include <string>
#include <utility>

#include "mqfl/errors.h"
#include "mqfl/ring/modular.h"

namespace mqfl::ring {

Chain MakeChain(std::span<const uint64_t> primes, size_t n) {
  Chain chain;
  chain.reserve(primes.size());
  for (uint64_t q : primes) chain.push_back(PrimeModulus::Create(q, n));
  return chain;
}

bool SameChain(const Chain& a, const Chain& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i] && (a[i]->value() != b[i]->value() ||
                         a[i]->degree() != b[i]->degree())) {
      return false;
    }
  }
  return true;
}

RnsPoly::RnsPoly(size_t n, Chain chain, Domain domain)
    : n_(n),
      chain_(std::move(chain)),
      domain_(domain),
      data_(n_ * chain_.size(), 0) {}

RnsPoly RnsPoly::Zero(size_t n, Chain chain, Domain domain) {
  if (chain.empty()) throw ContractViolation("empty modulus chain");
  for (const auto& m : chain) {
    if (m->degree() != n) {
      throw ContractViolation("chain prime built for degree " +
                              std::to_string(m->degree()) + ", expected " +
                              std::to_string(n));
    }
  }
  return RnsPoly(n, std::move(chain), domain);
}

RnsPoly RnsPoly::FromSigned(std::span<const int64_t> coeffs, Chain chain) {
  RnsPoly p = Zero(coeffs.size(), std::move(chain), Domain::kCoefficient);
  for (size_t i = 0; i < p.num_primes(); ++i) {
    const uint64_t q = p.modulus(i).value();
    auto row = p.mutable_row(i);
    for (size_t j = 0; j < p.n_; ++j) row[j] = ReduceSigned(coeffs[j], q);
  }
  return p;
}

void RnsPoly::ToEvaluation() {
  if (domain_ != Domain::kCoefficient) {
    throw ContractViolation("forward NTT requires a coefficient-domain input");
  }
  for (size_t i = 0; i < chain_.size(); ++i) chain_[i]->ForwardNtt(mutable_row(i));
  domain_ = Domain::kEvaluation;
}

void RnsPoly::ToCoefficient() {
  if (domain_ != Domain::kEvaluation) {
    throw ContractViolation("inverse NTT requires an evaluation-domain input");
  }
  for (size_t i = 0; i < chain_.size(); ++i) chain_[i]->InverseNtt(mutable_row(i));
  domain_ = Domain::kCoefficient;
}

RnsPoly RnsPoly::KeepPrimes(size_t count) const {
  if (count == 0 || count > chain_.size()) {
    throw ContractViolation("cannot keep " + std::to_string(count) + " of " +
                            std::to_string(chain_.size()) + " primes");
  }
  RnsPoly out(n_, Chain(chain_.begin(), chain_.begin() + count), domain_);
  std::copy_n(data_.begin(), count * n_, out.data_.begin());
  return out;
}

bool RnsPoly::operator==(const RnsPoly& other) const {
  return n_ == other.n_ && domain_ == other.domain_ &&
         SameChain(chain_, other.chain_) && data_ == other.data_;
}

void CheckCompatible(const RnsPoly& a, const RnsPoly& b) {
  if (a.degree() != b.degree()) {
    throw ContractViolation("ring degree mismatch");
  }
  if (!SameChain(a.chain(), b.chain())) {
    throw ContractViolation("modulus chain mismatch");
  }
  if (a.domain() != b.domain()) {
    throw ContractViolation("domain mismatch");
  }
}

RnsPoly NttForward(RnsPoly p) {
  p.ToEvaluation();
  return p;
}

RnsPoly NttInverse(RnsPoly p) {
  p.ToCoefficient();
  return p;
}

void AddInPlace(RnsPoly& a, const RnsPoly& b) {
  CheckCompatible(a, b);
  for (size_t i = 0; i < a.num_primes(); ++i) {
    const uint64_t q = a.modulus(i).value();
    auto x = a.mutable_row(i);
    auto y = b.row(i);
    for (size_t j = 0; j < x.size(); ++j) x[j] = AddMod(x[j], y[j], q);
  }
}

RnsPoly Add(const RnsPoly& a, const RnsPoly& b) {
  RnsPoly out = a;
  AddInPlace(out, b);
  return out;
}

RnsPoly Sub(const RnsPoly& a, const RnsPoly& b) {
  CheckCompatible(a, b);
  RnsPoly out = a;
  for (size_t i = 0; i < out.num_primes(); ++i) {
    const uint64_t q = out.modulus(i).value();
    auto x = out.mutable_row(i);
    auto y = b.row(i);
    for (size_t j = 0; j < x.size(); ++j) x[j] = SubMod(x[j], y[j], q);
  }
  return out;
}

RnsPoly Negate(const RnsPoly& a) {
  RnsPoly out = a;
  for (size_t i = 0; i < out.num_primes(); ++i) {
    const uint64_t q = out.modulus(i).value();
    for (auto& x : out.mutable_row(i)) x = NegateMod(x, q);
  }
  return out;
}

RnsPoly Mul(const RnsPoly& a, const RnsPoly& b) {
  CheckCompatible(a, b);
  if (a.domain() == Domain::kCoefficient) {
    return NttInverse(Mul(NttForward(a), NttForward(b)));
  }
  RnsPoly out = a;
  for (size_t i = 0; i < out.num_primes(); ++i) {
    const uint64_t q = out.modulus(i).value();
    auto x = out.mutable_row(i);
    auto y = b.row(i);
    for (size_t j = 0; j < x.size(); ++j) x[j] = MulMod(x[j], y[j], q);
  }
  return out;
}

RnsPoly MulScalar(const RnsPoly& a, int64_t scalar) {
  RnsPoly out = a;
  for (size_t i = 0; i < out.num_primes(); ++i) {
    const uint64_t q = out.modulus(i).value();
    const uint64_t s = ReduceSigned(scalar, q);
    const uint64_t s_shoup = ShoupPrecompute(s, q);
    for (auto& x : out.mutable_row(i)) x = MulShoup(x, s, s_shoup, q);
  }
  return out;
}

RnsPoly RescaleDropPrime(const RnsPoly& a) {
  const size_t count = a.num_primes();
  if (count < 2) {
    throw LevelExhausted("rescale needs at least two primes in the chain");
  }
  const size_t n = a.degree();
  const PrimeModulus& last = a.modulus(count - 1);
  const uint64_t q_last = last.value();
  const uint64_t half = q_last >> 1;

  // (x_last + half) mod q_last in the coefficient domain.
  std::vector<uint64_t> shifted(a.row(count - 1).begin(), a.row(count - 1).end());
  if (a.domain() == Domain::kEvaluation) last.InverseNtt(shifted);
  for (auto& x : shifted) x = AddMod(x, half, q_last);

  RnsPoly out = a.KeepPrimes(count - 1);
  std::vector<uint64_t> correction(n);
  for (size_t i = 0; i + 1 < count; ++i) {
    const PrimeModulus& mod = a.modulus(i);
    const uint64_t q = mod.value();
    const uint64_t half_mod = half % q;
    for (size_t j = 0; j < n; ++j) {
      correction[j] = SubMod(shifted[j] % q, half_mod, q);
    }
    if (a.domain() == Domain::kEvaluation) mod.ForwardNtt(correction);
    const uint64_t inv = InvMod(q_last % q, q);
    const uint64_t inv_shoup = ShoupPrecompute(inv, q);
    auto row = out.mutable_row(i);
    for (size_t j = 0; j < n; ++j) {
      row[j] = MulShoup(SubMod(row[j], correction[j], q), inv, inv_shoup, q);
    }
  }
  return out;
}

RnsPoly ApplyAutomorphism(const RnsPoly& a, uint64_t galois_elt) {
  const size_t n = a.degree();
  const uint64_t two_n = 2 * static_cast<uint64_t>(n);
  if (galois_elt % 2 == 0 || galois_elt >= two_n) {
    throw ContractViolation("galois element must be odd and below 2n");
  }
  const bool eval = a.domain() == Domain::kEvaluation;
  RnsPoly src = eval ? NttInverse(a) : a;
  RnsPoly out = RnsPoly::Zero(n, a.chain(), Domain::kCoefficient);
  for (size_t i = 0; i < a.num_primes(); ++i) {
    const uint64_t q = a.modulus(i).value();
    auto in = src.row(i);
    auto dst = out.mutable_row(i);
    for (size_t j = 0; j < n; ++j) {
      uint64_t idx = (j * galois_elt) % two_n;
      if (idx < n) {
        dst[idx] = in[j];
      } else {
        dst[idx - n] = NegateMod(in[j], q);
      }
    }
  }
  if (eval) out.ToEvaluation();
  return out;
}

CrtComposer::CrtComposer(const Chain& chain) {
  if (chain.empty() || chain.size() > kMaxPrimes) {
    throw ContractViolation("CRT composition supports 1 to " +
                            std::to_string(kMaxPrimes) + " primes");
  }
  for (const auto& m : chain) q_.push_back(m->value());
  inv_.resize(q_.size());
  for (size_t i = 0; i < q_.size(); ++i) {
    for (size_t j = 0; j < i; ++j) {
      inv_[i].push_back(InvMod(q_[j] % q_[i], q_[i]));
    }
  }
  // (Q - 1) / 2 = -1/2 = (q_i - 1) / 2 (mod q_i).
  std::vector<uint64_t> half(q_.size());
  for (size_t i = 0; i < q_.size(); ++i) half[i] = (q_[i] - 1) / 2;
  half_digits_.resize(q_.size());
  Digits(half, half_digits_);
}

void CrtComposer::Digits(std::span<const uint64_t> residues,
                         std::span<uint64_t> digits) const {
  for (size_t i = 0; i < q_.size(); ++i) {
    const uint64_t q = q_[i];
    uint64_t t = residues[i];
    for (size_t j = 0; j < i; ++j) {
      t = MulMod(SubMod(t, digits[j] % q, q), inv_[i][j], q);
    }
    digits[i] = t;
  }
}

long double CrtComposer::Evaluate(std::span<const uint64_t> digits) const {
  long double v = 0.0L;
  for (size_t i = q_.size(); i-- > 0;) {
    v = v * static_cast<long double>(q_[i]) + static_cast<long double>(digits[i]);
  }
  return v;
}

long double CrtComposer::ComposeCentered(
    std::span<const uint64_t> residues) const {
  const size_t k = q_.size();
  std::array<uint64_t, kMaxPrimes> digit_buf;
  std::span<uint64_t> digits(digit_buf.data(), k);
  Digits(residues, digits);
  bool above_half = false;
  for (size_t i = k; i-- > 0;) {
    if (digits[i] != half_digits_[i]) {
      above_half = digits[i] > half_digits_[i];
      break;
    }
  }
  if (!above_half) return Evaluate(digits);
  std::array<uint64_t, kMaxPrimes> negated;
  for (size_t i = 0; i < k; ++i) negated[i] = NegateMod(residues[i], q_[i]);
  Digits(std::span<const uint64_t>(negated.data(), k), digits);
  return -Evaluate(digits);
}

}  // namespace mqfl::ring
