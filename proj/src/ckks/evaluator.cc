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

#include "mqfl/ckks/evaluator.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "mqfl/errors.h"
#include "mqfl/ring/modular.h"

namespace mqfl::ckks {

using ring::Domain;
using ring::RnsPoly;

namespace {

bool ScalesMatch(double a, double b) {
  return std::fabs(a - b) <= kScaleTolerance * std::max(std::fabs(a), std::fabs(b));
}

// Rows [0, count) plus the final (special) row of a key-chain polynomial.
RnsPoly SelectWithSpecial(const RnsPoly& key_poly, const ring::Chain& target) {
  const size_t count = target.size() - 1;
  RnsPoly out = RnsPoly::Zero(key_poly.degree(), target, key_poly.domain());
  for (size_t i = 0; i < count; ++i) {
    std::copy(key_poly.row(i).begin(), key_poly.row(i).end(),
              out.mutable_row(i).begin());
  }
  auto last = key_poly.row(key_poly.num_primes() - 1);
  std::copy(last.begin(), last.end(), out.mutable_row(count).begin());
  return out;
}

}  // namespace

Evaluator::Evaluator(ContextPtr context) : context_(std::move(context)) {
  if (!context_) throw ContractViolation("evaluator needs a context");
}

// Budget bookkeeping: headroom = log Q_l - 1 - log scale - noise bits.
double Evaluator::NoiseBits(const Ciphertext& ct) const {
  return context_->LogModulus(ct.level) - 1.0 - std::log2(ct.scale) -
         ct.noise_budget_bits;
}

void Evaluator::SetNoiseBits(Ciphertext& ct, double bits) const {
  ct.noise_budget_bits =
      context_->LogModulus(ct.level) - 1.0 - std::log2(ct.scale) - bits;
}

void Evaluator::CheckCiphertext(const Ciphertext& ct) const {
  if (ct.parts.size() < 2 || ct.parts.size() > 3) {
    throw ContractViolation("ciphertext must have two or three parts");
  }
  const ring::Chain& chain = context_->ChainAt(ct.level);
  for (const auto& p : ct.parts) {
    if (p.degree() != context_->degree() || !ring::SameChain(p.chain(), chain) ||
        p.domain() != Domain::kEvaluation) {
      throw ContractViolation("ciphertext does not match its level or context");
    }
  }
}

void Evaluator::CheckPair(const Ciphertext& a, const Ciphertext& b) const {
  CheckCiphertext(a);
  CheckCiphertext(b);
  if (a.level != b.level) {
    throw ContractViolation("ciphertext levels differ (" + std::to_string(a.level) +
                            " vs " + std::to_string(b.level) + ")");
  }
  if (!ScalesMatch(a.scale, b.scale)) {
    throw ContractViolation("ciphertext scales differ");
  }
}

void Evaluator::CheckBaseScale(const Ciphertext& a) const {
  const double base = context_->default_scale();
  if (std::fabs(a.scale / base - 1.0) > kBaseScaleTolerance) {
    throw ContractViolation("operand is not at base scale; rescale first");
  }
}

Ciphertext Evaluator::Encrypt(const PublicKey& pk, const Plaintext& pt,
                              ring::Prng& prng, EncryptionTrace* trace) const {
  const ring::Chain& chain = context_->ChainAt(pt.level);
  if (!ring::SameChain(pt.poly.chain(), chain) ||
      pt.poly.domain() != Domain::kEvaluation) {
    throw ContractViolation("plaintext does not match its level");
  }
  const size_t n = context_->degree();
  const size_t primes = chain.size();
  const double sigma = context_->params().error_sigma;
  RnsPoly u = ring::SampleTernary(chain, n, prng);
  u.ToEvaluation();
  RnsPoly e0 = ring::SampleGaussian(chain, n, sigma, prng);
  RnsPoly e1 = ring::SampleGaussian(chain, n, sigma, prng);
  e0.ToEvaluation();
  e1.ToEvaluation();
  RnsPoly c0 = ring::Mul(pk.b.KeepPrimes(primes), u);
  ring::AddInPlace(c0, e0);
  ring::AddInPlace(c0, pt.poly);
  RnsPoly c1 = ring::Mul(pk.a.KeepPrimes(primes), u);
  ring::AddInPlace(c1, e1);

  Ciphertext ct;
  ct.parts.push_back(std::move(c0));
  ct.parts.push_back(std::move(c1));
  ct.scale = pt.scale;
  ct.level = pt.level;
  if (trace) *trace = EncryptionTrace{std::move(u), std::move(e0), std::move(e1)};
  // e0 + e1*s + e*u has magnitude around sigma * sqrt(n) per coefficient.
  SetNoiseBits(ct, std::log2(6.0 * sigma * std::sqrt(static_cast<double>(n))));
  return ct;
}

Plaintext Evaluator::Decrypt(const SecretKey& sk, const Ciphertext& ct) const {
  CheckCiphertext(ct);
  const size_t primes = ct.parts[0].num_primes();
  RnsPoly s = sk.poly.KeepPrimes(primes);
  RnsPoly m = ct.parts[0];
  RnsPoly power = s;
  for (size_t i = 1; i < ct.parts.size(); ++i) {
    ring::AddInPlace(m, ring::Mul(ct.parts[i], power));
    if (i + 1 < ct.parts.size()) power = ring::Mul(power, s);
  }
  return Plaintext{std::move(m), ct.scale, ct.level};
}

Ciphertext Evaluator::Add(const Ciphertext& a, const Ciphertext& b) const {
  Ciphertext out = a;
  AddInPlace(out, b);
  return out;
}

void Evaluator::AddInPlace(Ciphertext& a, const Ciphertext& b) const {
  CheckPair(a, b);
  const double bits = std::max(NoiseBits(a), NoiseBits(b)) + 1.0;
  if (b.parts.size() > a.parts.size()) a.parts.push_back(b.parts[2]);
  else if (b.parts.size() == 3 && a.parts.size() == 3) ring::AddInPlace(a.parts[2], b.parts[2]);
  ring::AddInPlace(a.parts[0], b.parts[0]);
  ring::AddInPlace(a.parts[1], b.parts[1]);
  SetNoiseBits(a, bits);
}

Ciphertext Evaluator::Negate(const Ciphertext& a) const {
  CheckCiphertext(a);
  Ciphertext out = a;
  for (auto& p : out.parts) p = ring::Negate(p);
  return out;
}

Ciphertext Evaluator::Sub(const Ciphertext& a, const Ciphertext& b) const {
  return Add(a, Negate(b));
}

Ciphertext Evaluator::AddPlain(const Ciphertext& a, const Plaintext& p) const {
  CheckCiphertext(a);
  if (p.level != a.level || !ScalesMatch(a.scale, p.scale)) {
    throw ContractViolation("plaintext level or scale differs from ciphertext");
  }
  Ciphertext out = a;
  ring::AddInPlace(out.parts[0], p.poly);
  return out;
}

Ciphertext Evaluator::MulPlain(const Ciphertext& a, const Plaintext& p) const {
  CheckCiphertext(a);
  if (p.level != a.level) {
    throw ContractViolation("plaintext level differs from ciphertext");
  }
  CheckBaseScale(a);
  const double scale = a.scale * p.scale;
  if (std::log2(scale) >= context_->LogModulus(a.level) - 1.0) {
    throw LevelExhausted("product scale exceeds the remaining modulus");
  }
  const double bits = NoiseBits(a) + std::log2(p.scale);
  Ciphertext out = a;
  for (auto& part : out.parts) part = ring::Mul(part, p.poly);
  out.scale = scale;
  SetNoiseBits(out, bits);
  return out;
}

Ciphertext Evaluator::Multiply(const Ciphertext& a, const Ciphertext& b) const {
  CheckCiphertext(a);
  CheckCiphertext(b);
  if (a.parts.size() != 2 || b.parts.size() != 2) {
    throw ContractViolation("relinearize before multiplying again");
  }
  if (a.level != b.level) throw ContractViolation("ciphertext levels differ");
  CheckBaseScale(a);
  CheckBaseScale(b);
  const double scale = a.scale * b.scale;
  if (std::log2(scale) >= context_->LogModulus(a.level) - 1.0) {
    throw LevelExhausted("product scale exceeds the remaining modulus");
  }
  const double bits =
      std::max(NoiseBits(a) + std::log2(b.scale), NoiseBits(b) + std::log2(a.scale)) +
      1.0;
  Ciphertext out;
  out.parts.push_back(ring::Mul(a.parts[0], b.parts[0]));
  RnsPoly mid = ring::Mul(a.parts[0], b.parts[1]);
  ring::AddInPlace(mid, ring::Mul(a.parts[1], b.parts[0]));
  out.parts.push_back(std::move(mid));
  out.parts.push_back(ring::Mul(a.parts[1], b.parts[1]));
  out.scale = scale;
  out.level = a.level;
  SetNoiseBits(out, bits);
  return out;
}

std::pair<RnsPoly, RnsPoly> Evaluator::KeySwitch(const RnsPoly& d,
                                                 const KeySwitchKey& key) const {
  const size_t n = context_->degree();
  const size_t primes = d.num_primes();
  if (key.b.size() < primes) throw ContractViolation("key-switching key too short");
  ring::Chain target(d.chain());
  target.push_back(context_->special_prime());

  RnsPoly coeff = d;
  if (coeff.domain() == Domain::kEvaluation) coeff.ToCoefficient();
  RnsPoly acc0 = RnsPoly::Zero(n, target, Domain::kEvaluation);
  RnsPoly acc1 = RnsPoly::Zero(n, target, Domain::kEvaluation);
  for (size_t j = 0; j < primes; ++j) {
    const uint64_t qj = d.modulus(j).value();
    auto src = coeff.row(j);
    RnsPoly x = RnsPoly::Zero(n, target, Domain::kCoefficient);
    for (size_t t = 0; t < target.size(); ++t) {
      const uint64_t qt = target[t]->value();
      auto dst = x.mutable_row(t);
      for (size_t k = 0; k < n; ++k) {
        dst[k] = ring::ReduceSigned(ring::Centered(src[k], qj), qt);
      }
    }
    x.ToEvaluation();
    ring::AddInPlace(acc0, ring::Mul(x, SelectWithSpecial(key.b[j], target)));
    ring::AddInPlace(acc1, ring::Mul(x, SelectWithSpecial(key.a[j], target)));
  }
  return {ring::RescaleDropPrime(acc0), ring::RescaleDropPrime(acc1)};
}

Ciphertext Evaluator::Relinearize(const Ciphertext& a, const RelinKey& rk) const {
  CheckCiphertext(a);
  if (a.parts.size() != 3) {
    throw ContractViolation("relinearize expects a three-part ciphertext");
  }
  auto [d0, d1] = KeySwitch(a.parts[2], rk.key);
  const double bits =
      std::max(NoiseBits(a), std::log2(static_cast<double>(context_->degree()))) + 1.0;
  Ciphertext out;
  out.parts.push_back(ring::Add(a.parts[0], d0));
  out.parts.push_back(ring::Add(a.parts[1], d1));
  out.scale = a.scale;
  out.level = a.level;
  SetNoiseBits(out, bits);
  return out;
}

Ciphertext Evaluator::Rescale(const Ciphertext& a) const {
  CheckCiphertext(a);
  if (a.level == 0) throw LevelExhausted("no prime left to rescale by");
  const double q = static_cast<double>(context_->data_prime(a.level));
  if (std::fabs(a.scale / q / context_->default_scale() - 1.0) > kBaseScaleTolerance) {
    throw ContractViolation("rescaling would leave the base scale");
  }
  const double bits =
      std::max(NoiseBits(a) - std::log2(q),
               std::log2(std::sqrt(static_cast<double>(context_->degree()))));
  Ciphertext out;
  for (const auto& p : a.parts) out.parts.push_back(ring::RescaleDropPrime(p));
  out.scale = a.scale / q;
  out.level = a.level - 1;
  SetNoiseBits(out, bits);
  return out;
}

Ciphertext Evaluator::ModSwitchTo(const Ciphertext& a, int level) const {
  CheckCiphertext(a);
  if (level > a.level || level < 0) {
    throw ContractViolation("can only switch down to an existing level");
  }
  const double bits = NoiseBits(a);
  Ciphertext out;
  for (const auto& p : a.parts) out.parts.push_back(p.KeepPrimes(level + 1));
  out.scale = a.scale;
  out.level = level;
  SetNoiseBits(out, bits);
  return out;
}

Ciphertext Evaluator::Rotate(const Ciphertext& a, int step,
                             const GaloisKeys& gk) const {
  CheckCiphertext(a);
  if (a.parts.size() != 2) throw ContractViolation("relinearize before rotating");
  const uint64_t g = GaloisElementForStep(*context_, step);
  if (g == 1) return a;
  auto it = gk.keys.find(g);
  if (it == gk.keys.end()) {
    throw ContractViolation("no Galois key for rotation step " + std::to_string(step));
  }
  RnsPoly c0 = ring::ApplyAutomorphism(a.parts[0], g);
  RnsPoly c1 = ring::ApplyAutomorphism(a.parts[1], g);
  auto [d0, d1] = KeySwitch(c1, it->second);
  Ciphertext out;
  out.parts.push_back(ring::Add(c0, d0));
  out.parts.push_back(std::move(d1));
  out.scale = a.scale;
  out.level = a.level;
  SetNoiseBits(out, NoiseBits(a) + 1.0);
  return out;
}

}  // namespace mqfl::ckks
