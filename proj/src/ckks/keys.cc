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

#include "mqfl/ckks/keys.h"

#include <utility>

#include "mqfl/errors.h"
#include "mqfl/ring/modular.h"

namespace mqfl::ckks {

using ring::Domain;
using ring::RnsPoly;

uint64_t GaloisElementForStep(const Context& context, int step) {
  const int64_t slots = static_cast<int64_t>(context.slot_count());
  int64_t r = step % slots;
  if (r < 0) r += slots;
  return context.rot_group()[static_cast<size_t>(r)];
}

KeyGenerator::KeyGenerator(ContextPtr context, uint64_t seed)
    : context_(std::move(context)), prng_(seed) {
  if (!context_) throw ContractViolation("key generator needs a context");
  secret_.poly = ring::SampleTernary(context_->key_chain(), context_->degree(), prng_);
  secret_.poly.ToEvaluation();
}

PublicKey KeyGenerator::CreatePublicKey() {
  const ring::Chain& chain = context_->ChainAt(context_->max_level());
  const size_t n = context_->degree();
  RnsPoly a = ring::SampleUniform(chain, n, prng_, Domain::kEvaluation);
  RnsPoly e = ring::SampleGaussian(chain, n, context_->params().error_sigma, prng_);
  e.ToEvaluation();
  RnsPoly s = secret_.poly.KeepPrimes(chain.size());
  RnsPoly b = ring::Add(ring::Negate(ring::Mul(a, s)), e);
  return PublicKey{std::move(b), std::move(a)};
}

KeySwitchKey KeyGenerator::CreateSwitchKey(const RnsPoly& source) {
  const ring::Chain& chain = context_->key_chain();
  const size_t n = context_->degree();
  const size_t data_primes = chain.size() - 1;
  const uint64_t p = context_->special_prime()->value();
  KeySwitchKey key;
  for (size_t j = 0; j < data_primes; ++j) {
    RnsPoly a = ring::SampleUniform(chain, n, prng_, Domain::kEvaluation);
    RnsPoly e = ring::SampleGaussian(chain, n, context_->params().error_sigma, prng_);
    e.ToEvaluation();
    RnsPoly b = ring::Add(ring::Negate(ring::Mul(a, secret_.poly)), e);
    const uint64_t q = chain[j]->value();
    const uint64_t p_mod = p % q;
    auto row = b.mutable_row(j);
    auto src = source.row(j);
    for (size_t k = 0; k < n; ++k) {
      row[k] = ring::AddMod(row[k], ring::MulMod(p_mod, src[k], q), q);
    }
    key.b.push_back(std::move(b));
    key.a.push_back(std::move(a));
  }
  return key;
}

RelinKey KeyGenerator::CreateRelinKey() {
  return RelinKey{CreateSwitchKey(ring::Mul(secret_.poly, secret_.poly))};
}

GaloisKeys KeyGenerator::CreateGaloisKeys(std::span<const int> steps) {
  GaloisKeys out;
  for (int step : steps) {
    uint64_t g = GaloisElementForStep(*context_, step);
    if (g == 1 || out.Has(g)) continue;
    out.keys.emplace(g, CreateSwitchKey(ring::ApplyAutomorphism(secret_.poly, g)));
  }
  return out;
}

KeySet GenerateKeys(const ContextPtr& context, uint64_t seed,
                    std::span<const int> rotation_steps) {
  KeyGenerator gen(context, seed);
  KeySet keys;
  keys.public_key = gen.CreatePublicKey();
  keys.relin = gen.CreateRelinKey();
  keys.galois = gen.CreateGaloisKeys(rotation_steps);
  keys.secret = gen.secret_key();
  return keys;
}

}  // namespace mqfl::ckks
