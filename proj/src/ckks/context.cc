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

#include "mqfl/ckks/context.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "mqfl/errors.h"
#include "mqfl/ring/modular.h"

namespace mqfl::ckks {

namespace {

// Extra bits a scale may exceed the narrowest rescaling prime by.
constexpr int kScaleMarginBits = 10;

uint64_t Fnv1a(uint64_t h, uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

CkksParams CkksParams::Paper() {
  return CkksParams{8192, {60, 40, 40, 60}, std::ldexp(1.0, 40)};
}

CkksParams CkksParams::Toy() {
  return CkksParams{16, {40, 30, 40}, std::ldexp(1.0, 20)};
}

CkksParams CkksParams::FromProfile(const std::string& name) {
  if (name == "paper") return Paper();
  if (name == "toy") return Toy();
  throw ConfigError("unknown CKKS profile '" + name + "'", "profile");
}

std::shared_ptr<const Context> Context::Create(const CkksParams& params) {
  const size_t n = params.poly_degree;
  if (n < 4 || (n & (n - 1)) != 0) {
    throw ParameterError("polynomial degree must be a power of two >= 4, got " +
                         std::to_string(n));
  }
  if (params.coeff_modulus_bits.size() < 2) {
    throw ParameterError(
        "coefficient modulus needs at least one data prime and a special prime");
  }
  if (params.coeff_modulus_bits.size() > ring::CrtComposer::kMaxPrimes) {
    throw ParameterError("too many coefficient primes");
  }
  if (!(params.scale > 1.0) || !std::isfinite(params.scale)) {
    throw ParameterError("scale must be a finite value above 1");
  }
  if (!(params.error_sigma > 0.0)) {
    throw ParameterError("error sigma must be positive");
  }
  const double log_scale = std::log2(params.scale);
  const auto& bits = params.coeff_modulus_bits;
  if (log_scale >= bits.front()) {
    throw ParameterError("scale does not fit under the first data prime");
  }
  if (bits.size() > 2) {
    int narrowest = *std::min_element(bits.begin() + 1, bits.end() - 1);
    if (log_scale > narrowest + kScaleMarginBits) {
      throw ParameterError("scale exceeds the rescaling primes by more than " +
                           std::to_string(kScaleMarginBits) + " bits");
    }
  }
  return std::shared_ptr<const Context>(new Context(params));
}

Context::Context(const CkksParams& params) : params_(params) {
  const size_t n = params.poly_degree;
  std::vector<uint64_t> primes;
  for (int b : params.coeff_modulus_bits) {
    primes.push_back(ring::PrimeModulus::FindPrimeBelow(b, n, primes));
  }
  key_chain_ = ring::MakeChain(primes, n);
  data_chain_.assign(key_chain_.begin(), key_chain_.end() - 1);
  for (size_t l = 0; l < data_chain_.size(); ++l) {
    level_chains_.emplace_back(data_chain_.begin(), data_chain_.begin() + l + 1);
    composers_.emplace_back(level_chains_.back());
  }

  uint64_t h = 0xcbf29ce484222325ULL;
  h = Fnv1a(h, n);
  for (uint64_t q : primes) h = Fnv1a(h, q);
  uint64_t scale_bits;
  static_assert(sizeof(scale_bits) == sizeof(params.scale));
  std::memcpy(&scale_bits, &params.scale, sizeof(scale_bits));
  fingerprint_ = Fnv1a(h, scale_bits);

  const uint64_t m = 2 * static_cast<uint64_t>(n);
  rot_group_.resize(n / 2);
  uint64_t g = 1;
  for (size_t j = 0; j < n / 2; ++j) {
    rot_group_[j] = g;
    g = g * 5 % m;
  }
  root_powers_.resize(m + 1);
  for (uint64_t k = 0; k <= m; ++k) {
    double angle = 2.0 * std::numbers::pi * static_cast<double>(k) /
                   static_cast<double>(m);
    root_powers_[k] = {std::cos(angle), std::sin(angle)};
  }
}

const ring::Chain& Context::ChainAt(int level) const {
  if (level < 0 || level > max_level()) {
    throw ContractViolation("level " + std::to_string(level) +
                            " outside the modulus chain");
  }
  return level_chains_[level];
}

double Context::LogModulus(int level) const {
  double bits = 0.0;
  for (const auto& m : ChainAt(level)) bits += std::log2(static_cast<double>(m->value()));
  return bits;
}

}  // namespace mqfl::ckks
