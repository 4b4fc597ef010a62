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

#include "mqfl/fl/aggregate.h"

#include <algorithm>
#include <cmath>

#include "mqfl/ckks/encoder.h"
#include "mqfl/ckks/evaluator.h"
#include "mqfl/ckks/serialization.h"
#include "mqfl/errors.h"
#include "mqfl/fl/partition.h"
#include "mqfl/util/bytes.h"

namespace mqfl::fl {

namespace {

using Reason = ParseError::Reason;

void PutCiphertexts(util::ByteWriter& w, const ckks::Context& ctx,
                    const std::vector<ckks::Ciphertext>& cts, bool compress) {
  w.Put<uint32_t>(static_cast<uint32_t>(cts.size()));
  for (const auto& ct : cts) {
    auto b = ckks::SerializeCiphertext(ctx, ct, compress);
    w.Put<uint32_t>(static_cast<uint32_t>(b.size()));
    w.PutBytes(b);
  }
}

std::vector<ckks::Ciphertext> GetCiphertexts(util::ByteReader& r, const ckks::Context& ctx) {
  const uint32_t n = r.Get<uint32_t>();
  std::vector<ckks::Ciphertext> out;
  for (uint32_t i = 0; i < n; ++i) {
    const uint32_t len = r.Get<uint32_t>();
    out.push_back(ckks::DeserializeCiphertext(ctx, r.GetBytes(len)));
  }
  return out;
}

void ExpectEnd(const util::ByteReader& r) {
  if (r.remaining() != 0) throw ParseError(Reason::kMalformed, "trailing bytes in payload");
}

}  // namespace

std::vector<uint8_t> EncodeWeights(const std::vector<double>& w) {
  util::ByteWriter out;
  out.Put<uint64_t>(w.size());
  for (double v : w) out.PutDouble(v);
  return std::move(out.bytes());
}

std::vector<double> DecodeWeights(std::span<const uint8_t> bytes) {
  util::ByteReader r(bytes);
  const uint64_t n = r.Get<uint64_t>();
  if (n > r.remaining() / 8) throw ParseError(Reason::kTruncated, "weight vector truncated");
  std::vector<double> w(n);
  for (auto& v : w) v = r.GetDouble();
  ExpectEnd(r);
  return w;
}

std::vector<uint8_t> EncodePlainUpdate(const PlainUpdate& u) {
  util::ByteWriter w;
  w.Put<uint32_t>(u.client);
  w.Put<uint32_t>(u.round);
  w.Put<uint64_t>(u.samples);
  w.Put<uint64_t>(u.manifest_hash);
  w.PutBytes(EncodeWeights(u.weights));
  return std::move(w.bytes());
}

PlainUpdate DecodePlainUpdate(std::span<const uint8_t> bytes) {
  util::ByteReader r(bytes);
  PlainUpdate u;
  u.client = r.Get<uint32_t>();
  u.round = r.Get<uint32_t>();
  u.samples = r.Get<uint64_t>();
  u.manifest_hash = r.Get<uint64_t>();
  u.weights = DecodeWeights(r.GetBytes(r.remaining()));
  return u;
}

std::vector<uint8_t> EncodeCiphertexts(const ckks::Context& ctx,
                                       const std::vector<ckks::Ciphertext>& cts, bool compress) {
  util::ByteWriter w;
  PutCiphertexts(w, ctx, cts, compress);
  return std::move(w.bytes());
}

std::vector<ckks::Ciphertext> DecodeCiphertexts(const ckks::Context& ctx, std::span<const uint8_t> bytes) {
  util::ByteReader r(bytes);
  auto out = GetCiphertexts(r, ctx);
  ExpectEnd(r);
  return out;
}

std::vector<uint8_t> EncodeEncryptedUpdate(const ckks::Context& ctx, const EncryptedUpdate& u,
                                           bool compress) {
  util::ByteWriter w;
  w.Put<uint32_t>(u.client);
  w.Put<uint32_t>(u.round);
  w.Put<uint64_t>(u.samples);
  w.Put<uint64_t>(u.manifest_hash);
  w.Put<uint64_t>(u.weight_count);
  PutCiphertexts(w, ctx, u.chunks, compress);
  return std::move(w.bytes());
}

EncryptedUpdate DecodeEncryptedUpdate(const ckks::Context& ctx, std::span<const uint8_t> bytes) {
  util::ByteReader r(bytes);
  EncryptedUpdate u;
  u.client = r.Get<uint32_t>();
  u.round = r.Get<uint32_t>();
  u.samples = r.Get<uint64_t>();
  u.manifest_hash = r.Get<uint64_t>();
  u.weight_count = r.Get<uint64_t>();
  u.chunks = GetCiphertexts(r, ctx);
  ExpectEnd(r);
  return u;
}

std::vector<double> AggregationWeights(const std::vector<uint64_t>& samples) {
  uint64_t total = 0;
  for (uint64_t s : samples) total += s;
  if (total == 0) throw InputError("no samples to weight");
  std::vector<double> w;
  for (uint64_t s : samples) w.push_back(static_cast<double>(s) / static_cast<double>(total));
  return w;
}

std::vector<double> AggregatePlain(std::vector<PlainUpdate> updates) {
  if (updates.empty()) throw InputError("nothing to aggregate");
  std::map<uint32_t, uint64_t> samples;
  for (const auto& u : updates) {
    if (!samples.emplace(u.client, u.samples).second) {
      throw ProtocolError("duplicate update from client " + std::to_string(u.client));
    }
  }
  Aggregator agg(nullptr, samples, updates.front().manifest_hash);
  agg.BeginRound(updates.front().round);
  for (auto& u : updates) agg.Add(std::move(u));
  return agg.FinishPlain();
}

EncryptedUpdate EncryptUpdate(const ckks::ContextPtr& ctx, const ckks::PublicKey& pk,
                              const PlainUpdate& update, uint64_t seed) {
  ckks::Encoder encoder(ctx);
  ckks::Evaluator eval(ctx);
  ring::Prng prng(seed);
  EncryptedUpdate out{update.client, update.round, update.samples, update.manifest_hash,
                      update.weights.size(), {}};
  for (const auto& chunk : ChunkWeights(update.weights, ctx->slot_count())) {
    out.chunks.push_back(eval.Encrypt(pk, encoder.Encode(chunk), prng));
  }
  return out;
}

std::vector<double> DecryptWeights(const ckks::ContextPtr& ctx, const ckks::SecretKey& sk,
                                   const std::vector<ckks::Ciphertext>& chunks, size_t count,
                                   double sanity_bound) {
  ckks::Encoder encoder(ctx);
  ckks::Evaluator eval(ctx);
  std::vector<std::vector<double>> plain;
  for (const auto& ct : chunks) plain.push_back(encoder.Decode(eval.Decrypt(sk, ct)));
  auto w = Unchunk(plain, count);
  for (double v : w) {
    if (!std::isfinite(v) || std::fabs(v) > sanity_bound) {
      throw IntegrityError("decrypted weights are implausibly large; wrong key or corrupted ciphertext");
    }
  }
  return w;
}

Aggregator::Aggregator(ckks::ContextPtr ctx, std::map<uint32_t, uint64_t> samples, uint64_t manifest_hash)
    : ctx_(std::move(ctx)), samples_(std::move(samples)), manifest_hash_(manifest_hash) {
  if (samples_.empty()) throw InputError("aggregator needs at least one client");
  for (const auto& [id, n] : samples_) {
    if (n == 0) throw InputError("client " + std::to_string(id) + " has no samples");
    n_total_ += n;
  }
}

double Aggregator::weight(uint32_t client) const {
  return static_cast<double>(samples_.at(client)) / static_cast<double>(n_total_);
}

void Aggregator::BeginRound(uint32_t round) {
  round_ = round;
  received_ = folded_ = 0;
  pending_plain_.clear();
  pending_enc_.clear();
  plain_sum_.clear();
  enc_sum_.clear();
  chunk_count_ = weight_count_ = 0;
}

void Aggregator::Add(PlainUpdate u) {
  if (ctx_) throw ProtocolError("plaintext update sent to an encrypted aggregation");
  if (!samples_.count(u.client)) throw ProtocolError("unknown client " + std::to_string(u.client));
  if (u.round != round_) throw ProtocolError("update for round " + std::to_string(u.round) + " during round " + std::to_string(round_));
  if (u.manifest_hash != manifest_hash_) throw ProtocolError("weight manifest mismatch from client " + std::to_string(u.client));
  if (u.samples != samples_.at(u.client)) throw ProtocolError("sample count changed since join");
  if (received_ == 0) weight_count_ = u.weights.size();
  if (u.weights.size() != weight_count_) throw ProtocolError("weight count mismatch");
  if (pending_plain_.count(u.client) ||
      (folded_ > 0 && u.client <= std::next(samples_.begin(), folded_ - 1)->first)) {
    throw ProtocolError("duplicate update from client " + std::to_string(u.client));
  }
  pending_plain_.emplace(u.client, std::move(u));
  ++received_;
  Fold();
}

void Aggregator::Add(EncryptedUpdate u) {
  if (!ctx_) throw ProtocolError("encrypted update sent to a plaintext aggregation");
  if (!samples_.count(u.client)) throw ProtocolError("unknown client " + std::to_string(u.client));
  if (u.round != round_) throw ProtocolError("update for round " + std::to_string(u.round) + " during round " + std::to_string(round_));
  if (u.manifest_hash != manifest_hash_) throw ProtocolError("weight manifest mismatch from client " + std::to_string(u.client));
  if (u.samples != samples_.at(u.client)) throw ProtocolError("sample count changed since join");
  if (received_ == 0) {
    chunk_count_ = u.chunks.size();
    weight_count_ = u.weight_count;
  }
  if (u.chunks.size() != chunk_count_ || u.weight_count != weight_count_ ||
      u.chunks.size() * ctx_->slot_count() < u.weight_count) {
    throw ProtocolError("chunk layout mismatch from client " + std::to_string(u.client));
  }
  for (const auto& ct : u.chunks) {
    if (ct.level != ctx_->max_level() || ct.size() != 2) {
      throw ProtocolError("update ciphertexts must be fresh top-level encryptions");
    }
  }
  if (pending_enc_.count(u.client) ||
      (folded_ > 0 && u.client <= std::next(samples_.begin(), folded_ - 1)->first)) {
    throw ProtocolError("duplicate update from client " + std::to_string(u.client));
  }
  pending_enc_.emplace(u.client, std::move(u));
  ++received_;
  Fold();
}

void Aggregator::Fold() {
  while (folded_ < samples_.size()) {
    const uint32_t id = std::next(samples_.begin(), folded_)->first;
    const double w = weight(id);
    if (ctx_) {
      auto it = pending_enc_.find(id);
      if (it == pending_enc_.end()) return;
      ckks::Encoder encoder(ctx_);
      ckks::Evaluator eval(ctx_);
      const int level = ctx_->max_level();
      // Encoded at the prime the rescale drops, so the sum lands on the
      // base scale exactly.
      const auto pt = encoder.Encode(std::vector<double>(ctx_->slot_count(), w),
                                     static_cast<double>(ctx_->data_prime(level)), level);
      for (size_t c = 0; c < chunk_count_; ++c) {
        auto prod = eval.MulPlain(it->second.chunks[c], pt);
        if (folded_ == 0) {
          enc_sum_.push_back(std::move(prod));
        } else {
          eval.AddInPlace(enc_sum_[c], prod);
        }
      }
      pending_enc_.erase(it);
    } else {
      auto it = pending_plain_.find(id);
      if (it == pending_plain_.end()) return;
      if (folded_ == 0) plain_sum_.assign(weight_count_, 0.0);
      for (size_t i = 0; i < weight_count_; ++i) plain_sum_[i] += w * it->second.weights[i];
      pending_plain_.erase(it);
    }
    ++folded_;
  }
}

std::vector<double> Aggregator::FinishPlain() {
  if (ctx_) throw ProtocolError("encrypted aggregation finished as plaintext");
  if (!complete()) {
    throw ProtocolError("aggregation withheld: " + std::to_string(received_) + " of " +
                        std::to_string(samples_.size()) + " clients reported");
  }
  return plain_sum_;
}

std::vector<ckks::Ciphertext> Aggregator::FinishEncrypted() {
  if (!ctx_) throw ProtocolError("plaintext aggregation finished as encrypted");
  if (!complete()) {
    throw ProtocolError("aggregation withheld: " + std::to_string(received_) + " of " +
                        std::to_string(samples_.size()) + " clients reported");
  }
  ckks::Evaluator eval(ctx_);
  std::vector<ckks::Ciphertext> out;
  for (const auto& s : enc_sum_) out.push_back(eval.Rescale(s));
  return out;
}

std::vector<double> PqcOptimizer::operator()(std::vector<double> weights, uint32_t round) {
  ++calls_;
  if (hook_) hook_(weights, round);
  return weights;
}

}  // namespace mqfl::fl
