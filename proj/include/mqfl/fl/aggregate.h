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

#ifndef MQFL_FL_AGGREGATE_H_
#define MQFL_FL_AGGREGATE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mqfl/ckks/ciphertext.h"
#include "mqfl/ckks/context.h"
#include "mqfl/ckks/keys.h"

namespace mqfl::fl {

struct PlainUpdate {
  uint32_t client = 0;
  uint32_t round = 0;
  uint64_t samples = 0;
  uint64_t manifest_hash = 0;
  std::vector<double> weights;
};

struct EncryptedUpdate {
  uint32_t client = 0;
  uint32_t round = 0;
  uint64_t samples = 0;
  uint64_t manifest_hash = 0;
  uint64_t weight_count = 0;
  std::vector<ckks::Ciphertext> chunks;
};

// Payload encodings carried inside transport envelopes.
std::vector<uint8_t> EncodePlainUpdate(const PlainUpdate& u);
PlainUpdate DecodePlainUpdate(std::span<const uint8_t> bytes);
std::vector<uint8_t> EncodeEncryptedUpdate(const ckks::Context& ctx, const EncryptedUpdate& u,
                                           bool compress = false);
EncryptedUpdate DecodeEncryptedUpdate(const ckks::Context& ctx, std::span<const uint8_t> bytes);
std::vector<uint8_t> EncodeCiphertexts(const ckks::Context& ctx,
                                       const std::vector<ckks::Ciphertext>& cts, bool compress = false);
std::vector<ckks::Ciphertext> DecodeCiphertexts(const ckks::Context& ctx, std::span<const uint8_t> bytes);
std::vector<uint8_t> EncodeWeights(const std::vector<double>& w);
std::vector<double> DecodeWeights(std::span<const uint8_t> bytes);

// n_k / n_total for the clients in ascending id order.
std::vector<double> AggregationWeights(const std::vector<uint64_t>& samples);

// Exact weighted mean, summed in ascending client id. Throws InputError on
// an empty list and ProtocolError on mismatched rounds, manifests or sizes.
std::vector<double> AggregatePlain(std::vector<PlainUpdate> updates);

// Encrypts weights in slot-sized chunks at the top level.
EncryptedUpdate EncryptUpdate(const ckks::ContextPtr& ctx, const ckks::PublicKey& pk,
                              const PlainUpdate& update, uint64_t seed);
// Decrypts, decodes and unchunks `count` values. Values whose magnitude
// exceeds `sanity_bound` mean the key or ciphertext is wrong: IntegrityError.
std::vector<double> DecryptWeights(const ckks::ContextPtr& ctx, const ckks::SecretKey& sk,
                                   const std::vector<ckks::Ciphertext>& chunks, size_t count,
                                   double sanity_bound = 1e4);

// Server-side aggregation state for one round. Holds no secret key. The
// expected clients and their sample counts are fixed up front (join), so
// n_total is known before any update arrives; updates are folded into the
// running sum in ascending client id as soon as every lower id has been
// folded, independent of arrival order.
class Aggregator {
 public:
  // `ctx` is null for plaintext aggregation.
  Aggregator(ckks::ContextPtr ctx, std::map<uint32_t, uint64_t> samples, uint64_t manifest_hash);

  void BeginRound(uint32_t round);
  // ProtocolError for unknown or duplicate senders, wrong round, manifest
  // or chunk layout, or the wrong update flavor.
  void Add(PlainUpdate u);
  void Add(EncryptedUpdate u);
  bool complete() const { return folded_ == samples_.size(); }
  size_t received() const { return received_; }
  uint32_t round() const { return round_; }
  double weight(uint32_t client) const;

  // Aggregation is withheld (ProtocolError) until every client reported.
  std::vector<double> FinishPlain();
  std::vector<ckks::Ciphertext> FinishEncrypted();

 private:
  void Fold();

  ckks::ContextPtr ctx_;
  std::map<uint32_t, uint64_t> samples_;
  uint64_t manifest_hash_;
  uint64_t n_total_ = 0;
  uint32_t round_ = 0;
  size_t received_ = 0;
  size_t folded_ = 0;
  std::map<uint32_t, PlainUpdate> pending_plain_;
  std::map<uint32_t, EncryptedUpdate> pending_enc_;
  std::vector<double> plain_sum_;
  std::vector<ckks::Ciphertext> enc_sum_;
  size_t chunk_count_ = 0;
  size_t weight_count_ = 0;
};

// Stand-in for adjusting circuit parameters and architecture between
// decryption and redistribution: identity on the weights, plus an optional
// observer called once per round.
class PqcOptimizer {
 public:
  using Hook = std::function<void(std::vector<double>& weights, uint32_t round)>;
  explicit PqcOptimizer(Hook hook = {}) : hook_(std::move(hook)) {}
  std::vector<double> operator()(std::vector<double> weights, uint32_t round);
  size_t calls() const { return calls_; }

 private:
  Hook hook_;
  size_t calls_ = 0;
};

}  // namespace mqfl::fl

#endif  // MQFL_FL_AGGREGATE_H_
