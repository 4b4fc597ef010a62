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

#include "mqfl/nn/weights.h"

#include "json.hpp"
#include "mqfl/errors.h"
#include "mqfl/util/bytes.h"
#include "mqfl/util/file.h"

namespace mqfl::nn {

using Reason = ParseError::Reason;

uint64_t FlatWeights::LayoutHash() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& e : manifest) {
    for (char c : e.name) mix(static_cast<uint8_t>(c));
    for (size_t d : e.shape) mix(d);
    mix(0xff);
  }
  return h;
}

FlatWeights FlattenWeights(Trainable& model) {
  FlatWeights out;
  for (Param* p : model.Params()) {
    out.manifest.push_back({p->name, p->value.shape()});
    out.values.insert(out.values.end(), p->value.values().begin(), p->value.values().end());
  }
  return out;
}

void LoadWeights(Trainable& model, const FlatWeights& w) {
  auto params = model.Params();
  if (params.size() != w.manifest.size()) {
    throw ContractViolation("weight manifest has " + std::to_string(w.manifest.size()) +
                            " entries, model has " + std::to_string(params.size()));
  }
  size_t total = 0;
  for (size_t i = 0; i < params.size(); ++i) {
    if (params[i]->name != w.manifest[i].name ||
        params[i]->value.shape() != w.manifest[i].shape) {
      throw ContractViolation("weight manifest entry " + std::to_string(i) + " (" +
                              w.manifest[i].name + ") does not match " + params[i]->name);
    }
    total += params[i]->value.size();
  }
  if (total != w.values.size()) throw ContractViolation("weight count mismatch");
  size_t off = 0;
  for (Param* p : params) {
    for (auto& v : p->value.values()) v = w.values[off++];
  }
}

void SaveCheckpoint(const std::string& path, const FlatWeights& w,
                    const CheckpointInfo& info) {
  nlohmann::json header;
  header["seed"] = info.seed;
  header["round"] = info.round;
  header["count"] = w.values.size();
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : w.manifest) entries.push_back({{"name", e.name}, {"shape", e.shape}});
  header["manifest"] = entries;
  const std::string text = header.dump();

  util::ByteWriter out;
  out.PutString("MQW1");
  out.Put<uint32_t>(static_cast<uint32_t>(text.size()));
  out.PutString(text);
  for (double v : w.values) out.PutDouble(v);

  util::WriteFileBytes(path, out.bytes());
}

FlatWeights LoadCheckpoint(const std::string& path, CheckpointInfo* info) {
  const std::vector<uint8_t> bytes = util::ReadFileBytes(path);
  util::ByteReader r(bytes);
  auto magic = r.GetBytes(4);
  if (std::string(magic.begin(), magic.end()) != "MQW1") {
    throw ParseError(Reason::kBadMagic, "not a weights checkpoint");
  }
  const uint32_t len = r.Get<uint32_t>();
  auto text = r.GetBytes(len);
  nlohmann::json header;
  FlatWeights w;
  size_t count = 0;
  try {
    header = nlohmann::json::parse(text.begin(), text.end());
    count = header.at("count").get<size_t>();
    for (const auto& e : header.at("manifest")) {
      w.manifest.push_back({e.at("name").get<std::string>(), e.at("shape").get<Shape>()});
    }
    if (info) {
      info->seed = header.at("seed").get<uint64_t>();
      info->round = header.at("round").get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(Reason::kMalformed, std::string("bad checkpoint header: ") + e.what());
  }
  size_t expect = 0;
  for (const auto& e : w.manifest) expect += ShapeSize(e.shape);
  if (expect != count || r.remaining() != count * sizeof(double)) {
    throw ParseError(Reason::kMalformed, "checkpoint value count mismatch");
  }
  w.values.resize(count);
  for (auto& v : w.values) v = r.GetDouble();
  return w;
}

}  // namespace mqfl::nn
