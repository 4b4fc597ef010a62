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

#include <set>

#include "mqfl/ckks/context.h"
#include "mqfl/errors.h"
#include "mqfl/fl/experiment.h"
#include "mqfl/quantum/statevector.h"

namespace mqfl::fl {

using nlohmann::json;

namespace {

struct ModeInfo {
  Mode mode;
  const char* name;
  bool quantum, federated, fhe;
};

constexpr ModeInfo kModes[] = {
    {Mode::kClassicalCentralized, "classical-centralized", false, false, false},
    {Mode::kQuantumCentralized, "quantum-centralized", true, false, false},
    {Mode::kClassicalFl, "classical-fl", false, true, false},
    {Mode::kQfl, "qfl", true, true, false},
    {Mode::kFlFhe, "fl-fhe", false, true, true},
    {Mode::kQflFhe, "qfl-fhe", true, true, true},
};

const ModeInfo& Info(Mode m) {
  for (const auto& i : kModes)
    if (i.mode == m) return i;
  throw ContractViolation("unknown mode");
}

// Rejects keys outside `allowed` so typos surface as schema errors.
void CheckKeys(const json& obj, const std::string& path, std::set<std::string> allowed) {
  if (!obj.is_object()) throw ConfigError("expected an object", path.empty() ? "<root>" : path);
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown field", path.empty() ? key : path + "." + key);
  }
}

template <typename T>
void Read(const json& obj, const std::string& path, const char* key, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::string field = path.empty() ? key : path + "." + key;
  if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
    // json would silently truncate 2.5 or wrap -1 into a huge unsigned.
    if (!it->is_number_integer()) throw ConfigError("expected an integer", field);
    if (std::is_unsigned_v<T> && !it->is_number_unsigned()) throw ConfigError("must be non-negative", field);
  }
  try {
    out = it->template get<T>();
  } catch (const json::exception&) {
    throw ConfigError("wrong type", field);
  }
}

}  // namespace

std::string ModeName(Mode mode) { return Info(mode).name; }

Mode ParseMode(const std::string& name) {
  for (const auto& i : kModes)
    if (name == i.name) return i.mode;
  throw ConfigError("unknown mode '" + name + "'", "mode");
}

bool IsQuantum(Mode mode) { return Info(mode).quantum; }
bool IsFederated(Mode mode) { return Info(mode).federated; }
bool UsesFhe(Mode mode) { return Info(mode).fhe; }

void ExperimentConfig::Validate() const {
  if (external_csv.empty()) {
    try {
      data::SyntheticSpec s = dataset;
      s.seed = seed;
      s.Validate();
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), "dataset." + e.field());
    }
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("must lie in (0, 1)", "test_fraction");
  if (model.qubits < 1 || model.qubits > quantum::kMaxQubits) throw ConfigError("out of range", "model.qubits");
  if (model.pqc_layers < 1) throw ConfigError("must be positive", "model.pqc_layers");
  if (model.attention_heads < 1 || model.qubits % model.attention_heads != 0) {
    throw ConfigError("must divide model.qubits", "model.attention_heads");
  }
  if (model.sequence_hidden < 1) throw ConfigError("must be positive", "model.sequence_hidden");
  if (model.conv_channels < 1) throw ConfigError("must be positive", "model.conv_channels");
  try {
    train.Validate();
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), "train." + e.field());
  }
  if (fl.clients < 1) throw ConfigError("must be positive", "fl.clients");
  if (fl.epochs_per_client < 0) throw ConfigError("must be non-negative", "fl.epochs_per_client");
  if (!(fl.val_fraction >= 0.0 && fl.val_fraction < 1.0)) throw ConfigError("must lie in [0, 1)", "fl.val_fraction");
  if (!(fl.partition.alpha > 0.0)) throw ConfigError("must be positive", "fl.alpha");
  if (central.epochs < 0) throw ConfigError("must be non-negative", "centralized.epochs");
  if (!(central.val_fraction >= 0.0 && central.val_fraction < 1.0)) {
    throw ConfigError("must lie in [0, 1)", "centralized.val_fraction");
  }
  if (ckks_profile != "paper" && ckks_profile != "toy") throw ConfigError("must be paper or toy", "ckks_profile");
  if (transport != "inproc" && transport != "tcp") throw ConfigError("must be inproc or tcp", "transport");
  if (spawn != "threads" && spawn != "processes") throw ConfigError("must be threads or processes", "spawn");
  if (spawn == "processes" && transport != "tcp") throw ConfigError("child processes need tcp transport", "spawn");
  if (timeout_ms <= 0) throw ConfigError("must be positive", "timeout_ms");
}

json ExperimentConfig::ToJson() const {
  const auto& d = dataset;
  return {
      {"mode", ModeName(mode)},
      {"seed", seed},
      {"dataset",
       {{"samples", d.samples},
        {"sequence", {{"classes", d.sequence.classes}, {"imbalance_factor", d.sequence.imbalance_factor}}},
        {"image", {{"classes", d.image.classes}, {"imbalance_factor", d.image.imbalance_factor}}},
        {"sequence_length", d.sequence_length},
        {"motif_length", d.motif_length},
        {"k", d.k},
        {"image_side", d.image_side},
        {"motif_noise", d.motif_noise},
        {"pixel_noise", d.pixel_noise},
        {"external_csv", external_csv}}},
      {"test_fraction", test_fraction},
      {"model",
       {{"qubits", model.qubits},
        {"pqc_layers", model.pqc_layers},
        {"attention_heads", model.attention_heads},
        {"sequence_hidden", model.sequence_hidden},
        {"conv_channels", model.conv_channels}}},
      {"train",
       {{"lr", train.lr},
        {"plateau_lr", train.plateau_lr},
        {"plateau_delta", train.plateau_delta},
        {"plateau_patience", train.plateau_patience},
        {"batch_size", train.batch_size},
        {"optimizer", train.optimizer}}},
      {"fl",
       {{"clients", fl.clients},
        {"rounds", fl.rounds},
        {"epochs_per_client", fl.epochs_per_client},
        {"partition", fl.partition.scheme == PartitionScheme::kIid ? "iid" : "label-skew"},
        {"alpha", fl.partition.alpha},
        {"decrypt_all_clients", fl.decrypt_all_clients},
        {"val_fraction", fl.val_fraction}}},
      {"centralized", {{"epochs", central.epochs}, {"val_fraction", central.val_fraction}}},
      {"ckks_profile", ckks_profile},
      {"transport", transport},
      {"spawn", spawn},
      {"timeout_ms", timeout_ms},
      {"compress_ciphertexts", compress_ciphertexts},
  };
}

ExperimentConfig ExperimentConfig::FromJson(const json& j) {
  ExperimentConfig c;
  CheckKeys(j, "", {"mode", "seed", "dataset", "test_fraction", "model", "train", "fl", "centralized",
                    "ckks_profile", "transport", "spawn", "timeout_ms", "compress_ciphertexts"});
  if (!j.contains("mode")) throw ConfigError("required", "mode");
  if (!j.contains("seed")) throw ConfigError("required", "seed");
  std::string mode;
  Read(j, "", "mode", mode);
  c.mode = ParseMode(mode);
  Read(j, "", "seed", c.seed);
  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    CheckKeys(d, "dataset", {"samples", "sequence", "image", "sequence_length", "motif_length", "k",
                             "image_side", "motif_noise", "pixel_noise", "external_csv"});
    Read(d, "dataset", "samples", c.dataset.samples);
    for (auto [key, m] : {std::pair{"sequence", &c.dataset.sequence}, std::pair{"image", &c.dataset.image}}) {
      if (!d.contains(key)) continue;
      const std::string path = std::string("dataset.") + key;
      CheckKeys(d[key], path, {"classes", "imbalance_factor"});
      Read(d[key], path, "classes", m->classes);
      Read(d[key], path, "imbalance_factor", m->imbalance_factor);
    }
    Read(d, "dataset", "sequence_length", c.dataset.sequence_length);
    Read(d, "dataset", "motif_length", c.dataset.motif_length);
    Read(d, "dataset", "k", c.dataset.k);
    Read(d, "dataset", "image_side", c.dataset.image_side);
    Read(d, "dataset", "motif_noise", c.dataset.motif_noise);
    Read(d, "dataset", "pixel_noise", c.dataset.pixel_noise);
    Read(d, "dataset", "external_csv", c.external_csv);
  }
  Read(j, "", "test_fraction", c.test_fraction);
  if (j.contains("model")) {
    const auto& m = j["model"];
    CheckKeys(m, "model", {"qubits", "pqc_layers", "attention_heads", "sequence_hidden", "conv_channels"});
    Read(m, "model", "qubits", c.model.qubits);
    Read(m, "model", "pqc_layers", c.model.pqc_layers);
    Read(m, "model", "attention_heads", c.model.attention_heads);
    Read(m, "model", "sequence_hidden", c.model.sequence_hidden);
    Read(m, "model", "conv_channels", c.model.conv_channels);
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    CheckKeys(t, "train", {"lr", "plateau_lr", "plateau_delta", "plateau_patience", "batch_size", "optimizer"});
    Read(t, "train", "lr", c.train.lr);
    Read(t, "train", "plateau_lr", c.train.plateau_lr);
    Read(t, "train", "plateau_delta", c.train.plateau_delta);
    Read(t, "train", "plateau_patience", c.train.plateau_patience);
    Read(t, "train", "batch_size", c.train.batch_size);
    Read(t, "train", "optimizer", c.train.optimizer);
  }
  if (j.contains("fl")) {
    const auto& f = j["fl"];
    CheckKeys(f, "fl", {"clients", "rounds", "epochs_per_client", "partition", "alpha", "decrypt_all_clients",
                        "val_fraction"});
    Read(f, "fl", "clients", c.fl.clients);
    Read(f, "fl", "rounds", c.fl.rounds);
    Read(f, "fl", "epochs_per_client", c.fl.epochs_per_client);
    std::string scheme = "iid";
    Read(f, "fl", "partition", scheme);
    c.fl.partition.scheme = ParsePartitionScheme(scheme);
    Read(f, "fl", "alpha", c.fl.partition.alpha);
    Read(f, "fl", "decrypt_all_clients", c.fl.decrypt_all_clients);
    Read(f, "fl", "val_fraction", c.fl.val_fraction);
  }
  if (j.contains("centralized")) {
    const auto& ce = j["centralized"];
    CheckKeys(ce, "centralized", {"epochs", "val_fraction"});
    Read(ce, "centralized", "epochs", c.central.epochs);
    Read(ce, "centralized", "val_fraction", c.central.val_fraction);
  }
  Read(j, "", "ckks_profile", c.ckks_profile);
  Read(j, "", "transport", c.transport);
  Read(j, "", "spawn", c.spawn);
  Read(j, "", "timeout_ms", c.timeout_ms);
  Read(j, "", "compress_ciphertexts", c.compress_ciphertexts);
  c.Validate();
  return c;
}

}  // namespace mqfl::fl
