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

#ifndef MQFL_FL_EXPERIMENT_H_
#define MQFL_FL_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "mqfl/data/synthetic.h"
#include "mqfl/fl/partition.h"
#include "mqfl/nn/model.h"
#include "mqfl/nn/train.h"
#include "mqfl/transport/channel.h"

namespace mqfl::fl {

enum class Mode {
  kClassicalCentralized,
  kQuantumCentralized,
  kClassicalFl,
  kQfl,
  kFlFhe,
  kQflFhe,
};
std::string ModeName(Mode mode);
Mode ParseMode(const std::string& name);  // ConfigError on unknown names
bool IsQuantum(Mode mode);
bool IsFederated(Mode mode);
bool UsesFhe(Mode mode);

struct ModelOptions {
  int qubits = 6;
  int pqc_layers = 2;
  size_t attention_heads = 2;
  size_t sequence_hidden = 16;
  size_t conv_channels = 4;
};

struct FlOptions {
  size_t clients = 10;
  size_t rounds = 20;
  int epochs_per_client = 10;
  PartitionConfig partition;
  // Every client decrypts the aggregate instead of one designated client.
  bool decrypt_all_clients = false;
  double val_fraction = 0.1;
};

struct CentralOptions {
  int epochs = 25;
  double val_fraction = 0.2;
};

struct ExperimentConfig {
  Mode mode = Mode::kQflFhe;
  uint64_t seed = 0;
  data::SyntheticSpec dataset;
  // When set, single-modality features are read from this CSV instead.
  std::string external_csv;
  double test_fraction = 0.2;
  ModelOptions model;
  nn::TrainConfig train;
  FlOptions fl;
  CentralOptions central;
  std::string ckks_profile = "paper";
  std::string transport = "inproc";  // inproc | tcp
  std::string spawn = "threads";     // threads | processes
  int timeout_ms = 120000;  // per message
  bool compress_ciphertexts = false;
  std::string out_dir;

  // ConfigError naming the offending field.
  void Validate() const;
  nlohmann::json ToJson() const;
  // Missing fields keep their defaults; `seed` and `mode` are required.
  static ExperimentConfig FromJson(const nlohmann::json& j);
};

// Features shared by every party, all derived from the config.
struct PreparedData {
  std::vector<nn::Example> pool;  // train + validation material
  std::vector<nn::Example> test;  // held-out, same for every mode
  std::vector<std::string> head_names;
  std::vector<size_t> head_classes;
  std::vector<nn::Shape> input_shapes;
};
PreparedData PrepareData(const ExperimentConfig& config);

std::unique_ptr<nn::Trainable> BuildModel(const ExperimentConfig& config, const PreparedData& data);

struct ClientMetrics {
  uint32_t client = 0;
  uint64_t samples = 0;
  double loss = 0.0;
  std::vector<double> accuracy;  // per head, on the client's training data
  double seconds = 0.0;
  uint64_t bytes = 0;
};

struct RoundReport {
  uint32_t round = 0;
  std::vector<ClientMetrics> clients;
  double test_loss = 0.0;
  std::vector<double> test_accuracy;  // per head
  double seconds = 0.0;
  uint64_t bytes = 0;  // framed bytes through the server this round
};

struct ExperimentResult {
  std::vector<RoundReport> reports;
  std::vector<std::vector<double>> global_weights;  // after each report
  std::vector<std::string> trace;                   // protocol stages in order
  nn::EvalResult final_eval;
  std::vector<std::string> head_names;
  size_t pqc_calls = 0;
  int failed_round = -1;
  std::string error;
  bool ok() const { return failed_round < 0; }
};

struct RunHooks {
  // Starts a client that dials 127.0.0.1:port and runs RunClient; returns
  // a joiner. Used for child processes. Null means threads.
  std::function<std::function<void()>(uint32_t id, uint16_t port)> launch_client;
  // Called by the stage between decryption and redistribution.
  std::function<void(std::vector<double>&, uint32_t)> optimize_pqc;
  // Called after each report with the global weights it evaluated.
  std::function<void(const RoundReport&, const std::vector<double>&)> on_report;
  // Resume: start at `first_round` from these global weights.
  uint32_t first_round = 1;
  std::vector<double> initial_weights;
};

// Runs one experiment. Stage failures are caught and recorded in the
// result (failed_round, error); reports up to the failure are kept.
ExperimentResult RunExperiment(const ExperimentConfig& config, const RunHooks& hooks = {});

// Client loop over one endpoint until shutdown.
void RunClient(const ExperimentConfig& config, uint32_t id, transport::Endpoint& endpoint);

// CSV: round,client,split,loss,accuracy,seconds,bytes,accuracy_<head>...
std::string RoundsCsv(const ExperimentResult& result);

}  // namespace mqfl::fl

#endif  // MQFL_FL_EXPERIMENT_H_
