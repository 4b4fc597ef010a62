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

#include "mqfl/fl/experiment.h"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "mqfl/ckks/context.h"
#include "mqfl/ckks/keys.h"
#include "mqfl/data/split.h"
#include "mqfl/data/text.h"
#include "mqfl/errors.h"
#include "mqfl/fl/aggregate.h"
#include "mqfl/mqmoe/model.h"
#include "mqfl/nn/weights.h"
#include "mqfl/util/bytes.h"
#include "mqfl/util/seed.h"

namespace mqfl::fl {

using nlohmann::json;
using transport::Endpoint;
using transport::Envelope;
using transport::Kind;

namespace {

enum Stream : uint64_t {
  kTestSplit = 0x10,
  kValSplit,
  kModelInit,
  kPartition,
  kClientSplit,
  kLocalTrain,
  kEncrypt,
  kKeys,
  kCentralTrain,
};

constexpr uint32_t kServerId = UINT32_MAX;

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<nn::Example> Select(const std::vector<nn::Example>& all, const std::vector<size_t>& idx) {
  std::vector<nn::Example> out;
  out.reserve(idx.size());
  for (size_t i : idx) out.push_back(all[i]);
  return out;
}

std::vector<int> FirstLabels(const std::vector<nn::Example>& data) {
  std::vector<int> labels;
  labels.reserve(data.size());
  for (const auto& ex : data) labels.push_back(ex.labels.at(0));
  return labels;
}

// Train/validation split of `data`; validation is empty when too small.
void SplitTrainVal(const std::vector<nn::Example>& data, double val_fraction, uint64_t seed,
                   std::vector<nn::Example>& train, std::vector<nn::Example>& val) {
  if (val_fraction <= 0.0 || data.size() < 10) {
    train = data;
    val.clear();
    return;
  }
  auto parts = data::StratifiedSplit(FirstLabels(data), {1.0 - val_fraction, val_fraction}, seed);
  train = Select(data, parts[0]);
  val = Select(data, parts[1]);
}

std::vector<double> WeightsOf(nn::Trainable& model) { return nn::FlattenWeights(model).values; }

void SetWeights(nn::Trainable& model, const std::vector<double>& values) {
  nn::FlatWeights w = nn::FlattenWeights(model);
  if (values.size() != w.values.size()) {
    throw ProtocolError("global model has " + std::to_string(values.size()) + " weights, expected " +
                        std::to_string(w.values.size()));
  }
  w.values = values;
  nn::LoadWeights(model, w);
}

std::vector<uint8_t> JoinPayload(uint64_t samples, uint64_t manifest_hash) {
  util::ByteWriter w;
  w.Put(samples);
  w.Put(manifest_hash);
  return std::move(w.bytes());
}

std::vector<uint8_t> DecryptRequest(const ckks::Context& ctx, const std::vector<ckks::Ciphertext>& cts,
                                    uint64_t count, bool compress) {
  util::ByteWriter w;
  w.Put(count);
  w.PutBytes(EncodeCiphertexts(ctx, cts, compress));
  return std::move(w.bytes());
}

Envelope Expect(Endpoint& ep, Kind kind, uint32_t round) {
  Envelope env = ep.Recv();
  if (env.kind != kind) {
    throw ProtocolError("expected " + transport::KindName(kind) + ", got " + transport::KindName(env.kind));
  }
  if (env.round != round) {
    throw ProtocolError("message for round " + std::to_string(env.round) + " during round " +
                        std::to_string(round));
  }
  return env;
}

ckks::ContextPtr MakeContext(const ExperimentConfig& config) {
  return ckks::Context::Create(ckks::CkksParams::FromProfile(config.ckks_profile));
}

nn::TrainConfig LocalTrainConfig(const ExperimentConfig& config, int epochs, uint64_t seed) {
  nn::TrainConfig t = config.train;
  t.epochs = epochs;
  t.seed = seed;
  return t;
}

// Report payload: wall-clock seconds as f64, then JSON. Keeping the clock
// out of the JSON text keeps framed byte counts reproducible.
std::vector<uint8_t> EncodeReport(double seconds, const json& j) {
  util::ByteWriter w;
  w.Put<uint64_t>(std::bit_cast<uint64_t>(seconds));
  const std::string text = j.dump();
  w.PutBytes({reinterpret_cast<const uint8_t*>(text.data()), text.size()});
  return std::move(w.bytes());
}

ClientMetrics DecodeReport(std::span<const uint8_t> payload, uint32_t id) {
  util::ByteReader r(payload);
  const double seconds = std::bit_cast<double>(r.Get<uint64_t>());
  const auto body = r.GetBytes(r.remaining());
  const json j = json::parse(body.begin(), body.end());
  ClientMetrics m;
  m.client = id;
  m.seconds = seconds;
  m.samples = j.at("samples").get<uint64_t>();
  m.loss = j.at("loss").get<double>();
  m.accuracy = j.at("accuracy").get<std::vector<double>>();
  return m;
}

void CheckFinite(const RoundReport& r) {
  bool ok = std::isfinite(r.test_loss);
  for (double a : r.test_accuracy) ok = ok && std::isfinite(a);
  for (const auto& c : r.clients) ok = ok && std::isfinite(c.loss);
  if (!ok) throw IntegrityError("round " + std::to_string(r.round) + " produced non-finite metrics");
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// --- centralized -----------------------------------------------------------

ExperimentResult RunCentralized(const ExperimentConfig& config, const RunHooks& hooks) {
  ExperimentResult result;
  PreparedData data = PrepareData(config);
  result.head_names = data.head_names;
  auto model = BuildModel(config, data);
  if (!hooks.initial_weights.empty()) SetWeights(*model, hooks.initial_weights);

  std::vector<nn::Example> train, val;
  SplitTrainVal(data.pool, config.central.val_fraction, util::DeriveSeed(config.seed, {kValSplit}), train,
                val);

  auto t0 = Clock::now();
  auto emit = [&](uint32_t round, const ClientMetrics& cm) {
    RoundReport r;
    r.round = round;
    r.clients.push_back(cm);
    auto eval = nn::Evaluate(*model, data.test);
    r.test_loss = eval.loss;
    r.test_accuracy = eval.accuracy;
    r.seconds = Since(t0);
    t0 = Clock::now();
    CheckFinite(r);
    result.reports.push_back(r);
    result.global_weights.push_back(WeightsOf(*model));
    result.trace.push_back(std::to_string(round) + ":evaluate");
    result.final_eval = std::move(eval);
    if (hooks.on_report) hooks.on_report(result.reports.back(), result.global_weights.back());
  };

  uint32_t round = 0;
  try {
    if (config.central.epochs == 0) {
      auto eval = nn::Evaluate(*model, train);
      emit(0, ClientMetrics{0, train.size(), eval.loss, eval.accuracy, 0.0, 0});
      return result;
    }
    // Epochs before `first_round` were covered by the resumed weights.
    const int done = static_cast<int>(hooks.first_round) - 1;
    const int epochs = config.central.epochs - done;
    if (epochs <= 0) return result;
    auto t = LocalTrainConfig(config, epochs, util::DeriveSeed(config.seed, {kCentralTrain, hooks.first_round}));
    nn::TrainLocal(*model, train, t, val, [&](const nn::EpochStats& s) {
      round = static_cast<uint32_t>(s.epoch + done);
      emit(round, ClientMetrics{0, train.size(), s.loss, s.head_accuracy, Since(t0), 0});
    });
  } catch (const std::exception& e) {
    result.failed_round = static_cast<int>(round + 1);
    result.error = e.what();
  }
  return result;
}

// --- federated -------------------------------------------------------------

struct ClientSlot {
  std::unique_ptr<Endpoint> endpoint;
  uint64_t samples = 0;
  uint64_t last_bytes = 0;
};

uint64_t Traffic(const Endpoint& ep) { return ep.bytes_sent() + ep.bytes_received(); }

class Server {
 public:
  Server(const ExperimentConfig& config, const RunHooks& hooks) : config_(config), hooks_(hooks) {}

  ExperimentResult Run() {
    data_ = PrepareData(config_);
    result_.head_names = data_.head_names;
    model_ = BuildModel(config_, data_);
    manifest_hash_ = nn::FlattenWeights(*model_).LayoutHash();
    global_ = hooks_.initial_weights.empty() ? WeightsOf(*model_) : hooks_.initial_weights;
    if (UsesFhe(config_.mode)) ctx_ = MakeContext(config_);

    std::vector<std::function<void()>> joiners;
    std::mutex err_mu;
    std::string client_error;
    auto guarded = [&](uint32_t id, std::function<std::unique_ptr<Endpoint>()> open) {
      return [&, id, open] {
        std::unique_ptr<Endpoint> ep;
        try {
          ep = open();
          RunClient(config_, id, *ep);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (client_error.empty()) client_error = "client " + std::to_string(id) + ": " + e.what();
        }
        if (ep) ep->Close();
      };
    };

    uint32_t round = 0;
    std::unique_ptr<transport::TcpListener> listener;
    try {
      const transport::Millis timeout(config_.timeout_ms);
      const size_t k = config_.fl.clients;
      std::vector<std::unique_ptr<Endpoint>> pending;
      if (config_.transport == "inproc") {
        for (uint32_t id = 0; id < k; ++id) {
          auto [server_end, client_end] = transport::ChannelPair();
          pending.push_back(std::move(server_end));
          std::shared_ptr<Endpoint> shared(std::move(client_end));
          auto body = guarded(id, [shared]() -> std::unique_ptr<Endpoint> {
            struct Borrowed : Endpoint {
              explicit Borrowed(std::shared_ptr<Endpoint> e) : inner(std::move(e)) {}
              void Send(const Envelope& env) override { inner->Send(env); }
              Envelope Recv(transport::Millis t) override { return inner->Recv(t); }
              void Close() override { inner->Close(); }
              std::shared_ptr<Endpoint> inner;
            };
            return std::make_unique<Borrowed>(shared);
          });
          auto th = std::make_shared<std::thread>(body);
          joiners.push_back([th] { th->join(); });
        }
      } else {
        listener = std::make_unique<transport::TcpListener>();
        const uint16_t port = listener->port();
        for (uint32_t id = 0; id < k; ++id) {
          if (hooks_.launch_client) {
            joiners.push_back(hooks_.launch_client(id, port));
          } else {
            auto body = guarded(id, [port, timeout] { return transport::TcpDial("127.0.0.1", port, timeout); });
            auto th = std::make_shared<std::thread>(body);
            joiners.push_back([th] { th->join(); });
          }
        }
        for (size_t i = 0; i < k; ++i) pending.push_back(listener->Accept(timeout));
      }
      for (auto& ep : pending) {
        ep->set_timeout(timeout);
        Join(std::move(ep));
      }
      RunRounds(round);
      for (auto& [id, slot] : slots_) slot.endpoint->Send(Envelope{Kind::kShutdown, round, kServerId, {}});
    } catch (const std::exception& e) {
      result_.failed_round = static_cast<int>(round);
      result_.error = e.what();
    }
    for (auto& [id, slot] : slots_) slot.endpoint->Close();
    if (listener) listener->Close();
    for (auto& j : joiners) j();
    if (!result_.ok() && !client_error.empty()) result_.error += " (" + client_error + ")";
    result_.pqc_calls = pqc_.calls();
    return result_;
  }

 private:
  void Join(std::unique_ptr<Endpoint> ep) {
    Envelope env = ep->Recv();
    if (env.kind != Kind::kJoin) throw ProtocolError("expected join, got " + transport::KindName(env.kind));
    if (env.sender >= config_.fl.clients || slots_.count(env.sender)) {
      throw ProtocolError("unexpected client id " + std::to_string(env.sender));
    }
    util::ByteReader r(env.payload);
    ClientSlot slot;
    slot.samples = r.Get<uint64_t>();
    if (r.Get<uint64_t>() != manifest_hash_) {
      throw ProtocolError("client " + std::to_string(env.sender) + " built a different model layout");
    }
    slot.endpoint = std::move(ep);
    slots_.emplace(env.sender, std::move(slot));
  }

  void RunRounds(uint32_t& round) {
    std::map<uint32_t, uint64_t> samples;
    for (const auto& [id, slot] : slots_) samples[id] = slot.samples;
    Aggregator agg(ctx_, samples, manifest_hash_);
    for (auto& [id, slot] : slots_) slot.last_bytes = Traffic(*slot.endpoint);

    if (config_.fl.rounds == 0 || hooks_.first_round > config_.fl.rounds) {
      if (hooks_.first_round <= 1) {
        auto t0 = Clock::now();
        Finish(0, {}, t0);
      }
      return;
    }
    for (round = hooks_.first_round; round <= config_.fl.rounds; ++round) {
      auto t0 = Clock::now();
      Trace(round, "distribute");
      const auto payload = EncodeWeights(global_);
      for (auto& [id, slot] : slots_) slot.endpoint->Send(Envelope{Kind::kGlobalModel, round, kServerId, payload});

      agg.BeginRound(round);
      std::vector<ClientMetrics> metrics;
      for (auto& [id, slot] : slots_) {
        Envelope up = slot.endpoint->Recv();
        if (up.sender != id) throw ProtocolError("sender mismatch on client " + std::to_string(id));
        if (up.kind == Kind::kEncryptedUpdate) {
          if (!ctx_) throw ProtocolError("encrypted update in a plaintext mode");
          agg.Add(DecodeEncryptedUpdate(*ctx_, up.payload));
        } else if (up.kind == Kind::kPlainUpdate) {
          agg.Add(DecodePlainUpdate(up.payload));
        } else {
          throw ProtocolError("expected an update, got " + transport::KindName(up.kind));
        }
        Envelope rep = Expect(*slot.endpoint, Kind::kRoundReport, round);
        metrics.push_back(DecodeReport(rep.payload, id));
      }
      Trace(round, "aggregate");
      if (ctx_) {
        auto sum = agg.FinishEncrypted();
        Trace(round, "decrypt");
        global_ = RemoteDecrypt(sum, round);
      } else {
        global_ = agg.FinishPlain();
      }
      Trace(round, "optimize_pqc");
      global_ = pqc_(std::move(global_), round);
      for (auto& m : metrics) {
        auto& slot = slots_.at(m.client);
        const uint64_t now = Traffic(*slot.endpoint);
        m.bytes = now - slot.last_bytes;
        slot.last_bytes = now;
      }
      Finish(round, std::move(metrics), t0);
    }
    round = config_.fl.rounds;
  }

  std::vector<double> RemoteDecrypt(const std::vector<ckks::Ciphertext>& sum, uint32_t round) {
    const auto payload = DecryptRequest(*ctx_, sum, global_.size(), config_.compress_ciphertexts);
    std::vector<uint32_t> targets;
    for (const auto& [id, slot] : slots_) {
      targets.push_back(id);
      if (!config_.fl.decrypt_all_clients) break;
    }
    for (uint32_t id : targets) {
      slots_.at(id).endpoint->Send(Envelope{Kind::kDecryptRequest, round, kServerId, payload});
    }
    std::vector<double> out;
    for (uint32_t id : targets) {
      Envelope env = Expect(*slots_.at(id).endpoint, Kind::kGlobalModel, round);
      auto w = DecodeWeights(env.payload);
      if (out.empty()) {
        out = std::move(w);
      } else if (w != out) {
        throw IntegrityError("clients decrypted different global models");
      }
    }
    return out;
  }

  void Finish(uint32_t round, std::vector<ClientMetrics> metrics, Clock::time_point t0) {
    Trace(round, "evaluate");
    SetWeights(*model_, global_);
    RoundReport r;
    r.round = round;
    r.clients = std::move(metrics);
    auto eval = nn::Evaluate(*model_, data_.test);
    r.test_loss = eval.loss;
    r.test_accuracy = eval.accuracy;
    for (const auto& c : r.clients) r.bytes += c.bytes;
    r.seconds = Since(t0);
    CheckFinite(r);
    result_.reports.push_back(r);
    result_.global_weights.push_back(global_);
    result_.final_eval = std::move(eval);
    if (hooks_.on_report) hooks_.on_report(result_.reports.back(), global_);
  }

  void Trace(uint32_t round, const char* stage) { result_.trace.push_back(std::to_string(round) + ":" + stage); }

  const ExperimentConfig& config_;
  const RunHooks& hooks_;
  PqcOptimizer pqc_{hooks_.optimize_pqc};
  PreparedData data_;
  std::unique_ptr<nn::Trainable> model_;
  uint64_t manifest_hash_ = 0;
  std::vector<double> global_;
  ckks::ContextPtr ctx_;
  std::map<uint32_t, ClientSlot> slots_;
  ExperimentResult result_;
};

}  // namespace

PreparedData PrepareData(const ExperimentConfig& config) {
  PreparedData out;
  const uint64_t split_seed = util::DeriveSeed(config.seed, {kTestSplit});
  const std::vector<double> fractions{1.0 - config.test_fraction, config.test_fraction};
  if (!config.external_csv.empty()) {
    auto all = data::LoadFeatureCsv(config.external_csv);
    if (all.empty()) throw InputError("no rows in " + config.external_csv);
    auto labels = FirstLabels(all);
    auto parts = data::StratifiedSplit(labels, fractions, split_seed);
    out.pool = Select(all, parts[0]);
    out.test = Select(all, parts[1]);
    out.head_names = {"label"};
    out.head_classes = {static_cast<size_t>(*std::max_element(labels.begin(), labels.end()) + 1)};
    out.input_shapes = {all[0].inputs.at(0).shape()};
    return out;
  }
  data::SyntheticSpec spec = config.dataset;
  spec.seed = config.seed;
  auto samples = data::GenerateDataset(spec);
  std::vector<int> labels;
  for (const auto& s : samples) labels.push_back(s.sequence_label);
  auto parts = data::StratifiedSplit(labels, fractions, split_seed);
  std::vector<data::MultimodalSample> pool, test;
  std::vector<std::string> corpus;
  for (size_t i : parts[0]) {
    pool.push_back(samples[i]);
    corpus.push_back(samples[i].sequence);
  }
  for (size_t i : parts[1]) test.push_back(samples[i]);
  // Vocabulary comes from training material only.
  auto vocab = data::TfidfVocab::Fit(corpus, spec.k);
  out.pool = data::ToExamples(pool, vocab);
  out.test = data::ToExamples(test, vocab);
  // Unit-norm TF-IDF rows have entries of order 1/sqrt(V); rescale to unit
  // RMS so the encoder sees inputs on the scale its init assumes.
  const double gain = std::sqrt(static_cast<double>(vocab.size()));
  for (auto* set : {&out.pool, &out.test}) {
    for (auto& ex : *set) {
      auto& x = ex.inputs[0];
      for (size_t i = 0; i < x.size(); ++i) x[i] *= gain;
    }
  }
  out.head_names = {"sequence", "image"};
  out.head_classes = {spec.sequence.classes, spec.image.classes};
  out.input_shapes = {nn::Shape{vocab.size()}, nn::Shape{1, spec.image_side, spec.image_side}};
  return out;
}

std::unique_ptr<nn::Trainable> BuildModel(const ExperimentConfig& config, const PreparedData& data) {
  const auto& m = config.model;
  const uint64_t seed = util::DeriveSeed(config.seed, {kModelInit});
  const auto d = static_cast<size_t>(m.qubits);
  if (data.input_shapes.size() == 1) {
    std::vector<nn::LayerSpec> specs{{.type = "flatten"}, {.type = "dense", .out = d}};
    if (IsQuantum(config.mode)) {
      specs.push_back({.type = "quantum", .qubits = m.qubits, .layers = m.pqc_layers});
    } else {
      specs.push_back({.type = "dense", .out = d, .activation = "tanh"});
    }
    specs.push_back({.type = "dense", .out = data.head_classes.at(0)});
    nn::Prng prng(seed);
    return std::make_unique<nn::Classifier>(nn::BuildSequential(specs, data.input_shapes[0], prng, "net"));
  }
  mqmoe::MqmoeConfig c;
  c.qubits = m.qubits;
  c.pqc_layers = m.pqc_layers;
  c.attention_heads = m.attention_heads;
  c.quantum = IsQuantum(config.mode);
  c.experts.push_back({data.head_names[0],
                       data.input_shapes[0],
                       {{.type = "dense", .out = m.sequence_hidden, .activation = "relu"},
                        {.type = "dense", .out = d}},
                       data.head_classes[0]});
  c.experts.push_back({data.head_names[1],
                       data.input_shapes[1],
                       {{.type = "conv2d", .channels = m.conv_channels, .kernel = 3},
                        {.type = "relu"},
                        {.type = "maxpool", .k = 2},
                        {.type = "dense", .out = d}},
                       data.head_classes[1]});
  return std::make_unique<mqmoe::MqmoeModel>(c, seed);
}

void RunClient(const ExperimentConfig& config, uint32_t id, Endpoint& endpoint) {
  endpoint.set_timeout(transport::Millis(config.timeout_ms));
  PreparedData data = PrepareData(config);
  auto parts = PartitionDataset(FirstLabels(data.pool), config.fl.clients, config.fl.partition,
                                util::DeriveSeed(config.seed, {kPartition}));
  if (id >= parts.size()) throw ProtocolError("client id " + std::to_string(id) + " out of range");
  std::vector<nn::Example> train, val;
  SplitTrainVal(Select(data.pool, parts[id]), config.fl.val_fraction,
                util::DeriveSeed(config.seed, {kClientSplit, id}), train, val);
  const uint64_t samples = train.size();

  auto model = BuildModel(config, data);
  const uint64_t hash = nn::FlattenWeights(*model).LayoutHash();

  ckks::ContextPtr ctx;
  std::optional<ckks::KeyGenerator> keygen;
  std::optional<ckks::PublicKey> pk;
  if (UsesFhe(config.mode)) {
    ctx = MakeContext(config);
    // One key pair shared by every client; the server never sees it.
    keygen.emplace(ctx, util::DeriveSeed(config.seed, {kKeys}));
    pk = keygen->CreatePublicKey();
  }

  endpoint.Send(Envelope{Kind::kJoin, 0, id, JoinPayload(samples, hash)});
  while (true) {
    Envelope env = endpoint.Recv();
    const uint32_t round = env.round;
    switch (env.kind) {
      case Kind::kGlobalModel: {
        auto t0 = Clock::now();
        SetWeights(*model, DecodeWeights(env.payload));
        json report{{"samples", samples}};
        if (config.fl.epochs_per_client > 0) {
          auto t = LocalTrainConfig(config, config.fl.epochs_per_client,
                                    util::DeriveSeed(config.seed, {kLocalTrain, id, round}));
          auto res = nn::TrainLocal(*model, train, t, val);
          report["loss"] = res.history.back().loss;
          report["accuracy"] = res.history.back().head_accuracy;
        } else {
          auto eval = nn::Evaluate(*model, train);
          report["loss"] = eval.loss;
          report["accuracy"] = eval.accuracy;
        }
        PlainUpdate u{id, round, samples, hash, WeightsOf(*model)};
        if (ctx) {
          auto enc = EncryptUpdate(ctx, *pk, u, util::DeriveSeed(config.seed, {kEncrypt, id, round}));
          endpoint.Send(Envelope{Kind::kEncryptedUpdate, round, id,
                                 EncodeEncryptedUpdate(*ctx, enc, config.compress_ciphertexts)});
        } else {
          endpoint.Send(Envelope{Kind::kPlainUpdate, round, id, EncodePlainUpdate(u)});
        }
        endpoint.Send(Envelope{Kind::kRoundReport, round, id, EncodeReport(Since(t0), report)});
        break;
      }
      case Kind::kDecryptRequest: {
        if (!ctx) throw ConfigError("decrypt request without an encryption context", "mode");
        util::ByteReader r(env.payload);
        const auto count = r.Get<uint64_t>();
        auto cts = DecodeCiphertexts(*ctx, r.GetBytes(r.remaining()));
        auto w = DecryptWeights(ctx, keygen->secret_key(), cts, count);
        endpoint.Send(Envelope{Kind::kGlobalModel, round, id, EncodeWeights(w)});
        break;
      }
      case Kind::kShutdown:
        return;
      default:
        throw ProtocolError("client got unexpected " + transport::KindName(env.kind));
    }
  }
}

ExperimentResult RunExperiment(const ExperimentConfig& config, const RunHooks& hooks) {
  config.Validate();
  if (!IsFederated(config.mode)) return RunCentralized(config, hooks);
  Server server(config, hooks);
  return server.Run();
}

std::string RoundsCsv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "round,client,split,loss,accuracy,seconds,bytes";
  for (const auto& h : result.head_names) out << ",accuracy_" << h;
  out << "\n";
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  auto row = [&](uint32_t round, const std::string& who, const char* split, double loss,
                 const std::vector<double>& acc, double seconds, uint64_t bytes) {
    out << round << "," << who << "," << split << "," << FormatDouble(loss) << "," << FormatDouble(mean(acc))
        << "," << FormatDouble(seconds) << "," << bytes;
    for (size_t h = 0; h < result.head_names.size(); ++h) {
      out << "," << (h < acc.size() ? FormatDouble(acc[h]) : "");
    }
    out << "\n";
  };
  for (const auto& r : result.reports) {
    for (const auto& c : r.clients) {
      row(r.round, std::to_string(c.client), "train", c.loss, c.accuracy, c.seconds, c.bytes);
    }
    row(r.round, "global", "test", r.test_loss, r.test_accuracy, r.seconds, r.bytes);
  }
  return out.str();
}

}  // namespace mqfl::fl
