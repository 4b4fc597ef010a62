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

// Python bindings. Configs and results cross the boundary as JSON text;
// the package wrapper turns them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mqfl/ckks/context.h"
#include "mqfl/ckks/encoder.h"
#include "mqfl/ckks/evaluator.h"
#include "mqfl/ckks/keys.h"
#include "mqfl/ckks/serialization.h"
#include "mqfl/cli/commands.h"
#include "mqfl/data/metrics.h"
#include "mqfl/errors.h"
#include "mqfl/fl/aggregate.h"
#include "mqfl/fl/experiment.h"
#include "mqfl/fl/partition.h"
#include "mqfl/noise/bench.h"
#include "mqfl/noise/rotation.h"
#include "mqfl/quantum/statevector.h"

namespace py = pybind11;
using nlohmann::json;

namespace mqfl {
namespace {

using Bytes = std::vector<uint8_t>;

py::bytes ToPy(const Bytes& b) { return py::bytes(reinterpret_cast<const char*>(b.data()), b.size()); }

Bytes FromPy(const py::bytes& b) {
  const std::string s = b;
  return Bytes(s.begin(), s.end());
}

// Context plus everything derived from it, so Python holds one handle.
struct Session {
  ckks::ContextPtr ctx;
  std::shared_ptr<ckks::Encoder> encoder;
  std::shared_ptr<ckks::Evaluator> evaluator;
};

Session MakeSession(const ckks::CkksParams& params) {
  auto ctx = ckks::Context::Create(params);
  return {ctx, std::make_shared<ckks::Encoder>(ctx), std::make_shared<ckks::Evaluator>(ctx)};
}

json ReportJson(const fl::RoundReport& r) {
  json clients = json::array();
  for (const auto& c : r.clients) {
    clients.push_back({{"client", c.client},
                       {"samples", c.samples},
                       {"loss", c.loss},
                       {"accuracy", c.accuracy},
                       {"seconds", c.seconds},
                       {"bytes", c.bytes}});
  }
  return {{"round", r.round},     {"test_loss", r.test_loss}, {"test_accuracy", r.test_accuracy},
          {"seconds", r.seconds}, {"bytes", r.bytes},         {"clients", clients}};
}

std::string ResultJson(const fl::ExperimentResult& r) {
  json reports = json::array();
  for (const auto& rep : r.reports) reports.push_back(ReportJson(rep));
  return json{{"ok", r.ok()},
              {"error", r.error},
              {"failed_round", r.failed_round},
              {"head_names", r.head_names},
              {"reports", reports},
              {"trace", r.trace},
              {"pqc_calls", r.pqc_calls},
              {"final_weights", r.global_weights.empty() ? std::vector<double>{} : r.global_weights.back()}}
      .dump();
}

noise::EulerAngles Angles(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

}  // namespace
}  // namespace mqfl

PYBIND11_MODULE(_core, m) {
  using namespace mqfl;
  m.doc() = "Multimodal quantum federated learning core";
  m.attr("__version__") = cli::kVersion;

  static py::exception<Error> base(m, "MqflError");
  static py::exception<ConfigError> config_error(m, "ConfigError", base.ptr());
  static py::exception<InputError> input_error(m, "InputError", base.ptr());
  static py::exception<ProtocolError> protocol_error(m, "ProtocolError", base.ptr());
  static py::exception<IntegrityError> integrity_error(m, "IntegrityError", base.ptr());
  static py::exception<ParseError> parse_error(m, "ParseError", base.ptr());
  static py::exception<ContractViolation> contract_error(m, "ContractViolation", base.ptr());
  static py::exception<ParameterError> parameter_error(m, "ParameterError", base.ptr());
  static py::exception<UndefinedResult> undefined_error(m, "UndefinedResult", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      const std::string msg = e.field().empty() ? e.what() : e.field() + ": " + e.what();
      PyErr_SetString(config_error.ptr(), msg.c_str());
    } catch (const InputError& e) {
      PyErr_SetString(input_error.ptr(), e.what());
    } catch (const ProtocolError& e) {
      PyErr_SetString(protocol_error.ptr(), e.what());
    } catch (const IntegrityError& e) {
      PyErr_SetString(integrity_error.ptr(), e.what());
    } catch (const ParseError& e) {
      PyErr_SetString(parse_error.ptr(), e.what());
    } catch (const ContractViolation& e) {
      PyErr_SetString(contract_error.ptr(), e.what());
    } catch (const ParameterError& e) {
      PyErr_SetString(parameter_error.ptr(), e.what());
    } catch (const UndefinedResult& e) {
      PyErr_SetString(undefined_error.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(base.ptr(), e.what());
    }
  });

  // ---- CKKS
  py::class_<Session>(m, "Context")
      .def(py::init([](const std::string& profile) { return MakeSession(ckks::CkksParams::FromProfile(profile)); }),
           py::arg("profile") = "paper")
      .def(py::init([](size_t degree, std::vector<int> bits, double scale) {
             return MakeSession(ckks::CkksParams{degree, std::move(bits), scale});
           }),
           py::arg("poly_degree"), py::arg("modulus_bits"), py::arg("scale"))
      .def_property_readonly("poly_degree", [](const Session& s) { return s.ctx->degree(); })
      .def_property_readonly("slot_count", [](const Session& s) { return s.ctx->slot_count(); })
      .def_property_readonly("max_level", [](const Session& s) { return s.ctx->max_level(); })
      .def_property_readonly("scale", [](const Session& s) { return s.ctx->default_scale(); })
      .def_property_readonly("fingerprint", [](const Session& s) { return s.ctx->fingerprint(); })
      .def_property_readonly("primes", [](const Session& s) {
        std::vector<uint64_t> q;
        for (const auto& p : s.ctx->key_chain()) q.push_back(p->value());
        return q;
      });

  py::class_<ckks::KeySet>(m, "KeySet")
      .def("secret_key_bytes",
           [](const ckks::KeySet& k, const Session& s) { return ToPy(ckks::SerializeSecretKey(*s.ctx, k.secret)); })
      .def("public_key_bytes", [](const ckks::KeySet& k, const Session& s) {
        return ToPy(ckks::SerializePublicKey(*s.ctx, k.public_key));
      });
  m.def("generate_keys", [](const Session& s, uint64_t seed) { return ckks::GenerateKeys(s.ctx, seed); },
        py::arg("context"), py::arg("seed"));

  py::class_<ckks::Ciphertext>(m, "Ciphertext")
      .def_readonly("level", &ckks::Ciphertext::level)
      .def_readonly("scale", &ckks::Ciphertext::scale)
      .def_property_readonly("parts", [](const ckks::Ciphertext& c) { return c.parts.size(); });

  m.def(
      "encrypt",
      [](const Session& s, const ckks::KeySet& keys, const std::vector<double>& values, uint64_t seed) {
        ring::Prng prng(seed);
        return s.evaluator->Encrypt(keys.public_key, s.encoder->Encode(values), prng);
      },
      py::arg("context"), py::arg("keys"), py::arg("values"), py::arg("seed"));
  m.def(
      "decrypt",
      [](const Session& s, const ckks::KeySet& keys, const ckks::Ciphertext& ct) {
        return s.encoder->Decode(s.evaluator->Decrypt(keys.secret, ct));
      },
      py::arg("context"), py::arg("keys"), py::arg("ciphertext"));
  m.def("add", [](const Session& s, const ckks::Ciphertext& a, const ckks::Ciphertext& b) {
    return s.evaluator->Add(a, b);
  });
  m.def("multiply_plain", [](const Session& s, const ckks::Ciphertext& a, const std::vector<double>& values) {
    return s.evaluator->Rescale(s.evaluator->MulPlain(a, s.encoder->Encode(values, s.ctx->default_scale(), a.level)));
  });
  m.def(
      "serialize_ciphertext",
      [](const Session& s, const ckks::Ciphertext& ct, bool compress) {
        return ToPy(ckks::SerializeCiphertext(*s.ctx, ct, compress));
      },
      py::arg("context"), py::arg("ciphertext"), py::arg("compress") = false);
  m.def("deserialize_ciphertext",
        [](const Session& s, const py::bytes& b) { return ckks::DeserializeCiphertext(*s.ctx, FromPy(b)); });

  // ---- aggregation
  m.def("aggregation_weights", &fl::AggregationWeights, py::arg("samples"));
  m.def(
      "aggregate_plain",
      [](const std::vector<std::vector<double>>& weights, const std::vector<uint64_t>& samples) {
        if (weights.size() != samples.size()) throw InputError("one sample count per client");
        std::vector<fl::PlainUpdate> ups;
        for (uint32_t c = 0; c < weights.size(); ++c) ups.push_back({c, 1, samples[c], 0, weights[c]});
        return fl::AggregatePlain(std::move(ups));
      },
      py::arg("weights"), py::arg("samples"));
  m.def(
      "aggregate_encrypted",
      [](const Session& s, const ckks::KeySet& keys, const std::vector<std::vector<double>>& weights,
         const std::vector<uint64_t>& samples, uint64_t seed) {
        if (weights.size() != samples.size() || weights.empty()) throw InputError("one sample count per client");
        std::map<uint32_t, uint64_t> n;
        for (uint32_t c = 0; c < samples.size(); ++c) n[c] = samples[c];
        fl::Aggregator agg(s.ctx, n, 0);
        agg.BeginRound(1);
        for (uint32_t c = 0; c < weights.size(); ++c) {
          agg.Add(fl::EncryptUpdate(s.ctx, keys.public_key, {c, 1, samples[c], 0, weights[c]},
                                    seed + 0x9e3779b97f4a7c15ULL * (c + 1)));
        }
        return fl::DecryptWeights(s.ctx, keys.secret, agg.FinishEncrypted(), weights[0].size());
      },
      py::arg("context"), py::arg("keys"), py::arg("weights"), py::arg("samples"), py::arg("seed") = 0,
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "partition_dataset",
      [](const std::vector<int>& labels, size_t clients, const std::string& scheme, double alpha, uint64_t seed) {
        return fl::PartitionDataset(labels, clients, {fl::ParsePartitionScheme(scheme), alpha}, seed);
      },
      py::arg("labels"), py::arg("clients"), py::arg("scheme") = "iid", py::arg("alpha") = 0.5, py::arg("seed") = 0);

  // ---- quantum
  m.def(
      "quantum_layer",
      [](const std::vector<double>& x, const std::vector<double>& angles, int layers) {
        return quantum::QuantumLayerForward(x, {static_cast<int>(x.size()), layers, angles});
      },
      py::arg("x"), py::arg("angles"), py::arg("layers"));
  m.def(
      "param_shift_grad",
      [](const std::vector<double>& x, const std::vector<double>& angles, int layers,
         const std::vector<double>& upstream) {
        auto g = quantum::ParamShiftGrad(x, {static_cast<int>(x.size()), layers, angles}, upstream);
        return std::make_pair(g.angles, g.inputs);
      },
      py::arg("x"), py::arg("angles"), py::arg("layers"), py::arg("upstream"));

  // ---- noise lab and bench
  m.def("fundamental_period", [](const std::array<double, 3>& a) { return noise::FundamentalPeriod(Angles(a)); },
        py::arg("angles"));
  m.def(
      "rotation",
      [](const std::array<double, 3>& a, double t) { return noise::ExpGenerator(noise::BuildGenerator(Angles(a)), t); },
      py::arg("angles"), py::arg("t"));
  m.def(
      "angular_errors",
      [](const noise::Vec3& v, const noise::Vec3& v_err, const std::vector<double>& t, const std::array<double, 3>& a) {
        auto tr = noise::AngularErrors(v, v_err, t, noise::BuildGenerator(Angles(a)));
        return std::make_pair(tr.delta_az, tr.delta_el);
      },
      py::arg("v"), py::arg("v_err"), py::arg("t"), py::arg("angles"));
  m.def("estimate_period", &noise::EstimatePeriod, py::arg("values"), py::arg("dt"));
  m.def(
      "bench_sweep",
      [](std::optional<std::vector<std::array<int, 3>>> grid, double budget_bits, size_t samples, bool compress,
         uint64_t seed) {
        std::vector<noise::BenchPoint> points;
        if (grid) {
          for (const auto& g : *grid) points.push_back({g[0], static_cast<size_t>(g[1]), g[2]});
        } else {
          points = noise::ReferenceGrid();
        }
        std::vector<noise::BenchRow> rows;
        {
          py::gil_scoped_release release;
          rows = noise::BenchSweep(points, {budget_bits, samples, compress, seed});
        }
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["bit_scale"] = r.point.bit_scale;
          d["poly_degree"] = r.point.poly_degree;
          d["extrema_count"] = r.point.extrema_count;
          d["ok"] = r.ok;
          d["error"] = r.error;
          d["encrypted_param_count"] = r.encrypted_param_count;
          d["seconds"] = r.seconds;
          d["serialized_bytes"] = r.serialized_bytes;
          d["encrypt_seconds"] = r.encrypt_seconds;
          d["serialize_seconds"] = r.serialize_seconds;
          out.append(d);
        }
        return out;
      },
      py::arg("grid") = py::none(), py::arg("budget_bits") = double(1u << 30), py::arg("samples") = 3,
      py::arg("compress") = true, py::arg("seed") = 1);

  // ---- metrics
  m.def(
      "roc_curve",
      [](const std::vector<double>& scores, const std::vector<bool>& positive) {
        std::vector<std::tuple<double, double, double>> out;
        for (const auto& p : data::RocCurve(scores, positive)) out.emplace_back(p.fpr, p.tpr, p.threshold);
        return out;
      },
      py::arg("scores"), py::arg("positive"));
  m.def(
      "auc",
      [](const std::vector<double>& scores, const std::vector<bool>& positive) {
        return data::Auc(data::RocCurve(scores, positive));
      },
      py::arg("scores"), py::arg("positive"));
  m.def(
      "micro_macro_auc",
      [](const std::vector<std::vector<double>>& probs, const std::vector<int>& labels) {
        auto a = data::MicroMacroAuc(probs, labels);
        return py::make_tuple(a.micro, a.macro, a.per_class);
      },
      py::arg("probs"), py::arg("labels"));
  m.def("confusion_matrix", &data::ConfusionMatrix, py::arg("predictions"), py::arg("labels"), py::arg("classes"),
        py::arg("normalize") = false);

  // ---- experiments (JSON text in and out)
  m.def(
      "normalize_config",
      [](const std::string& text) { return fl::ExperimentConfig::FromJson(json::parse(text)).ToJson().dump(); },
      py::arg("config_json"));
  m.def(
      "run_experiment",
      [](const std::string& text) {
        auto cfg = fl::ExperimentConfig::FromJson(json::parse(text));
        py::gil_scoped_release release;
        return mqfl::ResultJson(fl::RunExperiment(cfg));
      },
      py::arg("config_json"));
  m.def(
      "run_command",
      [](const std::string& command, const std::string& text, const std::string& out_dir, bool resume) {
        auto cfg = fl::ExperimentConfig::FromJson(json::parse(text));
        py::gil_scoped_release release;
        return mqfl::ResultJson(cli::RunExperimentCommand(command, cfg, out_dir, resume));
      },
      py::arg("command"), py::arg("config_json"), py::arg("out_dir"), py::arg("resume") = false);
}
