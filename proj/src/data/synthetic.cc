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

#include "mqfl/data/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "mqfl/errors.h"
#include "mqfl/util/bytes.h"
#include "mqfl/util/file.h"
#include "mqfl/util/seed.h"

namespace mqfl::data {

namespace {

constexpr char kBases[] = {'A', 'C', 'G', 'T'};

// Independent stream per (seed, stream tag, index).
nn::Prng Derived(uint64_t seed, uint64_t tag, uint64_t index) {
  return nn::Prng(util::DeriveSeed(seed, {tag, index}));
}

enum Stream : uint64_t { kMotifs = 1, kSeqLabels, kSeqBody, kImgLabels, kImgBody, kPairing };

std::vector<int> ShuffledLabels(size_t total, const ModalitySpec& m, nn::Prng prng) {
  auto counts = ClassCounts(total, m);
  std::vector<int> labels;
  for (size_t c = 0; c < counts.size(); ++c) labels.insert(labels.end(), counts[c], static_cast<int>(c));
  std::shuffle(labels.begin(), labels.end(), prng);
  return labels;
}

void ValidateModality(const ModalitySpec& m, const std::string& name) {
  if (m.classes < 2) throw ConfigError("need at least two classes", name + ".classes");
  if (!(m.imbalance_factor >= 1.0) || !std::isfinite(m.imbalance_factor)) {
    throw ConfigError("imbalance factor must be >= 1", name + ".imbalance_factor");
  }
}

}  // namespace

void SyntheticSpec::Validate() const {
  ValidateModality(sequence, "sequence");
  ValidateModality(image, "image");
  if (samples < std::max(sequence.classes, image.classes)) {
    throw ConfigError("fewer samples than classes", "samples");
  }
  if (k == 0) throw ConfigError("k must be positive", "k");
  if (motif_length < k || motif_length > sequence_length) {
    throw ConfigError("motif length must lie in [k, sequence_length]", "motif_length");
  }
  if (!(motif_noise >= 0.0 && motif_noise <= 1.0)) {
    throw ConfigError("motif noise must be a probability", "motif_noise");
  }
  if (!(pixel_noise >= 0.0)) throw ConfigError("pixel noise must be non-negative", "pixel_noise");
  if (image_side < 4) throw ConfigError("image side must be at least 4", "image_side");
  // 4^len distinct motifs must cover the classes.
  if (motif_length < 8 && (size_t{1} << (2 * motif_length)) < sequence.classes) {
    throw ConfigError("motif too short for the class count", "motif_length");
  }
}

uint64_t SyntheticSpec::Hash() const {
  std::ostringstream s;
  s.precision(17);
  s << samples << ',' << sequence.classes << ',' << sequence.imbalance_factor << ','
    << image.classes << ',' << image.imbalance_factor << ',' << sequence_length << ','
    << motif_length << ',' << k << ',' << image_side << ',' << motif_noise << ','
    << pixel_noise << ',' << seed;
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s.str()) {
    h ^= static_cast<uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<size_t> ClassCounts(size_t total, const ModalitySpec& m) {
  const size_t c = m.classes;
  std::vector<double> w(c);
  double sum = 0;
  for (size_t i = 0; i < c; ++i) {
    w[i] = c == 1 ? 1.0 : std::pow(m.imbalance_factor, -static_cast<double>(i) / (c - 1));
    sum += w[i];
  }
  // Largest remainder.
  std::vector<size_t> counts(c);
  std::vector<std::pair<double, size_t>> rem;
  size_t assigned = 0;
  for (size_t i = 0; i < c; ++i) {
    const double q = total * w[i] / sum;
    counts[i] = static_cast<size_t>(std::floor(q));
    assigned += counts[i];
    rem.emplace_back(q - counts[i], i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](auto& a, auto& b) { return a.first > b.first; });
  for (size_t i = 0; assigned < total; ++i, ++assigned) ++counts[rem[i % c].second];
  return counts;
}

double ImbalanceFactor(const std::vector<int>& labels, size_t classes) {
  std::vector<size_t> counts(classes, 0);
  for (int l : labels) {
    if (l < 0 || static_cast<size_t>(l) >= classes) throw InputError("label out of range");
    ++counts[l];
  }
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  if (*lo == 0) throw UndefinedResult("a class has no samples");
  return static_cast<double>(*hi) / static_cast<double>(*lo);
}

std::vector<std::string> Motifs(const SyntheticSpec& spec) {
  nn::Prng prng = Derived(spec.seed, kMotifs, 0);
  std::uniform_int_distribution<int> base(0, 3);
  std::set<std::string> seen;
  std::vector<std::string> motifs;
  while (motifs.size() < spec.sequence.classes) {
    std::string m(spec.motif_length, 'A');
    for (auto& ch : m) ch = kBases[base(prng)];
    if (seen.insert(m).second) motifs.push_back(m);
  }
  return motifs;
}

std::vector<LabeledSequence> GenerateSequences(const SyntheticSpec& spec) {
  spec.Validate();
  const auto motifs = Motifs(spec);
  const auto labels = ShuffledLabels(spec.samples, spec.sequence, Derived(spec.seed, kSeqLabels, 0));
  std::vector<LabeledSequence> out(spec.samples);
  for (size_t i = 0; i < spec.samples; ++i) {
    nn::Prng prng = Derived(spec.seed, kSeqBody, i);
    std::uniform_int_distribution<int> base(0, 3), other(1, 3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::string s(spec.sequence_length, 'A');
    for (auto& ch : s) ch = kBases[base(prng)];
    std::uniform_int_distribution<size_t> pos(0, spec.sequence_length - spec.motif_length);
    const size_t at = pos(prng);
    const std::string& motif = motifs[labels[i]];
    for (size_t j = 0; j < motif.size(); ++j) {
      char ch = motif[j];
      if (u(prng) < spec.motif_noise) {
        const int idx = static_cast<int>(std::find(kBases, kBases + 4, ch) - kBases);
        ch = kBases[(idx + other(prng)) % 4];
      }
      s[at + j] = ch;
    }
    out[i] = {std::move(s), labels[i]};
  }
  return out;
}

std::vector<LabeledImage> GenerateImages(const SyntheticSpec& spec) {
  spec.Validate();
  const auto labels = ShuffledLabels(spec.samples, spec.image, Derived(spec.seed, kImgLabels, 0));
  const size_t n = spec.image_side;
  const double mid = (n - 1) / 2.0, radius = n / 4.0, sigma = n / 8.0;
  std::vector<LabeledImage> out(spec.samples);
  for (size_t i = 0; i < spec.samples; ++i) {
    nn::Prng prng = Derived(spec.seed, kImgBody, i);
    std::normal_distribution<double> noise(0.0, 1.0);
    // Class centers sit on a circle; with four classes, one per quadrant.
    const double angle = 2.0 * std::numbers::pi * labels[i] / spec.image.classes + std::numbers::pi / 4;
    const double cy = mid + radius * std::sin(angle), cx = mid + radius * std::cos(angle);
    nn::Tensor img({1, n, n});
    for (size_t y = 0; y < n; ++y) {
      for (size_t x = 0; x < n; ++x) {
        const double r2 = (y - cy) * (y - cy) + (x - cx) * (x - cx);
        double v = std::exp(-r2 / (2 * sigma * sigma));
        if (spec.pixel_noise > 0) v += spec.pixel_noise * noise(prng);
        img[y * n + x] = v;
      }
    }
    out[i] = {std::move(img), labels[i]};
  }
  return out;
}

std::vector<MultimodalSample> PairModalities(const std::vector<LabeledSequence>& seqs,
                                             const std::vector<LabeledImage>& imgs,
                                             uint64_t seed) {
  if (seqs.size() != imgs.size()) throw InputError("modalities have different sample counts");
  std::vector<size_t> order(imgs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  nn::Prng prng = Derived(seed, kPairing, 0);
  std::shuffle(order.begin(), order.end(), prng);
  std::vector<MultimodalSample> out(seqs.size());
  for (size_t i = 0; i < seqs.size(); ++i) {
    out[i] = {seqs[i].text, imgs[order[i]].pixels, seqs[i].label, imgs[order[i]].label};
  }
  return out;
}

std::vector<MultimodalSample> GenerateDataset(const SyntheticSpec& spec) {
  return PairModalities(GenerateSequences(spec), GenerateImages(spec), spec.seed);
}

std::vector<nn::Example> ToExamples(const std::vector<MultimodalSample>& samples,
                                    const TfidfVocab& vocab) {
  std::vector<nn::Example> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    out.push_back({{nn::Tensor::Vector(vocab.Transform(s.sequence)), s.image},
                   {s.sequence_label, s.image_label}});
  }
  return out;
}

void SaveDataset(const std::string& path, const std::vector<MultimodalSample>& samples,
                 uint64_t spec_hash) {
  util::ByteWriter w;
  w.PutString("MQD1");
  w.Put<uint64_t>(spec_hash);
  w.Put<uint32_t>(static_cast<uint32_t>(samples.size()));
  for (const auto& s : samples) {
    w.Put<int32_t>(s.sequence_label);
    w.Put<int32_t>(s.image_label);
    w.Put<uint32_t>(static_cast<uint32_t>(s.sequence.size()));
    w.PutString(s.sequence);
    const auto& shape = s.image.shape();
    if (shape.size() != 3) throw ContractViolation("image must be [C, H, W]");
    for (size_t d : shape) w.Put<uint32_t>(static_cast<uint32_t>(d));
    for (double v : s.image.values()) w.Put<uint32_t>(std::bit_cast<uint32_t>(static_cast<float>(v)));
  }
  w.Put<uint32_t>(util::Crc32(w.bytes()));
  util::WriteFileBytes(path, w.bytes());
}

std::vector<MultimodalSample> LoadDataset(const std::string& path, uint64_t* spec_hash) {
  using Reason = ParseError::Reason;
  const auto bytes = util::ReadFileBytes(path);
  if (bytes.size() < 20) throw ParseError(Reason::kTruncated, "dataset cache truncated");
  const size_t body = bytes.size() - 4;
  const std::span<const uint8_t> all(bytes);
  util::ByteReader tail(all.subspan(body));
  if (tail.Get<uint32_t>() != util::Crc32(all.first(body))) {
    throw ParseError(Reason::kBadChecksum, "dataset cache checksum mismatch");
  }
  util::ByteReader r(all.first(body));
  auto magic = r.GetBytes(4);
  if (std::string(magic.begin(), magic.end()) != "MQD1") {
    throw ParseError(Reason::kBadMagic, "not a dataset cache");
  }
  const uint64_t hash = r.Get<uint64_t>();
  if (spec_hash) *spec_hash = hash;
  const uint32_t count = r.Get<uint32_t>();
  std::vector<MultimodalSample> out;
  for (uint32_t i = 0; i < count; ++i) {
    MultimodalSample s;
    s.sequence_label = r.Get<int32_t>();
    s.image_label = r.Get<int32_t>();
    auto text = r.GetBytes(r.Get<uint32_t>());
    s.sequence.assign(text.begin(), text.end());
    nn::Shape shape(3);
    for (auto& d : shape) d = r.Get<uint32_t>();
    if (nn::ShapeSize(shape) > r.remaining() / 4) {
      throw ParseError(Reason::kTruncated, "image record truncated");
    }
    nn::Tensor img(shape);
    for (auto& v : img.values()) v = std::bit_cast<float>(r.Get<uint32_t>());
    s.image = std::move(img);
    out.push_back(std::move(s));
  }
  if (r.remaining() != 0) throw ParseError(Reason::kMalformed, "trailing bytes in dataset cache");
  return out;
}

std::vector<nn::Example> LoadFeatureCsv(const std::string& path) {
  std::istringstream in(util::ReadFileText(path));
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      cells.push_back(cell);
    }
    return cells;
  };
  if (!std::getline(in, line)) throw InputError("feature CSV " + path + " is empty");
  const auto header = split(line);
  auto it = std::find(header.begin(), header.end(), "label");
  if (it == header.end()) throw InputError("feature CSV has no 'label' column");
  const size_t label_col = it - header.begin();
  std::vector<nn::Example> out;
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw InputError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(header.size()));
    }
    std::vector<double> features;
    int label = 0;
    try {
      for (size_t c = 0; c < cells.size(); ++c) {
        if (c == label_col) {
          label = std::stoi(cells[c]);
        } else {
          features.push_back(std::stod(cells[c]));
        }
      }
    } catch (const std::exception&) {
      throw InputError("row " + std::to_string(row) + " has a non-numeric cell");
    }
    out.push_back({{nn::Tensor::Vector(std::move(features))}, {label}});
  }
  if (out.empty()) throw InputError("feature CSV has no data rows");
  return out;
}

}  // namespace mqfl::data
