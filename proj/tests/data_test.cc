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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "mqfl/data/metrics.h"
#include "mqfl/data/split.h"
#include "mqfl/data/synthetic.h"
#include "mqfl/data/text.h"
#include "mqfl/errors.h"
#include "mqfl/nn/train.h"

namespace mqfl::data {
namespace {

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

TEST(KmerTest, HandEnumeration) {
  EXPECT_EQ(Kmerize("ACGTAC", 3), (std::vector<std::string>{"ACG", "CGT", "GTA", "TAC"}));
  EXPECT_EQ(Kmerize("ACGTAC", 6), (std::vector<std::string>{"ACGTAC"}));
  EXPECT_THROW(Kmerize("AC", 3), InputError);
  EXPECT_THROW(Kmerize("AC", 0), InputError);
}

TEST(KmerTest, LengthLaw) {
  std::mt19937_64 g(1);
  for (int t = 0; t < 1000; ++t) {
    const size_t len = 1 + g() % 50, k = 1 + g() % len;
    std::string s(len, 'A');
    for (auto& c : s) c = "ACGT"[g() % 4];
    EXPECT_EQ(Kmerize(s, k).size(), len - k + 1);
  }
}

TEST(TfidfTest, SingleDocumentHasUnitIdf) {
  auto v = TfidfVocab::Fit({"AACAAC"}, 2);
  // Tokens: AA, AC, CA, AA, AC -> counts AA 2, AC 2, CA 1.
  ASSERT_EQ(v.size(), 3u);
  for (size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(v.Idf(i), 1.0);
  auto x = v.Transform("AACAAC");
  const double norm = std::sqrt(2 * 2 + 2 * 2 + 1);
  EXPECT_NEAR(x[v.index.at("AA")], 2 / norm, 1e-15);
  EXPECT_NEAR(x[v.index.at("AC")], 2 / norm, 1e-15);
  EXPECT_NEAR(x[v.index.at("CA")], 1 / norm, 1e-15);
}

TEST(TfidfTest, SmoothedIdfHandValue) {
  auto v = TfidfVocab::Fit({"AAA", "CCC", "GGG"}, 3);
  EXPECT_NEAR(v.Idf(v.index.at("AAA")), 1.6931471805599454, 1e-15);
  EXPECT_NEAR(v.Idf(v.index.at("AAA")), std::log(4.0 / 2.0) + 1, 1e-15);
  // Unseen tokens add nothing.
  auto x = v.Transform("TTT");
  for (double e : x) EXPECT_EQ(e, 0.0);
  EXPECT_THROW(TfidfVocab::Fit({}, 3), InputError);
}

TEST(TfidfTest, FittedDocumentsAreUnitNonNegative) {
  SyntheticSpec spec;
  spec.samples = 200;
  auto seqs = GenerateSequences(spec);
  std::vector<std::string> corpus;
  for (const auto& s : seqs) corpus.push_back(s.text);
  auto v = TfidfVocab::Fit(corpus, 3);
  EXPECT_LE(v.size(), 64u);
  for (const auto& doc : corpus) {
    auto x = v.Transform(doc);
    double n = 0;
    for (double e : x) {
      EXPECT_GE(e, 0.0);
      n += e * e;
    }
    EXPECT_NEAR(std::sqrt(n), 1.0, 1e-12);
  }
}

TEST(SyntheticTest, MotifPlantedInEverySequence) {
  SyntheticSpec spec;
  spec.samples = 300;
  spec.sequence.classes = 5;
  auto motifs = Motifs(spec);
  EXPECT_EQ(std::set<std::string>(motifs.begin(), motifs.end()).size(), 5u);
  for (const auto& s : GenerateSequences(spec)) {
    EXPECT_EQ(s.text.size(), spec.sequence_length);
    EXPECT_NE(s.text.find(motifs[s.label]), std::string::npos);
  }
}

TEST(SyntheticTest, DeterministicPerSeed) {
  SyntheticSpec spec;
  spec.samples = 50;
  auto a = GenerateDataset(spec), b = GenerateDataset(spec);
  spec.seed = 1;
  auto c = GenerateDataset(spec);
  ASSERT_EQ(a.size(), 50u);
  bool differs = false;
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].sequence, b[i].sequence);
    EXPECT_EQ(a[i].image.vec(), b[i].image.vec());
    EXPECT_EQ(a[i].image_label, b[i].image_label);
    differs |= a[i].sequence != c[i].sequence;
  }
  EXPECT_TRUE(differs);
}

TEST(SyntheticTest, ImbalanceTarget) {
  SyntheticSpec spec;
  spec.samples = 1000;
  spec.sequence = {7, 5.6};
  auto seqs = GenerateSequences(spec);
  std::vector<int> labels;
  for (const auto& s : seqs) labels.push_back(s.label);
  const double measured = ImbalanceFactor(labels, 7);
  EXPECT_NEAR(measured, 5.6, 0.05 * 5.6);
  auto counts = ClassCounts(1000, spec.sequence);
  EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), size_t{0}), 1000u);
  EXPECT_DOUBLE_EQ(ImbalanceFactor({0, 0, 1}, 2), 2.0);
  EXPECT_THROW(ImbalanceFactor({0, 0}, 2), UndefinedResult);
}

TEST(SyntheticTest, PairingKeepsLabelMultisets) {
  SyntheticSpec spec;
  spec.samples = 120;
  spec.image = {3, 2.0};
  auto seqs = GenerateSequences(spec);
  auto imgs = GenerateImages(spec);
  auto pairs = PairModalities(seqs, imgs, 9);
  std::vector<int> before, after;
  for (const auto& i : imgs) before.push_back(i.label);
  for (size_t i = 0; i < pairs.size(); ++i) {
    after.push_back(pairs[i].image_label);
    EXPECT_EQ(pairs[i].sequence_label, seqs[i].label);
    EXPECT_EQ(pairs[i].image.shape(), (nn::Shape{1, 16, 16}));
  }
  std::sort(before.begin(), before.end());
  std::sort(after.begin(), after.end());
  EXPECT_EQ(before, after);
  imgs.pop_back();
  EXPECT_THROW(PairModalities(seqs, imgs, 9), InputError);
}

TEST(SyntheticTest, NoiselessMotifsAreLinearlySeparable) {
  SyntheticSpec spec;
  spec.samples = 400;
  spec.sequence.classes = 4;
  auto seqs = GenerateSequences(spec);
  std::vector<std::string> corpus;
  for (const auto& s : seqs) corpus.push_back(s.text);
  auto vocab = TfidfVocab::Fit(corpus, spec.k);
  std::vector<nn::Example> data;
  for (const auto& s : seqs) data.push_back({{nn::Tensor::Vector(vocab.Transform(s.text))}, {s.label}});
  nn::Prng g(3);
  nn::Classifier linear(nn::BuildSequential({{.type = "dense", .out = 4}}, {vocab.size()}, g, "lin"));
  nn::TrainConfig cfg;
  cfg.lr = 0.05;
  cfg.epochs = 60;
  cfg.batch_size = 16;
  nn::TrainLocal(linear, data, cfg);
  EXPECT_EQ(nn::Evaluate(linear, data).accuracy[0], 1.0);
}

TEST(SyntheticTest, SpecValidation) {
  SyntheticSpec spec;
  spec.motif_length = 2;
  EXPECT_THROW(spec.Validate(), ConfigError);
  spec = {};
  spec.sequence.imbalance_factor = 0.5;
  EXPECT_THROW(spec.Validate(), ConfigError);
  spec = {};
  spec.samples = 1;
  EXPECT_THROW(spec.Validate(), ConfigError);
}

TEST(CacheTest, RoundtripAndCorruption) {
  SyntheticSpec spec;
  spec.samples = 20;
  auto data = GenerateDataset(spec);
  const auto path = TempPath("mqfl_dataset_test.bin");
  SaveDataset(path, data, spec.Hash());
  uint64_t hash = 0;
  auto back = LoadDataset(path, &hash);
  EXPECT_EQ(hash, spec.Hash());
  ASSERT_EQ(back.size(), data.size());
  for (size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(back[i].sequence, data[i].sequence);
    EXPECT_EQ(back[i].sequence_label, data[i].sequence_label);
    EXPECT_EQ(back[i].image_label, data[i].image_label);
    for (size_t p = 0; p < data[i].image.size(); ++p) {
      EXPECT_EQ(back[i].image[p], static_cast<double>(static_cast<float>(data[i].image[p])));
    }
  }
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(40);
    f.put('\x7f');
  }
  EXPECT_THROW(LoadDataset(path), ParseError);
  std::filesystem::remove(path);
}

TEST(CacheTest, FeatureCsv) {
  const auto path = TempPath("mqfl_features.csv");
  {
    std::ofstream f(path);
    f << "f0,label,f1\n0.5,1,-2\n1e-3,0,4\n";
  }
  auto ex = LoadFeatureCsv(path);
  ASSERT_EQ(ex.size(), 2u);
  EXPECT_EQ(ex[0].labels[0], 1);
  EXPECT_EQ(ex[0].inputs[0].vec(), (std::vector<double>{0.5, -2}));
  EXPECT_EQ(ex[1].inputs[0].vec(), (std::vector<double>{1e-3, 4}));
  {
    std::ofstream f(path);
    f << "f0,f1\n1,2\n";
  }
  EXPECT_THROW(LoadFeatureCsv(path), InputError);
  {
    std::ofstream f(path);
    f << "label,f0\n1,abc\n";
  }
  EXPECT_THROW(LoadFeatureCsv(path), InputError);
  std::filesystem::remove(path);
}

TEST(SplitTest, SizesAndDeterminism) {
  std::vector<int> labels(1000);
  for (size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 7);
  auto a = StratifiedSplit(labels, {0.9, 0.1}, 1);
  EXPECT_EQ(a[0].size(), 900u);
  EXPECT_EQ(a[1].size(), 100u);
  EXPECT_EQ(StratifiedSplit(labels, {0.9, 0.1}, 1), a);
  EXPECT_NE(StratifiedSplit(labels, {0.9, 0.1}, 2), a);
  auto b = StratifiedSplit(labels, {0.8, 0.2}, 1);
  EXPECT_EQ(b[0].size(), 800u);
  EXPECT_THROW(StratifiedSplit(labels, {0.9, 0.2}, 1), ConfigError);
  EXPECT_THROW(StratifiedSplit(labels, {1.1, -0.1}, 1), ConfigError);
}

TEST(SplitTest, DisjointCoverAndStratified) {
  std::mt19937_64 g(4);
  for (int t = 0; t < 100; ++t) {
    const size_t n = 20 + g() % 500, classes = 2 + g() % 6;
    std::vector<int> labels(n);
    for (auto& l : labels) l = static_cast<int>(g() % classes);
    const std::vector<double> fr = {0.7, 0.2, 0.1};
    auto parts = StratifiedSplit(labels, fr, g());
    std::vector<size_t> all;
    for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    std::sort(all.begin(), all.end());
    ASSERT_EQ(all.size(), n);
    for (size_t i = 0; i < n; ++i) EXPECT_EQ(all[i], i);
    for (size_t c = 0; c < classes; ++c) {
      const double nc = std::count(labels.begin(), labels.end(), static_cast<int>(c));
      for (size_t s = 0; s < 3; ++s) {
        const double got = std::count_if(parts[s].begin(), parts[s].end(),
                                         [&](size_t i) { return labels[i] == static_cast<int>(c); });
        EXPECT_LE(std::fabs(got - nc * fr[s]), 1.0);
      }
    }
  }
}

TEST(MetricsTest, HandRocCases) {
  EXPECT_EQ(Auc(RocCurve({0.9, 0.8, 0.3}, {true, true, false})), 1.0);
  EXPECT_EQ(Auc(RocCurve({0.1, 0.4, 0.35, 0.8}, {false, false, true, true})), 0.75);
  EXPECT_EQ(Auc(RocCurve({0.5, 0.5}, {true, false})), 0.5);
  EXPECT_EQ(Auc(RocCurve({0.2, 0.9}, {true, false})), 0.0);
  auto c = RocCurve({0.9, 0.8, 0.3}, {true, true, false});
  ASSERT_EQ(c.size(), 4u);
  EXPECT_EQ(c[2].tpr, 1.0);
  EXPECT_EQ(c[2].fpr, 0.0);
  EXPECT_THROW(RocCurve({0.1, 0.2}, {true, true}), UndefinedResult);
}

TEST(MetricsTest, RandomScoresNearHalf) {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> s(10000);
  std::vector<bool> p(10000);
  for (size_t i = 0; i < s.size(); ++i) {
    s[i] = u(g);
    p[i] = i % 2;
  }
  EXPECT_NEAR(Auc(RocCurve(s, p)), 0.5, 0.05);
}

TEST(MetricsTest, MicroMacroDefinitions) {
  // Perfect separation.
  auto perfect = MicroMacroAuc({{0.8, 0.1, 0.1}, {0.2, 0.7, 0.1}, {0.1, 0.1, 0.8}}, {0, 1, 2});
  EXPECT_EQ(perfect.micro, 1.0);
  EXPECT_EQ(perfect.macro, 1.0);

  // Balanced classes scored identically: every sample puts a_i on its own
  // class and b_i on the other, with the same (a, b) list per class.
  const std::vector<std::pair<double, double>> ab = {{0.9, 0.1}, {0.4, 0.6}, {0.7, 0.3}, {0.2, 0.8},
                                                     {0.55, 0.45}, {0.65, 0.35}, {0.3, 0.7}, {0.8, 0.2}};
  std::vector<std::vector<double>> probs;
  std::vector<int> labels;
  for (int c = 0; c < 2; ++c) {
    for (auto [a, b] : ab) {
      probs.push_back(c == 0 ? std::vector<double>{a, b} : std::vector<double>{b, a});
      labels.push_back(c);
    }
  }
  auto r = MicroMacroAuc(probs, labels);
  EXPECT_EQ(r.micro, r.macro);
  EXPECT_EQ(r.per_class[0], r.per_class[1]);

  // Macro is the plain mean of per-class one-vs-rest AUCs; micro pools.
  std::mt19937_64 g(6);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::vector<double>> pr(60, std::vector<double>(3));
  std::vector<int> lb(60);
  for (size_t i = 0; i < 60; ++i) {
    for (auto& v : pr[i]) v = u(g);
    lb[i] = static_cast<int>(i % 3);
  }
  auto m = MicroMacroAuc(pr, lb);
  double mean = 0;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> s;
    std::vector<bool> p;
    for (size_t i = 0; i < 60; ++i) {
      s.push_back(pr[i][c]);
      p.push_back(lb[i] == c);
    }
    mean += Auc(RocCurve(s, p)) / 3;
  }
  EXPECT_NEAR(m.macro, mean, 1e-15);
  // Micro by Mann-Whitney pair counting.
  double wins = 0, pairs = 0;
  for (size_t i = 0; i < 60; ++i)
    for (size_t j = 0; j < 60; ++j)
      for (int cp = 0; cp < 3; ++cp)
        for (int cn = 0; cn < 3; ++cn) {
          if (lb[i] != cp || lb[j] == cn) continue;
          pairs += 1;
          wins += pr[i][cp] > pr[j][cn] ? 1.0 : pr[i][cp] == pr[j][cn] ? 0.5 : 0.0;
        }
  EXPECT_NEAR(m.micro, wins / pairs, 1e-12);
}

TEST(MetricsTest, ConfusionMatrix) {
  const std::vector<int> labels = {0, 0, 1, 1, 1, 2};
  const std::vector<int> preds = {0, 1, 1, 1, 2, 2};
  auto raw = ConfusionMatrix(preds, labels, 3, false);
  EXPECT_EQ(raw, (std::vector<std::vector<double>>{{1, 1, 0}, {0, 2, 1}, {0, 0, 1}}));
  double total = 0;
  for (const auto& row : raw)
    for (double v : row) total += v;
  EXPECT_EQ(total, 6.0);
  auto norm = ConfusionMatrix(preds, labels, 3, true);
  for (const auto& row : norm) EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-12);
  EXPECT_EQ(norm[1][1], 2.0 / 3);
  EXPECT_THROW(ConfusionMatrix({3}, {0}, 3, false), InputError);
}

}  // namespace
}  // namespace mqfl::data
