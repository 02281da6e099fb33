// Copyright 2026 The Blockkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "blockkit/blocker.hpp"
#include "blockkit/encoder.hpp"
#include "blockkit/similarity.hpp"
#include "blockkit/sparse.hpp"
#include "blockkit/synth.hpp"
#include "blockkit/tokenize.hpp"
#include "blockkit/training.hpp"

namespace {

using namespace blockkit;

const Collection& corpus() {
  static SynthResult data = [] {
    SynthConfig cfg;
    cfg.entities = 200;
    cfg.copies = 2;
    cfg.seed = 1;
    return synth_corpus(cfg);
  }();
  return data.corpus;
}

void BM_WordTokenize(benchmark::State& state) {
  std::string text = record_text(corpus().records[0]);
  for (auto _ : state) {
    auto toks = word_tokens(text);
    benchmark::DoNotOptimize(toks);
  }
}
BENCHMARK(BM_WordTokenize);

void BM_QgramTokenize(benchmark::State& state) {
  std::string text = record_text(corpus().records[0]);
  TokenizerScheme scheme{TokenizerKind::qgram, 3};
  for (auto _ : state) {
    auto toks = tokenize(text, scheme);
    benchmark::DoNotOptimize(toks);
  }
}
BENCHMARK(BM_QgramTokenize);

void BM_Bm25Build(benchmark::State& state) {
  TokenizerScheme scheme{TokenizerKind::qgram, 3};
  for (auto _ : state) {
    InvertedIndex index = build_inverted_index(corpus(), scheme);
    benchmark::DoNotOptimize(index);
  }
}
BENCHMARK(BM_Bm25Build);

void BM_Bm25Query(benchmark::State& state) {
  TokenizerScheme scheme{TokenizerKind::qgram, 3};
  InvertedIndex index = build_inverted_index(corpus(), scheme);
  BM25Params params;
  std::size_t q = 0;
  for (auto _ : state) {
    auto hits = bm25_topk(index, corpus().records[q], 10, params);
    benchmark::DoNotOptimize(hits);
    q = (q + 1) % corpus().records.size();
  }
}
BENCHMARK(BM_Bm25Query);

void BM_HashedEncode(benchmark::State& state) {
  TokenizedRecord tok = serialize_record(corpus().records[0], 256);
  for (auto _ : state) {
    RecordVector v = hashed_encode(tok, 64);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_HashedEncode);

void BM_ModelEncode(benchmark::State& state) {
  EncoderConfig cfg;
  EmbeddingModel model = init_model(cfg);
  TokenizedRecord tok = serialize_record(corpus().records[0], cfg.max_seq_len);
  PreparedRecord prep = prepare_record(cfg, tok);
  rng::Engine rng(1);
  for (auto _ : state) {
    RecordVector v = encode_prepared(model, prep, EncodeMode::eval, rng);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_ModelEncode);

void BM_ExactKnn(benchmark::State& state) {
  EncoderConfig cfg;
  cfg.dim = 64;
  KnnIndex index;
  rng::Engine g(2);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> v(64);
    for (double& x : v) x = rng::uniform(g, -1.0, 1.0);
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    index.vectors.push_back({std::move(v)});
    index.ids.push_back(std::to_string(i));
  }
  std::vector<RecordVector> queries(index.vectors.begin(), index.vectors.begin() + 16);
  for (auto _ : state) {
    auto hits = exact_knn(index, queries, 10);
    benchmark::DoNotOptimize(hits);
  }
}
BENCHMARK(BM_ExactKnn);

void BM_CircleLoss(benchmark::State& state) {
  const std::size_t n = 128;
  rng::Engine g(3);
  std::vector<double> sims(n * n);
  for (double& s : sims) s = rng::uniform(g, -1.0, 1.0);
  std::vector<std::uint8_t> mask(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) mask[i * n + i] = 1;
  LossConfig cfg;
  for (auto _ : state) {
    CircleLossResult res = circle_loss_from_sims(sims, mask, n, cfg);
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(BM_CircleLoss);

void BM_StringSimilarities(benchmark::State& state) {
  std::string a = record_text(corpus().records[0]);
  std::string b = record_text(corpus().records[1]);
  for (auto _ : state) {
    SimilarityVector s = string_similarities(a, b);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_StringSimilarities);

void BM_DetectDuplicates(benchmark::State& state) {
  std::vector<Record> batch(corpus().records.begin(), corpus().records.begin() + 64);
  DupConfig cfg;
  for (auto _ : state) {
    auto dups = detect_duplicates(batch, cfg);
    benchmark::DoNotOptimize(dups);
  }
}
BENCHMARK(BM_DetectDuplicates);

}  // namespace

BENCHMARK_MAIN();
