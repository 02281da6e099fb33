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

#include "blockkit/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "blockkit/errors.hpp"

namespace blockkit {

InvertedIndex build_inverted_index(const Collection& coll,
                                   const TokenizerScheme& scheme) {
  if (coll.records.empty())
    throw DataError("build_inverted_index: empty collection");

  InvertedIndex index;
  index.scheme = scheme;
  index.n_docs = coll.records.size();
  index.doc_lengths.resize(coll.records.size());
  index.ids.reserve(coll.records.size());

  for (std::size_t i = 0; i < coll.records.size(); ++i) {
    index.ids.push_back(coll.records[i].id);
    auto tokens = tokenize(record_text(coll.records[i]), scheme);
    index.doc_lengths[i] = static_cast<std::uint32_t>(tokens.size());

    std::unordered_map<std::string, std::uint32_t> tf;
    for (auto& t : tokens) ++tf[t];
    for (auto& [tok, count] : tf)
      index.postings[tok].push_back({static_cast<std::uint32_t>(i), count});
  }
  // Docs are visited in index order, so postings come out sorted already;
  // sort anyway to pin the invariant.
  for (auto& [tok, list] : index.postings)
    std::sort(list.begin(), list.end(),
              [](const Posting& a, const Posting& b) { return a.doc < b.doc; });

  double total = 0.0;
  for (auto len : index.doc_lengths) total += static_cast<double>(len);
  index.avgdl = total / static_cast<double>(index.n_docs);
  return index;
}

std::vector<ScoredDoc> bm25_topk(const InvertedIndex& index,
                                 const Record& query, int k,
                                 const BM25Params& params) {
  if (k < 1) throw std::invalid_argument("bm25_topk: k must be >= 1");
  if (params.k1 <= 0.0) throw ConfigError("bm25: k1 must be positive");
  if (params.b < 0.0 || params.b > 1.0) throw ConfigError("bm25: b must be in [0,1]");

  auto tokens = tokenize(record_text(query), index.scheme);
  std::unordered_set<std::string> terms(tokens.begin(), tokens.end());

  const double n_docs = static_cast<double>(index.n_docs);
  std::unordered_map<std::uint32_t, double> scores;
  for (const auto& term : terms) {
    auto it = index.postings.find(term);
    if (it == index.postings.end()) continue;
    const auto& postings = it->second;
    double n_t = static_cast<double>(postings.size());
    double idf = std::log(1.0 + (n_docs - n_t + 0.5) / (n_t + 0.5));
    for (const Posting& p : postings) {
      double tf = static_cast<double>(p.tf);
      double dl = static_cast<double>(index.doc_lengths[p.doc]);
      double norm = index.avgdl > 0.0 ? dl / index.avgdl : 0.0;
      double denom = tf + params.k1 * (1.0 - params.b + params.b * norm);
      scores[p.doc] += idf * tf * (params.k1 + 1.0) / denom;
    }
  }

  std::vector<ScoredDoc> ranked;
  ranked.reserve(scores.size());
  for (auto& [doc, score] : scores)
    if (score > 0.0) ranked.push_back({doc, score});
  std::sort(ranked.begin(), ranked.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc < b.doc;
  });
  if (ranked.size() > static_cast<std::size_t>(k)) ranked.resize(static_cast<std::size_t>(k));
  return ranked;
}

}  // namespace blockkit
