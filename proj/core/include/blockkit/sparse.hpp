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

#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "blockkit/records.hpp"
#include "blockkit/tokenize.hpp"

namespace blockkit {

struct Posting {
  std::uint32_t doc;  // record index within the indexed collection
  std::uint32_t tf;   // term frequency
};

struct InvertedIndex {
  std::unordered_map<std::string, std::vector<Posting>> postings;
  std::vector<std::uint32_t> doc_lengths;  // token count per record
  std::vector<std::string> ids;            // record ids aligned to doc index
  double avgdl = 0.0;
  std::size_t n_docs = 0;
  TokenizerScheme scheme;
};

struct BM25Params {
  double k1 = 1.2;
  double b = 0.75;
};

/// Index each record's concatenated non-null values. Postings are sorted by
/// record index.
InvertedIndex build_inverted_index(const Collection& coll,
                                   const TokenizerScheme& scheme);

struct ScoredDoc {
  std::uint32_t doc;
  double score;
};

/// Okapi BM25 with idf(t) = ln(1 + (N - n_t + 0.5) / (n_t + 0.5)), summed
/// over the distinct query terms. Results descend by score with ties broken
/// by ascending record index; zero-score records are omitted, so fewer than
/// k hits may come back.
std::vector<ScoredDoc> bm25_topk(const InvertedIndex& index,
                                 const Record& query, int k,
                                 const BM25Params& params);

}  // namespace blockkit
