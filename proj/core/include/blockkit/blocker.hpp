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

#include <functional>
#include <string>
#include <vector>

#include "blockkit/encoder.hpp"
#include "blockkit/records.hpp"
#include "blockkit/sparse.hpp"

namespace blockkit {

enum class BlockingMode { two_collection, single_collection };

struct CandidatePair {
  std::string left;   // source id (or the smaller id in single mode)
  std::string right;  // target id
  bool operator==(const CandidatePair&) const = default;
};

// Candidate pair sets per nearest-neighbor rank. A pair appears in exactly
// one rank (first appearance wins); within a rank, pairs keep the
// deterministic source order they were produced in. Single-collection pairs
// are stored smaller-id-first and never pair a record with itself.
struct RankedCandidates {
  BlockingMode mode = BlockingMode::single_collection;
  std::vector<std::vector<CandidatePair>> ranks;
  std::size_t total_pairs() const;
};

struct KnnIndex {
  std::vector<RecordVector> vectors;
  std::vector<std::string> ids;  // aligned to vectors
};

struct Neighbor {
  std::string id;
  double score;
};

/// Exhaustive inner-product top-k per query (cosine, the vectors being unit
/// norm). Descending score; ties by ascending id. Queries are processed in
/// fixed-size chunks. Requires 1 <= k <= index size.
std::vector<std::vector<Neighbor>> exact_knn(
    const KnnIndex& index, const std::vector<RecordVector>& queries, int k);

using Vectorizer = std::function<std::vector<RecordVector>(const Collection&)>;

Vectorizer make_model_vectorizer(const EmbeddingModel& model);
Vectorizer make_hashed_vectorizer(int dim, int max_seq_len);
Vectorizer make_external_vectorizer(
    std::unordered_map<std::string, RecordVector> vectors);

/// The nearest neighbor blocker. More than two collections are merged into
/// one (single_collection mode); exactly two use the first as source and the
/// last as target (two_collection mode); one collection queries itself with
/// self-matches dropped. k larger than the target allows is clamped with a
/// warning on stderr.
RankedCandidates nn_block(const std::vector<Collection>& colls,
                          const Vectorizer& vectorizer, int k);

/// Same blocker semantics over a BM25 inverted index instead of dense kNN.
RankedCandidates bm25_block(const std::vector<Collection>& colls,
                            const TokenizerScheme& scheme,
                            const BM25Params& params, int k);

/// Per-rank union of two candidate lists with first-appearance dedup across
/// ranks. Inputs must share a mode.
RankedCandidates ensemble(const RankedCandidates& r1, const RankedCandidates& r2);

}  // namespace blockkit
