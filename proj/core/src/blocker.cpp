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

#include "blockkit/blocker.hpp"

#include <algorithm>
#include <iostream>
#include <stdexcept>
#include <unordered_set>

#include "blockkit/errors.hpp"

namespace blockkit {

namespace {

constexpr std::size_t kQueryChunk = 256;

std::string pair_key(const CandidatePair& p) {
  std::string key;
  key.reserve(p.left.size() + p.right.size() + 1);
  key += p.left;
  key.push_back('\x1f');
  key += p.right;
  return key;
}

struct BlockingInput {
  BlockingMode mode;
  Collection merged;  // owns records when merging happened
  const Collection* source = nullptr;
  const Collection* target = nullptr;
};

BlockingInput resolve_collections(const std::vector<Collection>& colls) {
  if (colls.empty()) throw DataError("blocker: no collections given");
  for (const auto& c : colls)
    if (c.records.empty())
      throw DataError("blocker: collection '" + c.source_tag + "' is empty");

  BlockingInput in{BlockingMode::single_collection, {}, nullptr, nullptr};
  if (colls.size() == 1) {
    in.source = in.target = &colls[0];
  } else if (colls.size() == 2) {
    in.mode = BlockingMode::two_collection;
    in.source = &colls.front();
    in.target = &colls.back();
  } else {
    in.merged = merge_collections(colls);
    in.source = in.target = &in.merged;
  }
  return in;
}

int clamp_k(int k, const BlockingInput& in) {
  if (k < 1) throw ConfigError("blocker: k must be >= 1");
  std::size_t target_size = in.target->records.size();
  std::size_t cap = in.mode == BlockingMode::single_collection
                        ? target_size - 1
                        : target_size;
  if (cap == 0) throw DataError("blocker: target too small for any neighbor");
  if (static_cast<std::size_t>(k) > cap) {
    std::cerr << "[blockkit] warning: k=" << k << " exceeds target capacity "
              << cap << ", clamping\n";
    return static_cast<int>(cap);
  }
  return k;
}

// Rank-major assembly: candidate set for rank i holds (source_j, neighbor i
// of j) for every source j, minus pairs seen at earlier ranks.
RankedCandidates assemble(const BlockingInput& in,
                          const std::vector<std::string>& source_ids,
                          const std::vector<std::vector<std::string>>& neighbor_ids,
                          int k) {
  RankedCandidates out;
  out.mode = in.mode;
  out.ranks.resize(static_cast<std::size_t>(k));
  std::unordered_set<std::string> seen;

  for (int rank = 0; rank < k; ++rank) {
    auto& bucket = out.ranks[static_cast<std::size_t>(rank)];
    for (std::size_t j = 0; j < source_ids.size(); ++j) {
      if (static_cast<std::size_t>(rank) >= neighbor_ids[j].size()) continue;
      CandidatePair pair{source_ids[j], neighbor_ids[j][rank]};
      if (in.mode == BlockingMode::single_collection) {
        if (pair.left == pair.right) continue;
        if (pair.right < pair.left) std::swap(pair.left, pair.right);
      }
      if (seen.insert(pair_key(pair)).second) bucket.push_back(std::move(pair));
    }
  }
  return out;
}

RankedCandidates block_with_searcher(
    const BlockingInput& in, int k,
    const std::function<std::vector<std::vector<Neighbor>>(const Collection&,
                                                           int)>& search) {
  const bool self_mode = in.source == in.target;
  // Self mode searches one extra neighbor so the self-match can be dropped.
  std::size_t target_size = in.target->records.size();
  int search_k = self_mode ? std::min<int>(k + 1, static_cast<int>(target_size)) : k;

  std::vector<std::vector<Neighbor>> hits = search(*in.source, search_k);

  std::vector<std::string> source_ids;
  source_ids.reserve(in.source->records.size());
  for (const auto& rec : in.source->records) source_ids.push_back(rec.id);

  std::vector<std::vector<std::string>> neighbor_ids(hits.size());
  for (std::size_t j = 0; j < hits.size(); ++j) {
    auto& ids = neighbor_ids[j];
    ids.reserve(hits[j].size());
    for (const Neighbor& n : hits[j]) {
      if (self_mode && n.id == source_ids[j]) continue;
      ids.push_back(n.id);
    }
    if (ids.size() > static_cast<std::size_t>(k)) ids.resize(static_cast<std::size_t>(k));
  }
  return assemble(in, source_ids, neighbor_ids, k);
}

}  // namespace

std::size_t RankedCandidates::total_pairs() const {
  std::size_t n = 0;
  for (const auto& r : ranks) n += r.size();
  return n;
}

std::vector<std::vector<Neighbor>> exact_knn(
    const KnnIndex& index, const std::vector<RecordVector>& queries, int k) {
  if (k < 1) throw std::invalid_argument("exact_knn: k must be >= 1");
  if (static_cast<std::size_t>(k) > index.vectors.size())
    throw std::invalid_argument("exact_knn: k exceeds index size");
  if (index.vectors.size() != index.ids.size())
    throw std::invalid_argument("exact_knn: ids misaligned with vectors");

  const std::size_t n = index.vectors.size();
  std::vector<std::vector<Neighbor>> results(queries.size());

  struct Hit {
    double score;
    std::uint32_t row;
  };
  auto better = [&](const Hit& a, const Hit& b) {
    if (a.score != b.score) return a.score > b.score;
    return index.ids[a.row] < index.ids[b.row];
  };

  for (std::size_t chunk = 0; chunk < queries.size(); chunk += kQueryChunk) {
    std::size_t end = std::min(queries.size(), chunk + kQueryChunk);
    for (std::size_t qi = chunk; qi < end; ++qi) {
      std::vector<Hit> hits;
      hits.reserve(n);
      for (std::size_t row = 0; row < n; ++row)
        hits.push_back({dot(queries[qi], index.vectors[row]),
                        static_cast<std::uint32_t>(row)});
      std::partial_sort(hits.begin(), hits.begin() + k, hits.end(), better);
      hits.resize(static_cast<std::size_t>(k));
      auto& out = results[qi];
      out.reserve(hits.size());
      for (const Hit& h : hits) out.push_back({index.ids[h.row], h.score});
    }
  }
  return results;
}

Vectorizer make_model_vectorizer(const EmbeddingModel& model) {
  return [&model](const Collection& coll) {
    std::vector<RecordVector> out;
    out.reserve(coll.records.size());
    rng::Engine unused(0);
    for (const auto& rec : coll.records)
      out.push_back(encode(model, serialize_record(rec, model.config.max_seq_len),
                           EncodeMode::eval, unused));
    return out;
  };
}

Vectorizer make_hashed_vectorizer(int dim, int max_seq_len) {
  return [dim, max_seq_len](const Collection& coll) {
    std::vector<RecordVector> out;
    out.reserve(coll.records.size());
    for (const auto& rec : coll.records)
      out.push_back(hashed_encode(serialize_record(rec, max_seq_len), dim));
    return out;
  };
}

Vectorizer make_external_vectorizer(
    std::unordered_map<std::string, RecordVector> vectors) {
  return [vecs = std::move(vectors)](const Collection& coll) {
    return vectors_for_collection(vecs, coll);
  };
}

RankedCandidates nn_block(const std::vector<Collection>& colls,
                          const Vectorizer& vectorizer, int k) {
  BlockingInput in = resolve_collections(colls);
  k = clamp_k(k, in);

  KnnIndex index;
  index.vectors = vectorizer(*in.target);
  for (const auto& rec : in.target->records) index.ids.push_back(rec.id);
  const bool self_mode = in.source == in.target;

  std::vector<RecordVector> source_vecs =
      self_mode ? index.vectors : vectorizer(*in.source);

  return block_with_searcher(
      in, k, [&](const Collection&, int search_k) {
        return exact_knn(index, source_vecs, search_k);
      });
}

RankedCandidates bm25_block(const std::vector<Collection>& colls,
                            const TokenizerScheme& scheme,
                            const BM25Params& params, int k) {
  BlockingInput in = resolve_collections(colls);
  k = clamp_k(k, in);

  InvertedIndex index = build_inverted_index(*in.target, scheme);
  return block_with_searcher(in, k, [&](const Collection& source, int search_k) {
    std::vector<std::vector<Neighbor>> hits(source.records.size());
    for (std::size_t chunk = 0; chunk < source.records.size(); chunk += kQueryChunk) {
      std::size_t end = std::min(source.records.size(), chunk + kQueryChunk);
      for (std::size_t j = chunk; j < end; ++j) {
        auto scored = bm25_topk(index, source.records[j], search_k, params);
        auto& out = hits[j];
        out.reserve(scored.size());
        for (const ScoredDoc& s : scored) out.push_back({index.ids[s.doc], s.score});
      }
    }
    return hits;
  });
}

RankedCandidates ensemble(const RankedCandidates& r1, const RankedCandidates& r2) {
  if (r1.mode != r2.mode)
    throw DataError("ensemble: blocking mode mismatch between inputs");

  RankedCandidates out;
  out.mode = r1.mode;
  std::size_t depth = std::max(r1.ranks.size(), r2.ranks.size());
  out.ranks.resize(depth);
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < depth; ++i) {
    auto& bucket = out.ranks[i];
    auto take = [&](const RankedCandidates& r) {
      if (i >= r.ranks.size()) return;
      for (const CandidatePair& p : r.ranks[i])
        if (seen.insert(pair_key(p)).second) bucket.push_back(p);
    };
    take(r1);
    take(r2);
  }
  return out;
}

}  // namespace blockkit
