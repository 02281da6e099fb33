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
#include <string_view>
#include <unordered_map>
#include <vector>

#include "blockkit/records.hpp"
#include "blockkit/rng.hpp"

namespace blockkit {

struct EncoderConfig {
  int dim = 64;
  std::uint32_t vocab_buckets = 65536;  // hash buckets for value/name tokens
  int max_pos = 64;                     // per-attribute position rows
  int max_seq_len = 256;
  double dropout_p = 0.15;
  std::uint64_t seed = 0;
};

// Three embedding tables, row-major. A record vector is the L2-normalized
// mean over tokens of token + mean(attribute-name word) + position rows.
struct EmbeddingModel {
  EncoderConfig config;
  std::vector<double> token_table;  // vocab_buckets x dim
  std::vector<double> attr_table;   // vocab_buckets x dim
  std::vector<double> pos_table;    // max_pos x dim

  const double* token_row(std::uint32_t bucket) const {
    return token_table.data() + static_cast<std::size_t>(bucket) * config.dim;
  }
  const double* attr_row(std::uint32_t bucket) const {
    return attr_table.data() + static_cast<std::size_t>(bucket) * config.dim;
  }
  const double* pos_row(int pos) const {
    return pos_table.data() + static_cast<std::size_t>(pos) * config.dim;
  }
};

struct RecordVector {
  std::vector<double> values;  // unit norm, or all-zero for empty records
  bool is_zero() const;
};

double dot(const RecordVector& a, const RecordVector& b);

enum class EncodeMode { train, eval };

/// FNV-1a 64-bit, the stable token hash behind all bucket assignment.
std::uint64_t hash64(std::string_view s);

/// Tables filled i.i.d. uniform in [-0.05, 0.05] from cfg.seed.
EmbeddingModel init_model(const EncoderConfig& cfg);

// Hash-bucket view of a tokenized record, computed once so repeated encodes
// (training re-encodes every view per step) skip string hashing.
struct PreparedToken {
  std::uint32_t token_bucket;
  int pos_row;
  int attr_index;
};
struct PreparedRecord {
  std::vector<PreparedToken> tokens;
  // Per attr_index: buckets of the attribute name's word tokens.
  std::vector<std::vector<std::uint32_t>> attr_word_buckets;
};
PreparedRecord prepare_record(const EncoderConfig& cfg, const TokenizedRecord& rec);

// Captured forward state for backpropagation.
struct EncodeTrace {
  std::vector<double> pooled;     // pre-normalization mean over tokens
  double norm = 0.0;              // L2 norm of pooled
  std::vector<std::uint8_t> keep; // per token x dim dropout mask (train only)
  bool zero = false;              // empty-record sentinel hit
};

/// Encode a prepared record. In train mode each coordinate of each token
/// vector is dropped with probability dropout_p and survivors are scaled by
/// 1/(1-p); eval mode is deterministic and ignores the RNG.
RecordVector encode_prepared(const EmbeddingModel& model,
                             const PreparedRecord& rec, EncodeMode mode,
                             rng::Engine& rng, EncodeTrace* trace = nullptr);

/// serialize_record output -> unit vector (zero sentinel for empty records).
RecordVector encode(const EmbeddingModel& model, const TokenizedRecord& rec,
                    EncodeMode mode, rng::Engine& rng);

/// Deterministic untrained baseline: feature-hash word tokens into dim
/// buckets with +/-1 signs, then L2-normalize.
RecordVector hashed_encode(const TokenizedRecord& rec, int dim);

/// Read "id dim v1 .. vdim" lines; every vector is L2-normalized on load.
/// Raises DataError on ragged dimensions or malformed rows.
std::unordered_map<std::string, RecordVector> load_external_vectors(
    const std::string& path);

/// Align a loaded vector map with a collection: every record needs a vector
/// and every vector a record, else DataError.
std::vector<RecordVector> vectors_for_collection(
    const std::unordered_map<std::string, RecordVector>& vecs,
    const Collection& coll);

// Versioned binary checkpoint holding config + tables, exact to the bit.
void save_model(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_model(const std::string& path);

}  // namespace blockkit
