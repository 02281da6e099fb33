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

#include "blockkit/encoder.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "blockkit/errors.hpp"
#include "blockkit/tokenize.hpp"

namespace blockkit {

namespace {

constexpr double kNormEps = 1e-12;
constexpr char kCheckpointMagic[8] = {'B', 'K', 'C', 'K', 'P', 'T', '0', '1'};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

void l2_normalize(std::vector<double>& v, bool* was_zero) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  double norm = std::sqrt(sq);
  if (norm < kNormEps) {
    std::fill(v.begin(), v.end(), 0.0);
    if (was_zero) *was_zero = true;
    return;
  }
  for (double& x : v) x /= norm;
  if (was_zero) *was_zero = false;
}

void validate_config(const EncoderConfig& cfg) {
  if (cfg.dim < 1) throw ConfigError("encoder: dim must be >= 1");
  if (cfg.vocab_buckets < 1) throw ConfigError("encoder: vocab_buckets must be >= 1");
  if (cfg.max_pos < 1) throw ConfigError("encoder: max_pos must be >= 1");
  if (cfg.max_seq_len < 1) throw ConfigError("encoder: max_seq_len must be >= 1");
  if (cfg.dropout_p < 0.0 || cfg.dropout_p >= 1.0)
    throw ConfigError("encoder: dropout_p must be in [0, 1)");
}

}  // namespace

bool RecordVector::is_zero() const {
  for (double x : values)
    if (x != 0.0) return false;
  return true;
}

double dot(const RecordVector& a, const RecordVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
  return s;
}

std::uint64_t hash64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

EmbeddingModel init_model(const EncoderConfig& cfg) {
  validate_config(cfg);
  EmbeddingModel model;
  model.config = cfg;
  const std::size_t dim = static_cast<std::size_t>(cfg.dim);
  model.token_table.resize(static_cast<std::size_t>(cfg.vocab_buckets) * dim);
  model.attr_table.resize(static_cast<std::size_t>(cfg.vocab_buckets) * dim);
  model.pos_table.resize(static_cast<std::size_t>(cfg.max_pos) * dim);

  rng::Engine rng(cfg.seed);
  for (double& x : model.token_table) x = rng::uniform(rng, -0.05, 0.05);
  for (double& x : model.attr_table) x = rng::uniform(rng, -0.05, 0.05);
  for (double& x : model.pos_table) x = rng::uniform(rng, -0.05, 0.05);
  return model;
}

PreparedRecord prepare_record(const EncoderConfig& cfg, const TokenizedRecord& rec) {
  if (rec.tokens.size() > static_cast<std::size_t>(cfg.max_seq_len))
    throw std::invalid_argument("prepare_record: record exceeds max_seq_len");

  PreparedRecord out;
  out.attr_word_buckets.resize(rec.attr_names.size());
  for (std::size_t a = 0; a < rec.attr_names.size(); ++a) {
    for (const auto& w : word_tokens(rec.attr_names[a]))
      out.attr_word_buckets[a].push_back(
          static_cast<std::uint32_t>(hash64(w) % cfg.vocab_buckets));
  }
  out.tokens.reserve(rec.tokens.size());
  for (const auto& tok : rec.tokens) {
    PreparedToken pt;
    pt.token_bucket = static_cast<std::uint32_t>(hash64(tok.text) % cfg.vocab_buckets);
    pt.pos_row = std::min(tok.pos_id, cfg.max_pos - 1);
    pt.attr_index = tok.attr_index;
    out.tokens.push_back(pt);
  }
  return out;
}

RecordVector encode_prepared(const EmbeddingModel& model,
                             const PreparedRecord& rec, EncodeMode mode,
                             rng::Engine& rng, EncodeTrace* trace) {
  const int dim = model.config.dim;
  RecordVector out;
  out.values.assign(static_cast<std::size_t>(dim), 0.0);

  if (rec.tokens.empty()) {
    if (trace) {
      trace->pooled.assign(static_cast<std::size_t>(dim), 0.0);
      trace->norm = 0.0;
      trace->keep.clear();
      trace->zero = true;
    }
    return out;
  }

  const bool dropout = mode == EncodeMode::train && model.config.dropout_p > 0.0;
  const double p = model.config.dropout_p;
  const double scale = dropout ? 1.0 / (1.0 - p) : 1.0;
  if (trace) {
    // keep stays empty when dropout is off so backprop skips the rescale
    trace->keep.clear();
    if (dropout) trace->keep.assign(rec.tokens.size() * dim, 1);
  }

  std::vector<double> pooled(static_cast<std::size_t>(dim), 0.0);
  std::vector<double> token_vec(static_cast<std::size_t>(dim));
  for (std::size_t t = 0; t < rec.tokens.size(); ++t) {
    const PreparedToken& pt = rec.tokens[t];
    const double* tok = model.token_row(pt.token_bucket);
    const double* pos = model.pos_row(pt.pos_row);
    for (int d = 0; d < dim; ++d) token_vec[d] = tok[d] + pos[d];

    const auto& name_buckets = rec.attr_word_buckets[pt.attr_index];
    if (!name_buckets.empty()) {
      double inv = 1.0 / static_cast<double>(name_buckets.size());
      for (std::uint32_t b : name_buckets) {
        const double* attr = model.attr_row(b);
        for (int d = 0; d < dim; ++d) token_vec[d] += inv * attr[d];
      }
    }

    if (dropout) {
      for (int d = 0; d < dim; ++d) {
        if (rng::chance(rng, p)) {
          token_vec[d] = 0.0;
          if (trace) trace->keep[t * dim + d] = 0;
        } else {
          token_vec[d] *= scale;
        }
      }
    }
    for (int d = 0; d < dim; ++d) pooled[d] += token_vec[d];
  }

  double inv_n = 1.0 / static_cast<double>(rec.tokens.size());
  for (double& x : pooled) x *= inv_n;

  out.values = pooled;
  bool zero = false;
  l2_normalize(out.values, &zero);
  if (trace) {
    trace->pooled = std::move(pooled);
    double sq = 0.0;
    for (double x : trace->pooled) sq += x * x;
    trace->norm = std::sqrt(sq);
    trace->zero = zero;
  }
  return out;
}

RecordVector encode(const EmbeddingModel& model, const TokenizedRecord& rec,
                    EncodeMode mode, rng::Engine& rng) {
  return encode_prepared(model, prepare_record(model.config, rec), mode, rng);
}

RecordVector hashed_encode(const TokenizedRecord& rec, int dim) {
  if (dim < 1) throw ConfigError("hashed_encode: dim must be >= 1");
  RecordVector out;
  out.values.assign(static_cast<std::size_t>(dim), 0.0);
  for (const auto& tok : rec.tokens) {
    std::uint64_t h = hash64(tok.text);
    std::size_t bucket = static_cast<std::size_t>(h % static_cast<std::uint64_t>(dim));
    double sign = (splitmix64(h) & 1ull) ? 1.0 : -1.0;
    out.values[bucket] += sign;
  }
  l2_normalize(out.values, nullptr);
  return out;
}

std::unordered_map<std::string, RecordVector> load_external_vectors(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vector file: " + path);

  std::unordered_map<std::string, RecordVector> out;
  std::string line;
  std::size_t line_no = 0;
  int expected_dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string id;
    int dim = 0;
    if (!(ss >> id >> dim) || dim < 1)
      throw DataError("vector file " + path + ": malformed line " +
                      std::to_string(line_no));
    if (expected_dim == -1) expected_dim = dim;
    if (dim != expected_dim)
      throw DataError("vector file " + path + ": dimension mismatch at line " +
                      std::to_string(line_no));
    RecordVector vec;
    vec.values.resize(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) {
      if (!(ss >> vec.values[d]))
        throw DataError("vector file " + path + ": ragged row at line " +
                        std::to_string(line_no));
    }
    double extra;
    if (ss >> extra)
      throw DataError("vector file " + path + ": ragged row at line " +
                      std::to_string(line_no));
    if (out.count(id))
      throw DataError("vector file " + path + ": duplicate id '" + id + "'");
    l2_normalize(vec.values, nullptr);
    out.emplace(std::move(id), std::move(vec));
  }
  return out;
}

std::vector<RecordVector> vectors_for_collection(
    const std::unordered_map<std::string, RecordVector>& vecs,
    const Collection& coll) {
  if (vecs.size() != coll.records.size())
    throw DataError("external vectors: " + std::to_string(vecs.size()) +
                    " vectors for " + std::to_string(coll.records.size()) +
                    " records");
  std::vector<RecordVector> out;
  out.reserve(coll.records.size());
  for (const auto& rec : coll.records) {
    auto it = vecs.find(rec.id);
    if (it == vecs.end())
      throw DataError("external vectors: no vector for record id '" + rec.id + "'");
    out.push_back(it->second);
  }
  return out;
}

namespace {

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

void save_model(const EmbeddingModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_pod(out, static_cast<std::int32_t>(model.config.dim));
  write_pod(out, model.config.vocab_buckets);
  write_pod(out, static_cast<std::int32_t>(model.config.max_pos));
  write_pod(out, static_cast<std::int32_t>(model.config.max_seq_len));
  write_pod(out, model.config.dropout_p);
  write_pod(out, model.config.seed);
  auto write_table = [&](const std::vector<double>& t) {
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
  };
  write_table(model.token_table);
  write_table(model.attr_table);
  write_table(model.pos_table);
  if (!out) throw DataError("short write on checkpoint: " + path);
}

EmbeddingModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw DataError("not a model checkpoint: " + path);

  EmbeddingModel model;
  std::int32_t dim = 0, max_pos = 0, max_seq_len = 0;
  read_pod(in, dim);
  read_pod(in, model.config.vocab_buckets);
  read_pod(in, max_pos);
  read_pod(in, max_seq_len);
  read_pod(in, model.config.dropout_p);
  read_pod(in, model.config.seed);
  model.config.dim = dim;
  model.config.max_pos = max_pos;
  model.config.max_seq_len = max_seq_len;
  if (!in) throw DataError("truncated checkpoint: " + path);
  validate_config(model.config);

  auto read_table = [&](std::vector<double>& t, std::size_t n) {
    t.resize(n);
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
  };
  const std::size_t d = static_cast<std::size_t>(model.config.dim);
  read_table(model.token_table, static_cast<std::size_t>(model.config.vocab_buckets) * d);
  read_table(model.attr_table, static_cast<std::size_t>(model.config.vocab_buckets) * d);
  read_table(model.pos_table, static_cast<std::size_t>(model.config.max_pos) * d);
  if (!in) throw DataError("truncated checkpoint: " + path);
  char extra;
  if (in.read(&extra, 1); in.gcount() != 0)
    throw DataError("trailing bytes in checkpoint: " + path);
  return model;
}

}  // namespace blockkit
