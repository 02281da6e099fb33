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

#include <string>
#include <vector>

#include "blockkit/blocker.hpp"
#include "blockkit/conditioning.hpp"
#include "blockkit/eval.hpp"
#include "blockkit/paraphrase.hpp"
#include "blockkit/records.hpp"
#include "blockkit/sparse.hpp"

namespace blockkit {

// File formats, all deterministic byte-for-byte given the same inputs:
//   tables      UTF-8 CSV with a header row; empty cell = null
//   records     JSONL, {"id": "...", "attrs": {"name": "value" | null}}
//               with attribute order preserved
//   gold        CSV "left_id,right_id" with header
//   candidates  CSV "rank,left_id,right_id" with header, ranks ascending
//               and 1-based, preceded by a "#mode=..." comment line
//   vectors     text, one "id dim v1 .. vdim" line per record
//   loss curve  CSV "step,loss" with header
//   report      JSON document; per-k table also available as CSV

std::vector<Column> read_table_csv(const std::string& path);

Collection read_records_jsonl(const std::string& path,
                              const std::string& source_tag);
void write_records_jsonl(const Collection& coll, const std::string& path);

GoldMatches read_gold_csv(const std::string& path);
void write_gold_csv(const GoldMatches& gold, const std::string& path);

void write_candidates_csv(const RankedCandidates& ranked, const std::string& path);
RankedCandidates read_candidates_csv(const std::string& path);

void write_vectors(const std::vector<std::string>& ids,
                   const std::vector<RecordVector>& vecs,
                   const std::string& path);

void write_loss_csv(const std::vector<double>& losses, const std::string& path);

void write_report_json(const EvalReport& report, const std::string& path);
EvalReport read_report_json(const std::string& path);
void write_report_csv(const EvalReport& report, const std::string& path);

/// Overlay "keyboard"/"ocr" maps from a JSON object of code point ->
/// replacement-string arrays, e.g. {"a": ["q", "s"]}.
void load_confusion_map_json(const std::string& path, bool ocr,
                             ParaphraseConfig& cfg);
/// Dictionary file: either a JSON array of words or an object
/// {"words": [...], "weights": [...]}.
void load_token_dictionary_json(const std::string& path, ParaphraseConfig& cfg);

// Every tunable in one JSON document; unknown keys are rejected.
struct PipelineConfig {
  double gamma = 80.0;
  double margin = 0.4;
  double dropout_p = 0.15;
  double paraphrase_prob = 0.01;
  double dup_threshold = 0.85;
  int batch_size = 128;
  int steps = 500;  // desk-scale default
  double learning_rate = 0.05;
  int dim = 64;
  std::uint32_t vocab_buckets = 65536;
  int max_seq_len = 256;
  int q = 3;
  BM25Params bm25;
  int k_budget = 100;
  double pc_threshold = 0.9;
  std::uint64_t seed = 0;
};

PipelineConfig load_pipeline_config(const std::string& path);
void validate_pipeline_config(const PipelineConfig& cfg);

}  // namespace blockkit
