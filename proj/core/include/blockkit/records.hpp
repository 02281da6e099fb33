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

#include <optional>
#include <string>
#include <vector>

namespace blockkit {

struct AttributeValue {
  std::string name;
  std::optional<std::string> value;  // nullopt = missing
  bool operator==(const AttributeValue&) const = default;
};

struct Record {
  std::string id;  // unique within its collection
  std::vector<AttributeValue> attrs;  // order preserved as ingested
};

struct Collection {
  std::vector<Record> records;
  std::string source_tag;
};

/// Empty strings are treated the same as missing values.
bool is_null_value(const std::optional<std::string>& v);

/// Concatenation of all non-null attribute values, joined by single spaces.
std::string record_text(const Record& rec);

struct TokenPos {
  std::string text;
  int attr_index;  // index into TokenizedRecord::attr_names, non-decreasing
  int pos_id;      // 0-based, restarts at each attribute value
};

struct TokenizedRecord {
  std::vector<TokenPos> tokens;
  std::vector<std::string> attr_names;  // all attribute names of the record
};

/// Word-tokenize each non-null value in attribute order, carrying the
/// attribute index and a per-attribute position id that restarts at 0 for
/// every value. Keeps at most max_seq_len tokens, dropping the tail.
TokenizedRecord serialize_record(const Record& rec, int max_seq_len);

/// Concatenate collections into one. Record ids are rewritten to
/// "<source_tag>:<id>" so they stay unique; a repeated (source_tag, id)
/// combination raises DataError. The merged source_tag joins the input tags
/// with '+'.
Collection merge_collections(const std::vector<Collection>& colls);

}  // namespace blockkit
