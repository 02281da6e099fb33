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

#include "blockkit/records.hpp"

#include <stdexcept>
#include <unordered_set>

#include "blockkit/errors.hpp"
#include "blockkit/tokenize.hpp"

namespace blockkit {

bool is_null_value(const std::optional<std::string>& v) {
  return !v.has_value() || v->empty();
}

std::string record_text(const Record& rec) {
  std::string out;
  for (const auto& attr : rec.attrs) {
    if (is_null_value(attr.value)) continue;
    if (!out.empty()) out.push_back(' ');
    out += *attr.value;
  }
  return out;
}

TokenizedRecord serialize_record(const Record& rec, int max_seq_len) {
  if (max_seq_len < 1)
    throw std::invalid_argument("serialize_record: max_seq_len must be >= 1");

  TokenizedRecord out;
  out.attr_names.reserve(rec.attrs.size());
  for (const auto& attr : rec.attrs) out.attr_names.push_back(attr.name);

  const std::size_t cap = static_cast<std::size_t>(max_seq_len);
  for (std::size_t a = 0; a < rec.attrs.size() && out.tokens.size() < cap; ++a) {
    if (is_null_value(rec.attrs[a].value)) continue;
    int pos = 0;
    for (auto& tok : word_tokens(*rec.attrs[a].value)) {
      if (out.tokens.size() >= cap) break;
      out.tokens.push_back({std::move(tok), static_cast<int>(a), pos++});
    }
  }
  return out;
}

Collection merge_collections(const std::vector<Collection>& colls) {
  if (colls.empty())
    throw std::invalid_argument("merge_collections: empty input list");

  Collection merged;
  std::size_t total = 0;
  for (const auto& c : colls) total += c.records.size();
  merged.records.reserve(total);

  std::unordered_set<std::string> seen;
  for (const auto& coll : colls) {
    if (!merged.source_tag.empty()) merged.source_tag.push_back('+');
    merged.source_tag += coll.source_tag;
    for (const auto& rec : coll.records) {
      std::string id = coll.source_tag + ":" + rec.id;
      if (!seen.insert(id).second)
        throw DataError("merge_collections: duplicate record id '" + id + "'");
      Record copy = rec;
      copy.id = std::move(id);
      merged.records.push_back(std::move(copy));
    }
  }
  return merged;
}

}  // namespace blockkit
