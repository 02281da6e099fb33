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

#include "blockkit/records.hpp"

namespace blockkit {

struct Column {
  std::string name;
  std::vector<std::optional<std::string>> values;  // one per table row
};

enum class ColumnType { identifier, numeric, url, date, category, entity, text };

enum class FilterReason { ok, statistics_table, log_table, non_english };

struct FilterVerdict {
  bool keep = false;
  FilterReason reason = FilterReason::ok;
};

const char* to_string(ColumnType t);
const char* to_string(FilterReason r);

/// Classify a column by the first matching rule, nulls excluded from every
/// test:
///   1. all non-null values distinct            -> identifier
///   2. all parse as decimal float or boolean   -> numeric
///   3. all are http/https/ftp URLs             -> url
///   4. all parse as a known date/time pattern  -> date
///   5. word-token count variance is zero       -> category
///   6. mean word-token count < 10              -> entity
///   7. otherwise                               -> text
/// A column with no non-null values classifies as entity.
ColumnType detect_column_type(const Column& col);

/// Reject statistics tables (more than half of the columns numeric, url or
/// date), log tables (first column is a date), and tables failing the
/// English heuristic (< 80% of alphabetic characters are ASCII letters,
/// counted over a deterministic sample of non-null cells).
FilterVerdict filter_table(const std::vector<Column>& table);

/// One record per row; attribute names are the column names; null cells
/// stay null. Ragged columns raise DataError. Record ids are "r<row>".
Collection table_to_records(const std::vector<Column>& table,
                            const std::string& table_id);

// Exposed for tests: the per-cell parsers behind detect_column_type.
bool parses_as_numeric(std::string_view s);
bool parses_as_url(std::string_view s);
bool parses_as_date(std::string_view s);

}  // namespace blockkit
