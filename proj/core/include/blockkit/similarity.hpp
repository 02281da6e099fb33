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

#include <cstddef>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "blockkit/records.hpp"

namespace blockkit {

struct SimilarityVector {
  double lev_norm = 0.0;      // 1 - editdistance / max(|a|, |b|)
  double jaccard_word = 0.0;  // over word-token sets
  double jaccard_3gram = 0.0; // over 3-gram token sets
  double tf_cosine = 0.0;     // over word term-frequency vectors
  double max() const;
};

struct DupConfig {
  double threshold = 0.85;
};

/// Levenshtein distance over code points.
std::size_t levenshtein(std::string_view a, std::string_view b);

/// All four measures; every component is 1.0 for identical inputs (including
/// two empty strings) and 0.0 against an empty string.
SimilarityVector string_similarities(std::string_view a, std::string_view b);

/// Pairs (i, j), i < j, whose concatenated record texts score >= threshold
/// on at least one measure.
std::set<std::pair<std::size_t, std::size_t>> detect_duplicates(
    const std::vector<Record>& batch, const DupConfig& cfg);

}  // namespace blockkit
