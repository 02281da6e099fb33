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
#include <unordered_set>
#include <vector>

#include "blockkit/blocker.hpp"

namespace blockkit {

/// Canonical unordered key for a pair of ids (smaller id first).
std::string canonical_pair_key(const std::string& a, const std::string& b);

using PairKeySet = std::unordered_set<std::string>;

// Gold duplicate pairs, canonicalized unordered. Self-pairs are rejected.
struct GoldMatches {
  PairKeySet keys;

  std::size_t size() const { return keys.size(); }
  bool contains(const std::string& a, const std::string& b) const {
    return keys.count(canonical_pair_key(a, b)) > 0;
  }
  void add(const std::string& a, const std::string& b);
};

struct PcPq {
  double pc = 0.0;
  double pq = 0.0;
  bool pq_defined = false;  // false when C is empty (PQ reported as 0)
};

/// PC = |C n M| / |M|, PQ = |C n M| / |C|. Empty M is an error; empty C
/// yields PQ = 0 with pq_defined = false.
PcPq pc_pq(const PairKeySet& candidates, const GoldMatches& gold);

struct EvalRow {
  int k = 0;
  double pc = 0.0;            // cumulative over ranks 1..k
  double pq = 0.0;
  std::size_t candidates = 0; // cumulative |C|
  bool pq_defined = false;
};

struct EvalReport {
  std::vector<EvalRow> rows;  // k = 1..k_budget; frozen once ranks run out
  double map = 0.0;
  std::optional<int> k_at_threshold;  // smallest k with PC >= pc_threshold
  double pc_threshold = 0.9;
  int k_budget = 100;

  // Headline per the protocol: PQ at k_at_threshold when the threshold was
  // reached, otherwise PC at k_budget.
  double headline() const;
};

/// mAP = sum over k of (R_k - R_{k-1}) * P_k with cumulative PC/PQ; ranks
/// beyond the available data contribute nothing.
double mean_average_precision(const RankedCandidates& ranked,
                              const GoldMatches& gold, int k_max);

EvalReport protocol_report(const RankedCandidates& ranked, const GoldMatches& gold,
                           double pc_threshold = 0.9, int k_budget = 100);

enum class Winner { a, b, tie };
enum class CompareBranch { pair_quality, pair_completeness };

struct CompareVerdict {
  Winner winner = Winner::tie;
  CompareBranch branch = CompareBranch::pair_completeness;
  double metric_a = 0.0;
  double metric_b = 0.0;
};

/// Both reports reached the PC threshold: higher PQ at each one's own
/// k_at_threshold wins. Otherwise: higher PC at k_budget wins. Exact ties
/// are declared ties. Budgets and thresholds must match.
CompareVerdict compare_blockers(const EvalReport& a, const EvalReport& b);

}  // namespace blockkit
