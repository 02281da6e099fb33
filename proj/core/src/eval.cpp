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

#include "blockkit/eval.hpp"

#include <stdexcept>

#include "blockkit/errors.hpp"

namespace blockkit {

std::string canonical_pair_key(const std::string& a, const std::string& b) {
  const std::string& lo = a <= b ? a : b;
  const std::string& hi = a <= b ? b : a;
  std::string key;
  key.reserve(lo.size() + hi.size() + 1);
  key += lo;
  key.push_back('\x1f');
  key += hi;
  return key;
}

void GoldMatches::add(const std::string& a, const std::string& b) {
  if (a == b) throw DataError("gold matches: self-pair '" + a + "'");
  keys.insert(canonical_pair_key(a, b));
}

PcPq pc_pq(const PairKeySet& candidates, const GoldMatches& gold) {
  if (gold.size() == 0) throw DataError("pc_pq: empty gold match set");
  std::size_t hits = 0;
  for (const auto& key : candidates)
    if (gold.keys.count(key)) ++hits;

  PcPq out;
  out.pc = static_cast<double>(hits) / static_cast<double>(gold.size());
  if (candidates.empty()) {
    out.pq = 0.0;
    out.pq_defined = false;
  } else {
    out.pq = static_cast<double>(hits) / static_cast<double>(candidates.size());
    out.pq_defined = true;
  }
  return out;
}

namespace {

// Single pass over ranks maintaining cumulative hit/candidate counts. The
// blocker's global dedup makes the cumulative candidate set equal to plain
// concatenation.
struct CumulativeScan {
  const RankedCandidates& ranked;
  const GoldMatches& gold;
  std::size_t hits = 0;
  std::size_t total = 0;
  std::size_t next_rank = 0;

  void advance() {
    if (next_rank >= ranked.ranks.size()) return;
    for (const CandidatePair& p : ranked.ranks[next_rank]) {
      ++total;
      if (gold.contains(p.left, p.right)) ++hits;
    }
    ++next_rank;
  }

  double pc() const {
    return static_cast<double>(hits) / static_cast<double>(gold.size());
  }
  double pq() const {
    return total == 0 ? 0.0
                      : static_cast<double>(hits) / static_cast<double>(total);
  }
};

}  // namespace

double mean_average_precision(const RankedCandidates& ranked,
                              const GoldMatches& gold, int k_max) {
  if (k_max < 1) throw std::invalid_argument("mean_average_precision: k_max must be >= 1");
  if (gold.size() == 0) throw DataError("mean_average_precision: empty gold match set");

  CumulativeScan scan{ranked, gold};
  double map = 0.0;
  double prev_recall = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    scan.advance();
    double r = scan.pc();
    map += (r - prev_recall) * scan.pq();
    prev_recall = r;
  }
  return map;
}

EvalReport protocol_report(const RankedCandidates& ranked, const GoldMatches& gold,
                           double pc_threshold, int k_budget) {
  if (k_budget < 1) throw ConfigError("protocol_report: k_budget must be >= 1");
  if (pc_threshold < 0.0 || pc_threshold > 1.0)
    throw ConfigError("protocol_report: pc_threshold must be in [0,1]");
  if (gold.size() == 0) throw DataError("protocol_report: empty gold match set");

  EvalReport report;
  report.pc_threshold = pc_threshold;
  report.k_budget = k_budget;
  report.rows.reserve(static_cast<std::size_t>(k_budget));

  CumulativeScan scan{ranked, gold};
  double map = 0.0;
  double prev_recall = 0.0;
  for (int k = 1; k <= k_budget; ++k) {
    scan.advance();
    EvalRow row;
    row.k = k;
    row.pc = scan.pc();
    row.pq = scan.pq();
    row.pq_defined = scan.total > 0;
    row.candidates = scan.total;
    map += (row.pc - prev_recall) * row.pq;
    prev_recall = row.pc;
    if (!report.k_at_threshold && row.pc >= pc_threshold)
      report.k_at_threshold = k;
    report.rows.push_back(row);
  }
  report.map = map;
  return report;
}

double EvalReport::headline() const {
  if (rows.empty()) return 0.0;
  if (k_at_threshold)
    return rows[static_cast<std::size_t>(*k_at_threshold - 1)].pq;
  return rows.back().pc;
}

CompareVerdict compare_blockers(const EvalReport& a, const EvalReport& b) {
  if (a.k_budget != b.k_budget)
    throw ConfigError("compare_blockers: k_budget mismatch");
  if (a.pc_threshold != b.pc_threshold)
    throw ConfigError("compare_blockers: pc_threshold mismatch");
  if (a.rows.empty() || b.rows.empty())
    throw DataError("compare_blockers: empty report");

  CompareVerdict v;
  if (a.k_at_threshold && b.k_at_threshold) {
    v.branch = CompareBranch::pair_quality;
    v.metric_a = a.rows[static_cast<std::size_t>(*a.k_at_threshold - 1)].pq;
    v.metric_b = b.rows[static_cast<std::size_t>(*b.k_at_threshold - 1)].pq;
  } else {
    v.branch = CompareBranch::pair_completeness;
    v.metric_a = a.rows.back().pc;
    v.metric_b = b.rows.back().pc;
  }
  if (v.metric_a > v.metric_b)
    v.winner = Winner::a;
  else if (v.metric_b > v.metric_a)
    v.winner = Winner::b;
  else
    v.winner = Winner::tie;
  return v;
}

}  // namespace blockkit
