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

#include <doctest.h>

#include <cmath>
#include <string>
#include <unordered_set>
#include <vector>

#include "blockkit/errors.hpp"
#include "blockkit/eval.hpp"
#include "test_helpers.hpp"

using namespace blockkit;

namespace {

GoldMatches gold_of(const std::vector<std::pair<std::string, std::string>>& pairs) {
  GoldMatches gold;
  for (const auto& [a, b] : pairs) gold.add(a, b);
  return gold;
}

RankedCandidates ranked_of(
    BlockingMode mode,
    std::vector<std::vector<std::pair<std::string, std::string>>> ranks) {
  RankedCandidates out;
  out.mode = mode;
  for (auto& rank : ranks) {
    std::vector<CandidatePair> bucket;
    for (auto& [l, r] : rank) bucket.push_back({l, r});
    out.ranks.push_back(std::move(bucket));
  }
  return out;
}

// Independent mAP route: walk the candidate stream pair by pair in rank
// order keeping raw hit/total counters, collect one PR point per rank, then
// step-sum the points.
double pr_step_sum(const RankedCandidates& ranked, const GoldMatches& gold,
                   int k_max) {
  struct Point {
    double recall, precision;
  };
  std::vector<Point> points;
  std::size_t hits = 0, total = 0;
  for (int k = 0; k < k_max; ++k) {
    if (static_cast<std::size_t>(k) < ranked.ranks.size()) {
      for (const auto& p : ranked.ranks[static_cast<std::size_t>(k)]) {
        ++total;
        if (gold.contains(p.left, p.right)) ++hits;
      }
    }
    double recall = static_cast<double>(hits) / static_cast<double>(gold.size());
    double precision =
        total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
    points.push_back({recall, precision});
  }
  double auc = 0.0, prev = 0.0;
  for (const Point& pt : points) {
    auc += (pt.recall - prev) * pt.precision;
    prev = pt.recall;
  }
  return auc;
}

// Random instance shared by the oracle tests.
RankedCandidates random_instance(rng::Engine& g, GoldMatches& gold_out) {
  const std::size_t n = 50;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("r" + std::to_string(i));

  GoldMatches gold;
  while (gold.size() < 15) {
    std::size_t a = rng::index(g, n), b = rng::index(g, n);
    if (a == b) continue;
    gold.add(ids[a], ids[b]);
  }

  RankedCandidates ranked;
  ranked.mode = BlockingMode::single_collection;
  std::unordered_set<std::string> seen;
  std::size_t depth = 3 + rng::index(g, 10);
  for (std::size_t r = 0; r < depth; ++r) {
    std::vector<CandidatePair> bucket;
    std::size_t width = rng::index(g, 12);
    for (std::size_t w = 0; w < width; ++w) {
      std::size_t a = rng::index(g, n), b = rng::index(g, n);
      if (a == b) continue;
      CandidatePair p{std::min(ids[a], ids[b]), std::max(ids[a], ids[b])};
      if (seen.insert(p.left + "\x1f" + p.right).second) bucket.push_back(p);
    }
    ranked.ranks.push_back(std::move(bucket));
  }
  gold_out = std::move(gold);
  return ranked;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("pc and pq follow the set formulas") {
  GoldMatches gold = gold_of({{"a", "b"}, {"c", "d"}, {"e", "f"}, {"g", "h"}});
  PairKeySet candidates;
  candidates.insert(canonical_pair_key("a", "b"));
  candidates.insert(canonical_pair_key("c", "d"));
  candidates.insert(canonical_pair_key("e", "f"));
  for (int i = 0; i < 7; ++i)
    candidates.insert(canonical_pair_key("x" + std::to_string(i), "y"));

  PcPq res = pc_pq(candidates, gold);
  CHECK(res.pc == doctest::Approx(0.75));
  CHECK(res.pq == doctest::Approx(0.3));
  CHECK(res.pq_defined);
}

TEST_CASE("candidates equal to gold score perfectly") {
  GoldMatches gold = gold_of({{"a", "b"}, {"c", "d"}});
  PairKeySet candidates(gold.keys.begin(), gold.keys.end());
  PcPq res = pc_pq(candidates, gold);
  CHECK(res.pc == doctest::Approx(1.0));
  CHECK(res.pq == doctest::Approx(1.0));
}

TEST_CASE("disjoint candidates score zero") {
  GoldMatches gold = gold_of({{"a", "b"}});
  PairKeySet candidates{canonical_pair_key("x", "y")};
  PcPq res = pc_pq(candidates, gold);
  CHECK(res.pc == 0.0);
  CHECK(res.pq == 0.0);
}

TEST_CASE("empty inputs behave per contract") {
  GoldMatches gold = gold_of({{"a", "b"}});
  PcPq res = pc_pq({}, gold);
  CHECK_FALSE(res.pq_defined);
  CHECK(res.pq == 0.0);
  CHECK_THROWS_AS(pc_pq({canonical_pair_key("a", "b")}, GoldMatches{}), DataError);
  CHECK_THROWS_AS(gold_of({{"a", "a"}}), DataError);
}

TEST_CASE("two-rank mAP fixture evaluates to one half") {
  GoldMatches gold = gold_of({{"a", "b"}, {"c", "d"}});
  RankedCandidates ranked =
      ranked_of(BlockingMode::single_collection, {{{"a", "b"}}, {{"x", "y"}}});
  CHECK(mean_average_precision(ranked, gold, 2) == doctest::Approx(0.5));
}

TEST_CASE("all matches at rank one give mAP 1") {
  GoldMatches gold = gold_of({{"a", "b"}, {"c", "d"}});
  RankedCandidates ranked =
      ranked_of(BlockingMode::single_collection, {{{"a", "b"}, {"c", "d"}}});
  CHECK(mean_average_precision(ranked, gold, 5) == doctest::Approx(1.0));
}

TEST_CASE("mAP equals the PR step-sum oracle on 50 random instances") {
  rng::Engine g(71);
  for (int trial = 0; trial < 50; ++trial) {
    GoldMatches gold;
    RankedCandidates ranked = random_instance(g, gold);
    int k_max = 1 + static_cast<int>(rng::index(g, 15));
    double fast = mean_average_precision(ranked, gold, k_max);
    double slow = pr_step_sum(ranked, gold, k_max);
    CHECK(std::abs(fast - slow) <= 1e-12);
    CHECK(fast >= 0.0);
  }
}

TEST_CASE("protocol report finds the threshold crossing") {
  // |M| = 10; cumulative hits 2,4,6,8,9 -> PC crosses 0.9 at k = 5.
  GoldMatches gold;
  std::vector<std::pair<std::string, std::string>> matches;
  for (int i = 0; i < 10; ++i) {
    matches.push_back({"m" + std::to_string(i), "n" + std::to_string(i)});
    gold.add(matches.back().first, matches.back().second);
  }
  std::vector<std::vector<std::pair<std::string, std::string>>> ranks;
  int at = 0;
  for (int hits : {2, 2, 2, 2, 1}) {
    std::vector<std::pair<std::string, std::string>> bucket;
    for (int h = 0; h < hits; ++h) bucket.push_back(matches[static_cast<std::size_t>(at++)]);
    bucket.push_back({"f" + std::to_string(at), "g"});  // one false pair per rank
    ranks.push_back(std::move(bucket));
  }
  EvalReport report =
      protocol_report(ranked_of(BlockingMode::single_collection, ranks), gold, 0.9, 8);

  REQUIRE(report.k_at_threshold.has_value());
  CHECK(*report.k_at_threshold == 5);
  CHECK(report.rows[4].pc == doctest::Approx(0.9));
  CHECK(report.headline() == doctest::Approx(report.rows[4].pq));
  CHECK(report.rows.size() == 8);
  // rows freeze once ranks run out
  CHECK(report.rows[7].pc == doctest::Approx(report.rows[4].pc));
}

TEST_CASE("a report that never reaches the threshold") {
  GoldMatches gold = gold_of({{"a", "b"}, {"c", "d"}});
  RankedCandidates ranked =
      ranked_of(BlockingMode::single_collection, {{{"a", "b"}}});
  EvalReport report = protocol_report(ranked, gold, 0.9, 3);
  CHECK_FALSE(report.k_at_threshold.has_value());
  CHECK(report.headline() == doctest::Approx(0.5));  // PC at budget
}

TEST_CASE("k_budget one yields exactly one row") {
  GoldMatches gold = gold_of({{"a", "b"}});
  RankedCandidates ranked =
      ranked_of(BlockingMode::single_collection, {{{"a", "b"}}});
  EvalReport report = protocol_report(ranked, gold, 0.9, 1);
  CHECK(report.rows.size() == 1);
}

TEST_CASE("cumulative PC at k equals pc_pq over the union of ranks") {
  rng::Engine g(73);
  GoldMatches gold;
  RankedCandidates ranked = random_instance(g, gold);
  EvalReport report = protocol_report(ranked, gold, 0.9,
                                      static_cast<int>(ranked.ranks.size()));
  PairKeySet cumulative;
  for (std::size_t k = 0; k < ranked.ranks.size(); ++k) {
    for (const auto& p : ranked.ranks[k])
      cumulative.insert(canonical_pair_key(p.left, p.right));
    PcPq direct = pc_pq(cumulative, gold);
    CHECK(report.rows[k].pc == doctest::Approx(direct.pc).epsilon(1e-15));
    if (direct.pq_defined)
      CHECK(report.rows[k].pq == doctest::Approx(direct.pq).epsilon(1e-15));
  }
}

TEST_CASE("appending false candidates never raises mAP") {
  GoldMatches gold = gold_of({{"a", "b"}, {"c", "d"}});
  RankedCandidates base =
      ranked_of(BlockingMode::single_collection, {{{"a", "b"}}, {{"c", "d"}}});
  RankedCandidates extended = base;
  extended.ranks.push_back({{"u", "v"}, {"w", "x"}});

  double base_map = mean_average_precision(base, gold, 3);
  double ext_map = mean_average_precision(extended, gold, 3);
  CHECK(ext_map <= base_map + 1e-15);
  // PC stays fixed
  EvalReport a = protocol_report(base, gold, 0.9, 3);
  EvalReport b = protocol_report(extended, gold, 0.9, 3);
  CHECK(a.rows[2].pc == doctest::Approx(b.rows[2].pc));
}

TEST_CASE("compare picks pair quality when both reach the threshold") {
  // a: PC 0.92 with PQ 0.3; b: PC 0.95 with PQ 0.2
  auto synth_report = [](double pc, double pq) {
    EvalReport r;
    r.pc_threshold = 0.9;
    r.k_budget = 4;
    for (int k = 1; k <= 4; ++k) {
      EvalRow row;
      row.k = k;
      row.pc = pc;
      row.pq = pq;
      row.pq_defined = true;
      row.candidates = 10;
      r.rows.push_back(row);
    }
    r.k_at_threshold = 1;
    return r;
  };
  EvalReport a = synth_report(0.92, 0.3);
  EvalReport b = synth_report(0.95, 0.2);
  CompareVerdict v = compare_blockers(a, b);
  CHECK(v.branch == CompareBranch::pair_quality);
  CHECK(v.winner == Winner::a);
  CHECK(v.metric_a == doctest::Approx(0.3));
  CHECK(v.metric_b == doctest::Approx(0.2));
}

TEST_CASE("compare falls back to pair completeness") {
  auto below = [](double pc) {
    EvalReport r;
    r.pc_threshold = 0.9;
    r.k_budget = 2;
    for (int k = 1; k <= 2; ++k) {
      EvalRow row;
      row.k = k;
      row.pc = pc;
      row.pq = 0.1;
      row.pq_defined = true;
      row.candidates = 5;
      r.rows.push_back(row);
    }
    return r;
  };
  EvalReport a = below(0.85);
  EvalReport b = below(0.80);
  CompareVerdict v = compare_blockers(a, b);
  CHECK(v.branch == CompareBranch::pair_completeness);
  CHECK(v.winner == Winner::a);

  CompareVerdict tie = compare_blockers(a, a);
  CHECK(tie.winner == Winner::tie);
}

TEST_CASE("mismatched budgets are rejected") {
  EvalReport a, b;
  a.k_budget = 10;
  b.k_budget = 20;
  a.rows.push_back({1, 0.5, 0.5, 1, true});
  b.rows.push_back({1, 0.5, 0.5, 1, true});
  CHECK_THROWS_AS(compare_blockers(a, b), ConfigError);
}

}  // TEST_SUITE
