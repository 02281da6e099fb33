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

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "blockkit/blocker.hpp"
#include "blockkit/errors.hpp"
#include "test_helpers.hpp"

using namespace blockkit;
using blockkit::test::make_record;

namespace {

RecordVector unit(std::vector<double> v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0)
    for (double& x : v) x /= norm;
  return {std::move(v)};
}

Collection word_collection(const std::vector<std::pair<std::string, std::string>>& rows) {
  Collection coll;
  coll.source_tag = "t";
  for (const auto& [id, text] : rows)
    coll.records.push_back(make_record(id, {{"x", text}}));
  return coll;
}

void check_invariants(const RankedCandidates& ranked) {
  std::unordered_set<std::string> seen;
  std::size_t cumulative = 0;
  for (const auto& rank : ranked.ranks) {
    for (const auto& p : rank) {
      if (ranked.mode == BlockingMode::single_collection) {
        CHECK(p.left < p.right);  // canonical, never self
      }
      CHECK(seen.insert(p.left + "\x1f" + p.right).second);
    }
    cumulative += rank.size();  // cumulative sets grow monotonically
    CHECK(seen.size() == cumulative);
  }
}

}  // namespace

TEST_SUITE("blocker") {

TEST_CASE("a query equal to an indexed vector finds it first") {
  KnnIndex index;
  index.vectors = {unit({1, 0, 0}), unit({0, 1, 0}), unit({0, 0, 1})};
  index.ids = {"a", "b", "c"};
  auto hits = exact_knn(index, {unit({0, 1, 0})}, 2);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0][0].id == "b");
  CHECK(hits[0][0].score == doctest::Approx(1.0));
}

TEST_CASE("an orthogonal query falls back to ascending ids") {
  KnnIndex index;
  index.vectors = {unit({1, 0, 0, 0}), unit({0, 1, 0, 0}), unit({0, 0, 1, 0})};
  index.ids = {"b", "a", "c"};
  auto hits = exact_knn(index, {unit({0, 0, 0, 1})}, 3);
  REQUIRE(hits[0].size() == 3);
  CHECK(hits[0][0].id == "a");
  CHECK(hits[0][1].id == "b");
  CHECK(hits[0][2].id == "c");
}

TEST_CASE("exact_knn equals the quadratic oracle on seeded vectors") {
  rng::Engine g(7);
  const int dim = 64, n = 200, k = 10;
  KnnIndex index;
  for (int i = 0; i < n; ++i) {
    std::vector<double> v(dim);
    for (double& x : v) x = rng::uniform(g, -1.0, 1.0);
    index.vectors.push_back(unit(std::move(v)));
    index.ids.push_back("v" + std::to_string(i));
  }
  auto hits = exact_knn(index, index.vectors, k);

  for (int q = 0; q < n; ++q) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      double sa = dot(index.vectors[q], index.vectors[a]);
      double sb = dot(index.vectors[q], index.vectors[b]);
      if (sa != sb) return sa > sb;
      return index.ids[a] < index.ids[b];
    });
    for (int i = 0; i < k; ++i) CHECK(hits[q][i].id == index.ids[order[i]]);
  }
}

TEST_CASE("two identical records block to one canonical pair") {
  Collection coll = word_collection({{"0", "same text"}, {"1", "same text"}});
  RankedCandidates ranked = nn_block({coll}, make_hashed_vectorizer(8, 16), 1);
  CHECK(ranked.mode == BlockingMode::single_collection);
  REQUIRE(ranked.ranks.size() == 1);
  REQUIRE(ranked.ranks[0].size() == 1);
  CHECK(ranked.ranks[0][0].left == "0");
  CHECK(ranked.ranks[0][0].right == "1");
}

TEST_CASE("two collections pair source with target") {
  Collection a = word_collection({{"a", "apple pie"}});
  a.source_tag = "A";
  Collection b = word_collection({{"b", "apple tart"}});
  b.source_tag = "B";
  RankedCandidates ranked = nn_block({a, b}, make_hashed_vectorizer(8, 16), 1);
  CHECK(ranked.mode == BlockingMode::two_collection);
  REQUIRE(ranked.ranks.size() == 1);
  REQUIRE(ranked.ranks[0].size() == 1);
  CHECK(ranked.ranks[0][0].left == "a");
  CHECK(ranked.ranks[0][0].right == "b");
}

TEST_CASE("three collections merge into single mode") {
  Collection a = word_collection({{"0", "alpha beta"}, {"1", "gamma delta"}});
  a.source_tag = "m1";
  Collection b = word_collection({{"0", "alpha beta"}, {"1", "epsilon zeta"}});
  b.source_tag = "m2";
  Collection c = word_collection({{"0", "eta theta"}, {"1", "iota kappa"}});
  c.source_tag = "m3";

  RankedCandidates ranked = nn_block({a, b, c}, make_hashed_vectorizer(16, 16), 2);
  CHECK(ranked.mode == BlockingMode::single_collection);
  for (const auto& rank : ranked.ranks) CHECK(rank.size() <= 6);
  check_invariants(ranked);
  // merged ids carry their source tags
  bool saw_namespaced = false;
  for (const auto& rank : ranked.ranks)
    for (const auto& p : rank)
      if (p.left.rfind("m", 0) == 0 && p.left.find(':') != std::string::npos)
        saw_namespaced = true;
  CHECK(saw_namespaced);
}

TEST_CASE("k beyond the target capacity clamps with a warning") {
  Collection coll = word_collection(
      {{"0", "aa bb"}, {"1", "cc dd"}, {"2", "ee ff"}});
  RankedCandidates ranked = nn_block({coll}, make_hashed_vectorizer(8, 16), 10);
  CHECK(ranked.ranks.size() == 2);  // size - 1 in single mode
  check_invariants(ranked);
}

TEST_CASE("k below one is rejected") {
  Collection coll = word_collection({{"0", "aa"}, {"1", "bb"}});
  CHECK_THROWS_AS(nn_block({coll}, make_hashed_vectorizer(8, 16), 0), ConfigError);
}

TEST_CASE("bm25 blocking obeys the same semantics") {
  Collection coll = word_collection({{"0", "apple iphone twelve"},
                                     {"1", "apple iphone twelve"},
                                     {"2", "samsung galaxy phone"},
                                     {"3", "unrelated thing entirely"}});
  TokenizerScheme grams{TokenizerKind::qgram, 3};
  RankedCandidates ranked = bm25_block({coll}, grams, {}, 2);
  CHECK(ranked.mode == BlockingMode::single_collection);
  check_invariants(ranked);
  REQUIRE(!ranked.ranks.empty());
  REQUIRE(!ranked.ranks[0].empty());
  CHECK(ranked.ranks[0][0].left == "0");
  CHECK(ranked.ranks[0][0].right == "1");
}

TEST_CASE("ensemble with an empty side is identity") {
  Collection coll = word_collection({{"0", "aa bb"}, {"1", "aa bb"}, {"2", "cc dd"}});
  RankedCandidates r1 = nn_block({coll}, make_hashed_vectorizer(8, 16), 2);
  RankedCandidates empty;
  empty.mode = r1.mode;
  RankedCandidates merged = ensemble(r1, empty);
  REQUIRE(merged.ranks.size() == r1.ranks.size());
  for (std::size_t i = 0; i < merged.ranks.size(); ++i)
    CHECK(merged.ranks[i] == r1.ranks[i]);
}

TEST_CASE("ensemble unions per rank") {
  RankedCandidates r1, r2;
  r1.mode = r2.mode = BlockingMode::single_collection;
  r1.ranks = {{{"0", "1"}}};
  r2.ranks = {{{"0", "2"}}};
  RankedCandidates merged = ensemble(r1, r2);
  REQUIRE(merged.ranks.size() == 1);
  REQUIRE(merged.ranks[0].size() == 2);
  CHECK(merged.ranks[0][0] == CandidatePair{"0", "1"});
  CHECK(merged.ranks[0][1] == CandidatePair{"0", "2"});
}

TEST_CASE("a pair seen early never reappears later") {
  RankedCandidates r1, r2;
  r1.mode = r2.mode = BlockingMode::single_collection;
  r1.ranks = {{{"0", "1"}}, {}, {}};
  r2.ranks = {{}, {}, {{"0", "1"}, {"2", "3"}}};
  RankedCandidates merged = ensemble(r1, r2);
  REQUIRE(merged.ranks.size() == 3);
  CHECK(merged.ranks[0].size() == 1);
  CHECK(merged.ranks[1].empty());
  REQUIRE(merged.ranks[2].size() == 1);
  CHECK(merged.ranks[2][0] == CandidatePair{"2", "3"});
}

TEST_CASE("mode mismatch is an error") {
  RankedCandidates r1, r2;
  r1.mode = BlockingMode::single_collection;
  r2.mode = BlockingMode::two_collection;
  CHECK_THROWS_AS(ensemble(r1, r2), DataError);
}

TEST_CASE("single-collection properties hold on 100 seeded instances") {
  rng::Engine g(55);
  for (int trial = 0; trial < 100; ++trial) {
    Collection coll;
    coll.source_tag = "t";
    std::size_t n = 2 + rng::index(g, 30);
    for (std::size_t i = 0; i < n; ++i) {
      // duplicates and ties on purpose
      std::string text = rng::chance(g, 0.3) && i > 0
                             ? record_text(coll.records[rng::index(g, i)])
                             : test::random_text(g, 1 + rng::index(g, 4));
      coll.records.push_back(make_record("r" + std::to_string(i), {{"x", text}}));
    }
    int k = 1 + static_cast<int>(rng::index(g, n + 2));
    RankedCandidates ranked = nn_block({coll}, make_hashed_vectorizer(8, 16), k);
    CHECK(ranked.mode == BlockingMode::single_collection);
    check_invariants(ranked);
  }
}

TEST_CASE("two-collection mode never pairs within a source") {
  rng::Engine g(57);
  for (int trial = 0; trial < 20; ++trial) {
    Collection a, b;
    a.source_tag = "A";
    b.source_tag = "B";
    std::size_t na = 2 + rng::index(g, 10), nb = 2 + rng::index(g, 10);
    for (std::size_t i = 0; i < na; ++i)
      a.records.push_back(make_record("a" + std::to_string(i),
                                      {{"x", test::random_text(g, 2)}}));
    for (std::size_t i = 0; i < nb; ++i)
      b.records.push_back(make_record("b" + std::to_string(i),
                                      {{"x", test::random_text(g, 2)}}));
    int k = 1 + static_cast<int>(rng::index(g, nb));
    RankedCandidates ranked = nn_block({a, b}, make_hashed_vectorizer(8, 16), k);
    for (const auto& rank : ranked.ranks)
      for (const auto& p : rank) {
        CHECK(p.left[0] == 'a');
        CHECK(p.right[0] == 'b');
      }
  }
}

TEST_CASE("nn_block equals an independent rank-major assembly oracle") {
  rng::Engine g(59);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Collection> colls;
    std::size_t n_colls = 1 + rng::index(g, 4);
    for (std::size_t c = 0; c < n_colls; ++c) {
      Collection coll;
      coll.source_tag = "s" + std::to_string(c);
      std::size_t n = 2 + rng::index(g, 8);
      for (std::size_t i = 0; i < n; ++i)
        coll.records.push_back(make_record(
            "r" + std::to_string(i),
            {{"x", test::random_text(g, 1 + rng::index(g, 3))}}));
      colls.push_back(std::move(coll));
    }
    const int dim = 8, max_seq = 16;
    Vectorizer vec = make_hashed_vectorizer(dim, max_seq);

    // resolve source/target/mode exactly as the algorithm prescribes
    Collection merged;
    const Collection* source;
    const Collection* target;
    bool single;
    if (colls.size() == 1) {
      source = target = &colls[0];
      single = true;
    } else if (colls.size() == 2) {
      source = &colls.front();
      target = &colls.back();
      single = false;
    } else {
      merged = merge_collections(colls);
      source = target = &merged;
      single = true;
    }
    std::size_t cap = single ? target->records.size() - 1 : target->records.size();
    int k = 1 + static_cast<int>(rng::index(g, cap));

    // oracle: full sort per source record, self drop, rank-major dedup
    std::vector<RecordVector> tvecs = vec(*target);
    std::vector<RecordVector> svecs = vec(*source);
    std::vector<std::vector<std::string>> neighbor_ids(svecs.size());
    for (std::size_t q = 0; q < svecs.size(); ++q) {
      std::vector<std::size_t> order(tvecs.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double sa = dot(svecs[q], tvecs[a]);
        double sb = dot(svecs[q], tvecs[b]);
        if (sa != sb) return sa > sb;
        return target->records[a].id < target->records[b].id;
      });
      for (std::size_t i = 0;
           i < order.size() && neighbor_ids[q].size() < static_cast<std::size_t>(k);
           ++i) {
        const std::string& id = target->records[order[i]].id;
        if (single && id == source->records[q].id) continue;
        neighbor_ids[q].push_back(id);
      }
    }
    RankedCandidates expected;
    expected.mode =
        single ? BlockingMode::single_collection : BlockingMode::two_collection;
    expected.ranks.resize(static_cast<std::size_t>(k));
    std::unordered_set<std::string> seen;
    for (int rank = 0; rank < k; ++rank) {
      for (std::size_t q = 0; q < svecs.size(); ++q) {
        if (static_cast<std::size_t>(rank) >= neighbor_ids[q].size()) continue;
        CandidatePair p{source->records[q].id, neighbor_ids[q][rank]};
        if (single && p.right < p.left) std::swap(p.left, p.right);
        if (seen.insert(p.left + "\x1f" + p.right).second)
          expected.ranks[static_cast<std::size_t>(rank)].push_back(p);
      }
    }

    RankedCandidates got = nn_block(colls, vec, k);
    CHECK(got.mode == expected.mode);
    REQUIRE(got.ranks.size() == expected.ranks.size());
    for (std::size_t r = 0; r < got.ranks.size(); ++r)
      CHECK(got.ranks[r] == expected.ranks[r]);
  }
}

TEST_CASE("hashed blocking is fully deterministic") {
  Collection coll = word_collection({{"0", "aa bb cc"}, {"1", "aa bb"}, {"2", "dd"}});
  RankedCandidates r1 = nn_block({coll}, make_hashed_vectorizer(8, 16), 2);
  RankedCandidates r2 = nn_block({coll}, make_hashed_vectorizer(8, 16), 2);
  REQUIRE(r1.ranks.size() == r2.ranks.size());
  for (std::size_t i = 0; i < r1.ranks.size(); ++i) CHECK(r1.ranks[i] == r2.ranks[i]);
}

}  // TEST_SUITE
