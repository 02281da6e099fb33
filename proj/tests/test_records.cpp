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

#include "blockkit/errors.hpp"
#include "blockkit/records.hpp"
#include "test_helpers.hpp"

using namespace blockkit;
using blockkit::test::make_record;

TEST_SUITE("records") {

TEST_CASE("serialize carries attr index and per-attribute positions") {
  Record rec = make_record("r", {{"title", "iphone 12"}, {"brand", "apple"}});
  TokenizedRecord tok = serialize_record(rec, 256);

  REQUIRE(tok.tokens.size() == 3);
  CHECK(tok.tokens[0].text == "iphone");
  CHECK(tok.tokens[0].attr_index == 0);
  CHECK(tok.tokens[0].pos_id == 0);
  CHECK(tok.tokens[1].text == "12");
  CHECK(tok.tokens[1].attr_index == 0);
  CHECK(tok.tokens[1].pos_id == 1);
  CHECK(tok.tokens[2].text == "apple");
  CHECK(tok.tokens[2].attr_index == 1);
  CHECK(tok.tokens[2].pos_id == 0);
  CHECK(tok.attr_names == std::vector<std::string>{"title", "brand"});
}

TEST_CASE("null and empty values are skipped") {
  Record rec = make_record("r", {{"title", std::nullopt}, {"brand", "apple"}});
  TokenizedRecord tok = serialize_record(rec, 256);
  REQUIRE(tok.tokens.size() == 1);
  CHECK(tok.tokens[0].text == "apple");
  CHECK(tok.tokens[0].attr_index == 1);
  CHECK(tok.tokens[0].pos_id == 0);

  Record empties = make_record("r", {{"a", ""}, {"b", std::nullopt}});
  CHECK(serialize_record(empties, 16).tokens.empty());
}

TEST_CASE("truncation keeps the first max_seq_len tokens") {
  Record rec;
  rec.id = "r";
  for (int i = 0; i < 300; ++i)
    rec.attrs.push_back({"a" + std::to_string(i), "tok" + std::to_string(i)});
  TokenizedRecord tok = serialize_record(rec, 256);
  CHECK(tok.tokens.size() == 256);
  CHECK(tok.tokens.back().text == "tok255");
}

TEST_CASE("serialization is deterministic") {
  Record rec = make_record("r", {{"x", "Alpha Beta"}, {"y", "gamma-delta"}});
  TokenizedRecord a = serialize_record(rec, 64);
  TokenizedRecord b = serialize_record(rec, 64);
  REQUIRE(a.tokens.size() == b.tokens.size());
  for (std::size_t i = 0; i < a.tokens.size(); ++i) {
    CHECK(a.tokens[i].text == b.tokens[i].text);
    CHECK(a.tokens[i].attr_index == b.tokens[i].attr_index);
    CHECK(a.tokens[i].pos_id == b.tokens[i].pos_id);
  }
}

TEST_CASE("pos_id runs 0,1,2,... within every attribute") {
  rng::Engine g(11);
  for (int trial = 0; trial < 50; ++trial) {
    Record rec;
    rec.id = "r";
    std::size_t attrs = 1 + rng::index(g, 6);
    for (std::size_t a = 0; a < attrs; ++a) {
      if (rng::chance(g, 0.2))
        rec.attrs.push_back({"n" + std::to_string(a), std::nullopt});
      else
        rec.attrs.push_back(
            {"n" + std::to_string(a), test::random_text(g, rng::index(g, 5))});
    }
    TokenizedRecord tok = serialize_record(rec, 256);
    int prev_attr = -1, expect_pos = 0;
    for (const auto& t : tok.tokens) {
      CHECK(t.attr_index >= prev_attr);
      if (t.attr_index != prev_attr) expect_pos = 0;
      CHECK(t.pos_id == expect_pos);
      ++expect_pos;
      prev_attr = t.attr_index;
    }
  }
}

TEST_CASE("merge concatenates and namespaces ids") {
  Collection a{{make_record("1", {{"x", "p"}}), make_record("2", {{"x", "q"}})}, "A"};
  Collection b{{make_record("1", {{"x", "r"}}), make_record("2", {{"x", "s"}}),
                make_record("3", {{"x", "t"}})},
               "B"};
  Collection merged = merge_collections({a, b});
  REQUIRE(merged.records.size() == 5);
  CHECK(merged.records[0].id == "A:1");
  CHECK(merged.records[4].id == "B:3");
  CHECK(merged.source_tag == "A+B");
  // values byte-for-byte
  CHECK(*merged.records[2].attrs[0].value == "r");
}

TEST_CASE("merging a single collection only rewrites ids") {
  Collection a{{make_record("7", {{"x", "v"}})}, "A"};
  Collection merged = merge_collections({a});
  REQUIRE(merged.records.size() == 1);
  CHECK(merged.records[0].id == "A:7");
  CHECK(merged.records[0].attrs == a.records[0].attrs);
}

TEST_CASE("three collections sum their sizes") {
  Collection a{{make_record("1", {{"x", "1"}})}, "m1"};
  Collection b{{make_record("1", {{"x", "2"}}), make_record("2", {{"x", "3"}})}, "m2"};
  Collection c{{make_record("1", {{"x", "4"}})}, "m3"};
  Collection merged = merge_collections({a, b, c});
  CHECK(merged.records.size() == 4);
}

TEST_CASE("duplicate (source_tag, id) is a data error") {
  Collection a{{make_record("1", {{"x", "p"}})}, "A"};
  CHECK_THROWS_AS(merge_collections({a, a}), DataError);
}

TEST_CASE("merge preserves every attribute value byte-for-byte") {
  rng::Engine g(23);
  std::vector<Collection> colls;
  std::size_t total = 0;
  for (int c = 0; c < 3; ++c) {
    Collection coll;
    coll.source_tag = "c" + std::to_string(c);
    std::size_t n = 1 + rng::index(g, 8);
    total += n;
    for (std::size_t i = 0; i < n; ++i)
      coll.records.push_back(make_record(std::to_string(i),
                                         {{"v", test::random_text(g, 3)}}));
    colls.push_back(std::move(coll));
  }
  Collection merged = merge_collections(colls);
  REQUIRE(merged.records.size() == total);
  std::size_t at = 0;
  for (const auto& coll : colls)
    for (const auto& rec : coll.records) {
      CHECK(merged.records[at].attrs == rec.attrs);
      ++at;
    }
}

}  // TEST_SUITE
