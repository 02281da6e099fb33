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
#include <utility>
#include <vector>

#include "blockkit/records.hpp"
#include "blockkit/rng.hpp"

namespace blockkit::test {

using OptStr = std::optional<std::string>;

inline Record make_record(std::string id,
                          std::vector<std::pair<std::string, OptStr>> attrs) {
  Record rec;
  rec.id = std::move(id);
  for (auto& [name, value] : attrs) rec.attrs.push_back({name, value});
  return rec;
}

inline std::string random_word(rng::Engine& g, std::size_t min_len,
                               std::size_t max_len) {
  static const char kAlpha[] = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::size_t len = min_len + rng::index(g, max_len - min_len + 1);
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w.push_back(kAlpha[rng::index(g, 36)]);
  return w;
}

inline std::string random_text(rng::Engine& g, std::size_t words) {
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    if (!out.empty()) out.push_back(' ');
    out += random_word(g, 2, 8);
  }
  return out;
}

}  // namespace blockkit::test
