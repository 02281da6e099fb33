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

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "blockkit/records.hpp"
#include "blockkit/rng.hpp"

namespace blockkit {

enum class CharAction { substitute, insert, swap, erase };
enum class TokenAction { substitute, insert, split, crop, swap, erase };
enum class CellAction { substitute_name, crop_value, erase_value };

struct ParaphraseConfig {
  // Probability of corrupting each unit (character / token / attribute).
  double action_prob = 0.01;

  // Replacement candidates per code point. Keyboard entries are single
  // characters; OCR entries may be multi-character confusions (m -> "rn").
  std::map<char32_t, std::vector<std::u32string>> keyboard_map;
  std::map<char32_t, std::vector<std::u32string>> ocr_map;

  // Words for token substitute/insert. Optional parallel weights enable
  // frequency-weighted sampling; empty means uniform.
  std::vector<std::string> token_dictionary;
  std::vector<double> token_weights;

  // Attribute names for the cell-level substitute action.
  std::vector<std::string> attr_name_pool;

  std::uint64_t seed = 0;

  // Enabled actions per level; defaults cover the full set. Tests narrow
  // these to exercise a single action.
  std::vector<CharAction> char_actions = {CharAction::substitute,
                                          CharAction::insert, CharAction::swap,
                                          CharAction::erase};
  std::vector<TokenAction> token_actions = {
      TokenAction::substitute, TokenAction::insert, TokenAction::split,
      TokenAction::crop,       TokenAction::swap,   TokenAction::erase};
  std::vector<CellAction> cell_actions = {CellAction::substitute_name,
                                          CellAction::crop_value,
                                          CellAction::erase_value};
};

/// QWERTY adjacency plus common OCR confusions (0/O, 1/l/I, 5/S, 8/B, m/rn).
ParaphraseConfig default_paraphrase_config();

/// Each character independently suffers one enabled action with probability
/// action_prob: substitute by a keyboard/OCR confusable, insert a confusable
/// after it, swap with the next character (which is then consumed), or
/// delete. Returns the input byte-for-byte when no action fires.
std::string char_paraphrase(std::string_view text, const ParaphraseConfig& cfg,
                            rng::Engine& rng);

/// Per-token actions: dictionary substitute/insert (disabled when the
/// dictionary is empty), split at a random interior point, crop a random
/// prefix or suffix of 1..ceil(len/2) characters, swap with the next token,
/// or delete.
std::vector<std::string> token_paraphrase(const std::vector<std::string>& tokens,
                                          const ParaphraseConfig& cfg,
                                          rng::Engine& rng);

/// Per-attribute actions: substitute the name from the configured pool
/// (disabled when the pool is empty), crop a token-suffix off the value, or
/// null the value. Attribute count is preserved.
Record cell_paraphrase(const Record& rec, const ParaphraseConfig& cfg,
                       rng::Engine& rng);

/// Cell-level, then token-level, then character-level paraphrasing of a
/// record. Values untouched by any action are preserved byte-for-byte.
Record literal_paraphrase(const Record& rec, const ParaphraseConfig& cfg,
                          rng::Engine& rng);

}  // namespace blockkit
