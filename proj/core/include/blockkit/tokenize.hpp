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
#include <string>
#include <string_view>
#include <vector>

namespace blockkit {

struct Collection;

enum class TokenizerKind { word, qgram };

struct TokenizerScheme {
  TokenizerKind kind = TokenizerKind::word;
  int q = 3;  // q-gram width, used only when kind == qgram
};

/// Word tokens: lowercase maximal alphanumeric runs. Non-ASCII code points
/// count as letters and are passed through unchanged; ASCII letters are
/// lowercased.
std::vector<std::string> word_tokens(std::string_view text);

/// Tokenize under a scheme. q-grams are taken over the lowercased,
/// whitespace-normalized string; an input shorter than q (but non-empty)
/// yields the whole string as its single token. Empty input yields no tokens.
std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerScheme& scheme);

struct CorpusTokenStats {
  double avg_tokens_per_record = 0.0;
  std::size_t unique_token_count = 0;
  // Mean, over records, of how many other records share at least one token.
  double avg_overlapping_records = 0.0;
};

/// Exact corpus statistics over each record's concatenated non-null values.
CorpusTokenStats corpus_token_stats(const Collection& coll,
                                    const TokenizerScheme& scheme);

// UTF-8 helpers shared with paraphrasing and similarity. Invalid bytes are
// decoded as U+FFFD.
std::vector<char32_t> utf8_decode(std::string_view s);
void utf8_append(std::string& out, char32_t cp);
std::string utf8_encode(const std::vector<char32_t>& cps);

/// Trim leading/trailing whitespace and collapse interior runs to one space.
std::string normalize_whitespace(std::string_view s);

}  // namespace blockkit
