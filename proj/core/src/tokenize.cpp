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

#include "blockkit/tokenize.hpp"

#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "blockkit/errors.hpp"
#include "blockkit/records.hpp"

namespace blockkit {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

inline bool is_ascii_alnum(char32_t c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

// Token characters: ASCII alphanumerics plus every non-ASCII code point.
inline bool is_token_char(char32_t c) { return is_ascii_alnum(c) || c > 127; }

inline char32_t ascii_lower(char32_t c) {
  return (c >= 'A' && c <= 'Z') ? c + 32 : c;
}

inline bool is_space(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

}  // namespace

std::vector<char32_t> utf8_decode(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + len > s.size()) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = true;
    for (int j = 1; j < len; ++j) {
      unsigned char b = static_cast<unsigned char>(s[i + j]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void utf8_append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string utf8_encode(const std::vector<char32_t>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) utf8_append(out, cp);
  return out;
}

std::string normalize_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  bool any = false;
  for (char32_t cp : utf8_decode(s)) {
    if (is_space(cp)) {
      if (any) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    utf8_append(out, cp);
    any = true;
  }
  return out;
}

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char32_t cp : utf8_decode(text)) {
    if (is_token_char(cp)) {
      utf8_append(current, ascii_lower(cp));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerScheme& scheme) {
  if (scheme.kind == TokenizerKind::word) return word_tokens(text);

  if (scheme.q < 1) throw std::invalid_argument("qgram width must be >= 1");
  std::string lowered;
  for (char32_t cp : utf8_decode(text)) utf8_append(lowered, ascii_lower(cp));
  std::vector<char32_t> cps = utf8_decode(normalize_whitespace(lowered));

  std::vector<std::string> grams;
  if (cps.empty()) return grams;
  const std::size_t q = static_cast<std::size_t>(scheme.q);
  if (cps.size() < q) {
    grams.push_back(utf8_encode(cps));
    return grams;
  }
  grams.reserve(cps.size() - q + 1);
  for (std::size_t i = 0; i + q <= cps.size(); ++i) {
    std::string g;
    for (std::size_t j = 0; j < q; ++j) utf8_append(g, cps[i + j]);
    grams.push_back(std::move(g));
  }
  return grams;
}

CorpusTokenStats corpus_token_stats(const Collection& coll,
                                    const TokenizerScheme& scheme) {
  if (coll.records.empty()) throw DataError("corpus_token_stats: empty collection");

  const std::size_t n = coll.records.size();
  std::vector<std::vector<std::string>> per_record(n);
  std::size_t total_tokens = 0;
  std::unordered_map<std::string, std::vector<std::uint32_t>> inverted;
  for (std::size_t i = 0; i < n; ++i) {
    per_record[i] = tokenize(record_text(coll.records[i]), scheme);
    total_tokens += per_record[i].size();
    std::unordered_set<std::string_view> seen;
    for (const auto& tok : per_record[i]) {
      if (seen.insert(tok).second)
        inverted[tok].push_back(static_cast<std::uint32_t>(i));
    }
  }

  // Exact overlap count: union of posting lists per record, minus itself.
  // A stamp array avoids rebuilding a set per record.
  std::vector<std::uint32_t> stamp(n, 0);
  std::uint32_t round = 0;
  double overlap_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ++round;
    std::size_t overlapping = 0;
    std::unordered_set<std::string_view> seen;
    for (const auto& tok : per_record[i]) {
      if (!seen.insert(tok).second) continue;
      for (std::uint32_t doc : inverted.at(tok)) {
        if (doc == i) continue;
        if (stamp[doc] != round) {
          stamp[doc] = round;
          ++overlapping;
        }
      }
    }
    overlap_sum += static_cast<double>(overlapping);
  }

  std::unordered_set<std::string_view> vocab;
  for (const auto& toks : per_record)
    for (const auto& tok : toks) vocab.insert(tok);

  CorpusTokenStats stats;
  stats.avg_tokens_per_record =
      static_cast<double>(total_tokens) / static_cast<double>(n);
  stats.unique_token_count = vocab.size();
  stats.avg_overlapping_records = overlap_sum / static_cast<double>(n);
  return stats;
}

}  // namespace blockkit
