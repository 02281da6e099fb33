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

#include "blockkit/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "blockkit/tokenize.hpp"

namespace blockkit {

double SimilarityVector::max() const {
  return std::max({lev_norm, jaccard_word, jaccard_3gram, tf_cosine});
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<char32_t> s = utf8_decode(a);
  std::vector<char32_t> t = utf8_decode(b);
  if (s.empty()) return t.size();
  if (t.empty()) return s.size();

  std::vector<std::size_t> prev(t.size() + 1), curr(t.size() + 1);
  for (std::size_t j = 0; j <= t.size(); ++j) prev[j] = j;
  for (std::size_t i = 0; i < s.size(); ++i) {
    curr[0] = i + 1;
    for (std::size_t j = 0; j < t.size(); ++j) {
      std::size_t cost = (s[i] == t[j]) ? 0 : 1;
      curr[j + 1] = std::min({curr[j] + 1, prev[j + 1] + 1, prev[j] + cost});
    }
    prev.swap(curr);
  }
  return prev[t.size()];
}

namespace {

// Banded Levenshtein: exact when the distance is <= max_dist, otherwise
// returns max_dist + 1. Lets batch duplicate detection skip the full
// quadratic DP for clearly dissimilar texts.
std::size_t levenshtein_bounded(const std::vector<char32_t>& s,
                                const std::vector<char32_t>& t,
                                std::size_t max_dist) {
  const std::size_t n = s.size(), m = t.size();
  const std::size_t big = max_dist + 1;
  if (n > m + max_dist || m > n + max_dist) return big;
  if (n == 0) return m;
  if (m == 0) return n;

  std::vector<std::size_t> prev(m + 1, big), curr(m + 1, big);
  for (std::size_t j = 0; j <= std::min(m, max_dist); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    std::size_t lo = (i > max_dist) ? i - max_dist : 1;
    std::size_t hi = std::min(m, i + max_dist);
    std::fill(curr.begin(), curr.end(), big);
    curr[0] = (i <= max_dist) ? i : big;
    std::size_t row_min = curr[0];
    for (std::size_t j = lo; j <= hi; ++j) {
      std::size_t cost = (s[i - 1] == t[j - 1]) ? 0 : 1;
      std::size_t best = prev[j - 1] + cost;
      best = std::min(best, prev[j] + 1);
      best = std::min(best, curr[j - 1] + 1);
      curr[j] = std::min(best, big);
      row_min = std::min(row_min, curr[j]);
    }
    if (row_min >= big) return big;
    prev.swap(curr);
  }
  return std::min(prev[m], big);
}

double jaccard(const std::unordered_set<std::string>& a,
               const std::unordered_set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  std::size_t inter = 0;
  for (const auto& x : small)
    if (large.count(x)) ++inter;
  return static_cast<double>(inter) /
         static_cast<double>(a.size() + b.size() - inter);
}

using TfVector = std::unordered_map<std::string, std::uint32_t>;

TfVector term_frequencies(const std::vector<std::string>& toks) {
  TfVector tf;
  for (const auto& t : toks) ++tf[t];
  return tf;
}

double tf_cosine(const TfVector& a, const TfVector& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  double dot = 0.0;
  for (const auto& [tok, cnt] : small) {
    auto it = large.find(tok);
    if (it != large.end())
      dot += static_cast<double>(cnt) * static_cast<double>(it->second);
  }
  double na = 0.0, nb = 0.0;
  for (const auto& [tok, cnt] : a) na += static_cast<double>(cnt) * cnt;
  for (const auto& [tok, cnt] : b) nb += static_cast<double>(cnt) * cnt;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::unordered_set<std::string> token_set(const std::vector<std::string>& toks) {
  return {toks.begin(), toks.end()};
}

}  // namespace

SimilarityVector string_similarities(std::string_view a, std::string_view b) {
  SimilarityVector sim;

  std::size_t la = utf8_decode(a).size(), lb = utf8_decode(b).size();
  if (la == 0 && lb == 0) {
    sim.lev_norm = 1.0;
  } else {
    sim.lev_norm = 1.0 - static_cast<double>(levenshtein(a, b)) /
                             static_cast<double>(std::max(la, lb));
  }

  TokenizerScheme grams{TokenizerKind::qgram, 3};
  sim.jaccard_word = jaccard(token_set(word_tokens(a)), token_set(word_tokens(b)));
  sim.jaccard_3gram = jaccard(token_set(tokenize(a, grams)), token_set(tokenize(b, grams)));
  sim.tf_cosine = tf_cosine(term_frequencies(word_tokens(a)),
                            term_frequencies(word_tokens(b)));
  return sim;
}

std::set<std::pair<std::size_t, std::size_t>> detect_duplicates(
    const std::vector<Record>& batch, const DupConfig& cfg) {
  if (batch.size() < 2)
    throw std::invalid_argument("detect_duplicates: batch size must be >= 2");
  if (cfg.threshold < 0.0 || cfg.threshold > 1.0)
    throw std::invalid_argument("detect_duplicates: threshold must be in [0,1]");

  const std::size_t n = batch.size();
  const double s = cfg.threshold;
  TokenizerScheme grams{TokenizerKind::qgram, 3};

  struct Prepared {
    std::string text;
    std::vector<char32_t> cps;
    std::unordered_set<std::string> words, grams;
    TfVector tf;
  };
  std::vector<Prepared> prep(n);
  for (std::size_t i = 0; i < n; ++i) {
    prep[i].text = record_text(batch[i]);
    prep[i].cps = utf8_decode(prep[i].text);
    auto toks = word_tokens(prep[i].text);
    prep[i].words = token_set(toks);
    prep[i].grams = token_set(tokenize(prep[i].text, grams));
    prep[i].tf = term_frequencies(toks);
  }

  std::set<std::pair<std::size_t, std::size_t>> dups;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = prep[i];
      const auto& b = prep[j];
      // Cheap set/vector measures first; Levenshtein only when they miss.
      if (jaccard(a.words, b.words) >= s || jaccard(a.grams, b.grams) >= s ||
          tf_cosine(a.tf, b.tf) >= s) {
        dups.emplace(i, j);
        continue;
      }
      std::size_t maxlen = std::max(a.cps.size(), b.cps.size());
      if (maxlen == 0) {  // both empty: lev_norm = 1
        dups.emplace(i, j);
        continue;
      }
      // lev_norm >= s  <=>  distance <= budget. The budget is nudged so the
      // integer cutoff matches the floating-point comparison bit for bit.
      auto ml = static_cast<double>(maxlen);
      auto budget = static_cast<std::size_t>((1.0 - s) * ml);
      while (budget + 1 <= maxlen &&
             1.0 - static_cast<double>(budget + 1) / ml >= s)
        ++budget;
      while (budget > 0 && 1.0 - static_cast<double>(budget) / ml < s)
        --budget;
      if (levenshtein_bounded(a.cps, b.cps, budget) <= budget)
        dups.emplace(i, j);
    }
  }
  return dups;
}

}  // namespace blockkit
