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

#include "blockkit/paraphrase.hpp"

#include <algorithm>
#include <cmath>

#include "blockkit/tokenize.hpp"

namespace blockkit {

namespace {

const char* const kQwertyRows[] = {"qwertyuiop", "asdfghjkl", "zxcvbnm"};

void add_neighbor(std::map<char32_t, std::vector<std::u32string>>& m,
                  char32_t key, char32_t val) {
  m[key].push_back(std::u32string(1, val));
}

std::size_t weighted_index(const std::vector<double>& cumulative,
                           rng::Engine& rng) {
  double x = rng::uniform01(rng) * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
  std::size_t i = static_cast<std::size_t>(it - cumulative.begin());
  return std::min(i, cumulative.size() - 1);
}

// Dictionary sampler honoring optional weights.
struct DictSampler {
  const std::vector<std::string>* words = nullptr;
  std::vector<double> cumulative;

  explicit DictSampler(const ParaphraseConfig& cfg) {
    if (cfg.token_dictionary.empty()) return;
    words = &cfg.token_dictionary;
    if (!cfg.token_weights.empty() &&
        cfg.token_weights.size() == cfg.token_dictionary.size()) {
      cumulative.reserve(cfg.token_weights.size());
      double acc = 0.0;
      for (double w : cfg.token_weights) {
        acc += std::max(w, 0.0);
        cumulative.push_back(acc);
      }
      if (acc <= 0.0) cumulative.clear();
    }
  }

  bool usable() const { return words != nullptr; }

  const std::string& sample(rng::Engine& rng) const {
    if (!cumulative.empty()) return (*words)[weighted_index(cumulative, rng)];
    return (*words)[rng::index(rng, words->size())];
  }
};

// Crop length: uniform in 1..ceil(len/2).
std::size_t crop_len(std::size_t len, rng::Engine& rng) {
  std::size_t cap = (len + 1) / 2;
  return 1 + rng::index(rng, cap);
}

}  // namespace

ParaphraseConfig default_paraphrase_config() {
  ParaphraseConfig cfg;
  for (int row = 0; row < 3; ++row) {
    const char* r = kQwertyRows[row];
    std::size_t len = std::char_traits<char>::length(r);
    for (std::size_t i = 0; i < len; ++i) {
      char32_t c = static_cast<char32_t>(r[i]);
      if (i > 0) add_neighbor(cfg.keyboard_map, c, static_cast<char32_t>(r[i - 1]));
      if (i + 1 < len) add_neighbor(cfg.keyboard_map, c, static_cast<char32_t>(r[i + 1]));
      if (row + 1 < 3) {
        const char* below = kQwertyRows[row + 1];
        std::size_t blen = std::char_traits<char>::length(below);
        if (i < blen) add_neighbor(cfg.keyboard_map, c, static_cast<char32_t>(below[i]));
      }
      if (row > 0) {
        const char* above = kQwertyRows[row - 1];
        if (i < std::char_traits<char>::length(above))
          add_neighbor(cfg.keyboard_map, c, static_cast<char32_t>(above[i]));
      }
    }
  }
  auto confuse = [&](char32_t a, std::u32string b) { cfg.ocr_map[a].push_back(std::move(b)); };
  confuse(U'0', U"O");
  confuse(U'0', U"o");
  confuse(U'O', U"0");
  confuse(U'o', U"0");
  confuse(U'1', U"l");
  confuse(U'1', U"I");
  confuse(U'l', U"1");
  confuse(U'I', U"1");
  confuse(U'5', U"S");
  confuse(U'S', U"5");
  confuse(U's', U"5");
  confuse(U'8', U"B");
  confuse(U'B', U"8");
  confuse(U'm', U"rn");
  return cfg;
}

std::string char_paraphrase(std::string_view text, const ParaphraseConfig& cfg,
                            rng::Engine& rng) {
  if (cfg.char_actions.empty() || text.empty()) return std::string(text);

  std::vector<char32_t> in = utf8_decode(text);
  std::vector<char32_t> out;
  out.reserve(in.size() + 4);
  bool touched = false;

  auto confusables = [&](char32_t c) {
    std::vector<const std::u32string*> cands;
    if (auto it = cfg.keyboard_map.find(c); it != cfg.keyboard_map.end())
      for (const auto& s : it->second) cands.push_back(&s);
    if (auto it = cfg.ocr_map.find(c); it != cfg.ocr_map.end())
      for (const auto& s : it->second) cands.push_back(&s);
    return cands;
  };

  for (std::size_t i = 0; i < in.size(); ++i) {
    char32_t c = in[i];
    if (!rng::chance(rng, cfg.action_prob)) {
      out.push_back(c);
      continue;
    }
    CharAction action =
        cfg.char_actions[rng::index(rng, cfg.char_actions.size())];
    switch (action) {
      case CharAction::substitute: {
        auto cands = confusables(c);
        if (cands.empty()) {
          out.push_back(c);  // nothing to substitute with
          break;
        }
        const std::u32string& rep = *cands[rng::index(rng, cands.size())];
        out.insert(out.end(), rep.begin(), rep.end());
        touched = true;
        break;
      }
      case CharAction::insert: {
        out.push_back(c);
        auto cands = confusables(c);
        if (cands.empty()) {
          out.push_back(c);  // doubled character
        } else {
          const std::u32string& rep = *cands[rng::index(rng, cands.size())];
          out.insert(out.end(), rep.begin(), rep.end());
        }
        touched = true;
        break;
      }
      case CharAction::swap:
        if (i + 1 < in.size()) {
          out.push_back(in[i + 1]);
          out.push_back(c);
          ++i;  // the partner is consumed
          touched = true;
        } else {
          out.push_back(c);
        }
        break;
      case CharAction::erase:
        touched = true;
        break;
    }
  }
  if (!touched) return std::string(text);
  return utf8_encode(out);
}

std::vector<std::string> token_paraphrase(const std::vector<std::string>& tokens,
                                          const ParaphraseConfig& cfg,
                                          rng::Engine& rng) {
  if (cfg.token_actions.empty()) return tokens;
  DictSampler dict(cfg);
  std::vector<TokenAction> actions;
  for (TokenAction a : cfg.token_actions) {
    if ((a == TokenAction::substitute || a == TokenAction::insert) && !dict.usable())
      continue;
    actions.push_back(a);
  }
  if (actions.empty()) return tokens;

  std::vector<std::string> out;
  out.reserve(tokens.size() + 2);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& tok = tokens[i];
    if (!rng::chance(rng, cfg.action_prob)) {
      out.push_back(tok);
      continue;
    }
    switch (actions[rng::index(rng, actions.size())]) {
      case TokenAction::substitute:
        out.push_back(dict.sample(rng));
        break;
      case TokenAction::insert:
        out.push_back(tok);
        out.push_back(dict.sample(rng));
        break;
      case TokenAction::split: {
        std::vector<char32_t> cps = utf8_decode(tok);
        if (cps.size() < 2) {
          out.push_back(tok);
          break;
        }
        std::size_t cut = 1 + rng::index(rng, cps.size() - 1);
        out.push_back(utf8_encode({cps.begin(), cps.begin() + cut}));
        out.push_back(utf8_encode({cps.begin() + cut, cps.end()}));
        break;
      }
      case TokenAction::crop: {
        std::vector<char32_t> cps = utf8_decode(tok);
        if (cps.empty()) {
          out.push_back(tok);
          break;
        }
        std::size_t cut = crop_len(cps.size(), rng);
        bool prefix = rng::chance(rng, 0.5);
        std::vector<char32_t> kept =
            prefix ? std::vector<char32_t>(cps.begin() + cut, cps.end())
                   : std::vector<char32_t>(cps.begin(), cps.end() - cut);
        if (!kept.empty()) out.push_back(utf8_encode(kept));
        break;
      }
      case TokenAction::swap:
        if (i + 1 < tokens.size()) {
          out.push_back(tokens[i + 1]);
          out.push_back(tok);
          ++i;
        } else {
          out.push_back(tok);
        }
        break;
      case TokenAction::erase:
        break;
    }
  }
  return out;
}

Record cell_paraphrase(const Record& rec, const ParaphraseConfig& cfg,
                       rng::Engine& rng) {
  Record out = rec;
  if (cfg.cell_actions.empty()) return out;
  std::vector<CellAction> actions;
  for (CellAction a : cfg.cell_actions) {
    if (a == CellAction::substitute_name && cfg.attr_name_pool.empty()) continue;
    actions.push_back(a);
  }
  if (actions.empty()) return out;

  for (auto& attr : out.attrs) {
    if (!rng::chance(rng, cfg.action_prob)) continue;
    switch (actions[rng::index(rng, actions.size())]) {
      case CellAction::substitute_name: {
        // Names must stay unique within the record; only pool entries not
        // already in use are eligible.
        std::vector<const std::string*> candidates;
        for (const auto& name : cfg.attr_name_pool) {
          bool taken = false;
          for (const auto& other : out.attrs)
            if (other.name == name) {
              taken = true;
              break;
            }
          if (!taken) candidates.push_back(&name);
        }
        if (!candidates.empty())
          attr.name = *candidates[rng::index(rng, candidates.size())];
        break;
      }
      case CellAction::crop_value: {
        if (is_null_value(attr.value)) break;
        // Split on whitespace to keep untouched tokens byte-identical.
        std::vector<std::string> toks;
        std::string cur;
        for (char ch : *attr.value) {
          if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') {
            if (!cur.empty()) toks.push_back(std::move(cur));
            cur.clear();
          } else {
            cur.push_back(ch);
          }
        }
        if (!cur.empty()) toks.push_back(std::move(cur));
        if (toks.empty()) break;
        std::size_t cut = crop_len(toks.size(), rng);
        toks.resize(toks.size() - cut);
        if (toks.empty()) {
          attr.value.reset();
        } else {
          std::string joined = toks[0];
          for (std::size_t i = 1; i < toks.size(); ++i) {
            joined.push_back(' ');
            joined += toks[i];
          }
          attr.value = std::move(joined);
        }
        break;
      }
      case CellAction::erase_value:
        attr.value.reset();
        break;
    }
  }
  return out;
}

Record literal_paraphrase(const Record& rec, const ParaphraseConfig& cfg,
                          rng::Engine& rng) {
  Record out = cell_paraphrase(rec, cfg, rng);
  for (auto& attr : out.attrs) {
    if (is_null_value(attr.value)) continue;

    // Token pass over whitespace-separated chunks; byte-exact when no
    // action fires.
    std::vector<std::string> toks;
    std::string cur;
    for (char ch : *attr.value) {
      if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') {
        if (!cur.empty()) toks.push_back(std::move(cur));
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    if (!cur.empty()) toks.push_back(std::move(cur));

    std::vector<std::string> replaced = token_paraphrase(toks, cfg, rng);
    std::string value;
    if (replaced == toks) {
      value = *attr.value;
    } else if (replaced.empty()) {
      attr.value.reset();
      continue;
    } else {
      value = replaced[0];
      for (std::size_t i = 1; i < replaced.size(); ++i) {
        value.push_back(' ');
        value += replaced[i];
      }
    }

    std::string corrupted = char_paraphrase(value, cfg, rng);
    if (corrupted.empty()) {
      attr.value.reset();
    } else {
      attr.value = std::move(corrupted);
    }
  }
  return out;
}

}  // namespace blockkit
