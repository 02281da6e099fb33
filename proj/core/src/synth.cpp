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

#include "blockkit/synth.hpp"

#include <string>
#include <vector>

#include "blockkit/errors.hpp"
#include "blockkit/paraphrase.hpp"
#include "blockkit/rng.hpp"

namespace blockkit {

namespace {

std::string random_word(rng::Engine& rng, std::size_t min_len, std::size_t max_len) {
  static const char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz";
  std::size_t len = min_len + rng::index(rng, max_len - min_len + 1);
  std::string w;
  w.reserve(len);
  for (std::size_t i = 0; i < len; ++i) w.push_back(kAlphabet[rng::index(rng, 26)]);
  return w;
}

std::string model_code(rng::Engine& rng) {
  static const char kLetters[] = "abcdefghijklmnopqrstuvwxyz";
  static const char kDigits[] = "0123456789";
  std::string code;
  code.push_back(kLetters[rng::index(rng, 26)]);
  code.push_back(kLetters[rng::index(rng, 26)]);
  std::size_t digits = 3 + rng::index(rng, 3);
  for (std::size_t i = 0; i < digits; ++i)
    code.push_back(kDigits[rng::index(rng, 10)]);
  return code;
}

std::vector<std::string> make_pool(rng::Engine& rng, std::size_t size,
                                   std::size_t min_len, std::size_t max_len) {
  std::vector<std::string> pool;
  pool.reserve(size);
  for (std::size_t i = 0; i < size; ++i)
    pool.push_back(random_word(rng, min_len, max_len));
  return pool;
}

}  // namespace

SynthResult synth_corpus(const SynthConfig& cfg) {
  if (cfg.entities < 1) throw ConfigError("synth: entities must be >= 1");
  if (cfg.copies < 1) throw ConfigError("synth: copies must be >= 1");
  if (cfg.paraphrase_prob < 0.0 || cfg.paraphrase_prob > 1.0)
    throw ConfigError("synth: paraphrase probability must be in [0,1]");

  rng::Engine rng(cfg.seed);

  // Small brand/category/filler pools create heavy cross-entity token
  // overlap (hard negatives); name tokens and the model code carry the
  // identity signal.
  std::vector<std::string> name_pool = make_pool(rng, 2500, 4, 9);
  std::vector<std::string> brand_pool = make_pool(rng, 12, 4, 8);
  std::vector<std::string> category_pool = make_pool(rng, 8, 5, 9);
  std::vector<std::string> filler_pool = make_pool(rng, 80, 3, 8);

  ParaphraseConfig pcfg = default_paraphrase_config();
  pcfg.action_prob = cfg.paraphrase_prob;
  pcfg.token_dictionary = filler_pool;
  pcfg.attr_name_pool = {"title", "brand", "category", "description"};

  SynthResult out;
  out.corpus.source_tag = "synth";
  out.corpus.records.reserve(static_cast<std::size_t>(cfg.entities) * cfg.copies);

  for (int e = 0; e < cfg.entities; ++e) {
    Record base;
    std::string title = name_pool[rng::index(rng, name_pool.size())];
    title += " " + name_pool[rng::index(rng, name_pool.size())];
    title += " " + name_pool[rng::index(rng, name_pool.size())];
    title += " " + model_code(rng);
    std::string desc = filler_pool[rng::index(rng, filler_pool.size())];
    for (int w = 1; w < 6; ++w)
      desc += " " + filler_pool[rng::index(rng, filler_pool.size())];

    base.attrs = {
        {"title", title},
        {"brand", brand_pool[rng::index(rng, brand_pool.size())]},
        {"category", category_pool[rng::index(rng, category_pool.size())]},
        {"description", desc},
    };

    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(cfg.copies));
    for (int c = 0; c < cfg.copies; ++c) {
      Record copy = literal_paraphrase(base, pcfg, rng);
      copy.id = "e" + std::to_string(e) + "c" + std::to_string(c);
      ids.push_back(copy.id);
      out.corpus.records.push_back(std::move(copy));
    }
    for (std::size_t i = 0; i + 1 < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j)
        out.gold.add(ids[i], ids[j]);
  }
  return out;
}

}  // namespace blockkit
