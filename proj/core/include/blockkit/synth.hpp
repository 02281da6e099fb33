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

#include "blockkit/eval.hpp"
#include "blockkit/records.hpp"

namespace blockkit {

// Gold-labeled desk-scale benchmark: E base entities, each emitted as
// `copies` independently paraphrase-corrupted records. Every record pair
// within an entity cluster is a gold match.
struct SynthConfig {
  int entities = 500;
  int copies = 2;
  std::uint64_t seed = 0;
  double paraphrase_prob = 0.1;  // elevated over the training default
};

struct SynthResult {
  Collection corpus;  // ids "e<entity>c<copy>"
  GoldMatches gold;
};

SynthResult synth_corpus(const SynthConfig& cfg);

}  // namespace blockkit
