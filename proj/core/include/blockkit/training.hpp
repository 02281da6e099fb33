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
#include <unordered_map>
#include <vector>

#include "blockkit/encoder.hpp"
#include "blockkit/paraphrase.hpp"
#include "blockkit/records.hpp"
#include "blockkit/similarity.hpp"

namespace blockkit {

struct LossConfig {
  double gamma = 80.0;
  double margin = 0.4;
};

// N anchors against N paraphrased views. pos_mask is row-major N x N;
// pos_mask[i][i] is always set (a record's own view), extra positives come
// from in-batch duplicate detection.
struct ContrastiveBatch {
  std::vector<RecordVector> anchors;  // Z
  std::vector<RecordVector> views;    // Z'
  std::vector<std::uint8_t> pos_mask;

  std::size_t size() const { return anchors.size(); }
  bool positive(std::size_t i, std::size_t j) const {
    return pos_mask[i * size() + j] != 0;
  }
};

struct CircleLossResult {
  double loss = 0.0;
  std::vector<double> grad_sims;  // d loss / d s_ij, row-major N x N
};

/// loss = sum_i log[1 + sum_{j in pos(i)} sum_{k in neg(i)}
///                      exp(gamma (s_n^k - s_p^j + m))]
/// computed with log-sum-exp stabilization, gradients in closed form.
/// An anchor with no negatives contributes zero loss and zero gradients.
CircleLossResult circle_loss_from_sims(const std::vector<double>& sims,
                                       const std::vector<std::uint8_t>& pos_mask,
                                       std::size_t n, const LossConfig& cfg);

/// Similarities s_ij = <z_i, z'_j> from the batch vectors, then the loss.
CircleLossResult circle_loss(const ContrastiveBatch& batch, const LossConfig& cfg);

struct TrainConfig {
  int batch_size = 128;
  int steps = 10000;  // desk-scale runs use far fewer (the CLI defaults to 500)
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
  ParaphraseConfig paraphrase;
  DupConfig dup;
};

/// Paraphrase each record into its view, encode both sides with train-mode
/// dropout, and mark positives (own view + in-batch duplicates detected on
/// the raw records).
ContrastiveBatch build_contrastive_batch(const std::vector<Record>& records,
                                         const EmbeddingModel& model,
                                         const ParaphraseConfig& pcfg,
                                         const DupConfig& dcfg,
                                         rng::Engine& rng);

// Sparse gradient of a batch loss with respect to the three tables.
struct ModelGradients {
  std::unordered_map<std::uint32_t, std::vector<double>> token_grads;
  std::unordered_map<std::uint32_t, std::vector<double>> attr_grads;
  std::vector<double> pos_grads;  // dense max_pos x dim
};

/// One forward (and optional backward) pass over a prepared batch. With
/// EncodeMode::eval this is a deterministic function of the model tables,
/// which is what the finite-difference checks differentiate. The training
/// loop runs the same path in train mode.
double forward_backward(const EmbeddingModel& model,
                        const std::vector<PreparedRecord>& anchors,
                        const std::vector<PreparedRecord>& views,
                        const std::vector<std::uint8_t>& pos_mask,
                        const LossConfig& lcfg, EncodeMode mode,
                        rng::Engine& rng, ModelGradients* grads);

struct TrainResult {
  EmbeddingModel model;
  std::vector<double> loss_curve;  // one Eq-style batch loss per step
};

/// Gradient-descent training over the corpus: batches are sampled without
/// replacement and reshuffled every epoch; each step backpropagates the
/// circle loss through the normalized mean-pooled encoder into the three
/// tables. A non-finite loss aborts with NumericError. An empty
/// token_dictionary / attr_name_pool in the paraphrase config is filled from
/// the corpus vocabulary (frequency-weighted) before training starts.
TrainResult train(const Collection& corpus, const TrainConfig& tcfg,
                  const LossConfig& lcfg, const EncoderConfig& ecfg);

}  // namespace blockkit
