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

#include "blockkit/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "blockkit/errors.hpp"
#include "blockkit/tokenize.hpp"

namespace blockkit {

namespace {

double softplus(double x) {
  // log(1 + e^x) without overflow on either side.
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

void validate_loss_config(const LossConfig& cfg) {
  if (cfg.gamma <= 0.0) throw ConfigError("circle loss: gamma must be positive");
}

}  // namespace

CircleLossResult circle_loss_from_sims(const std::vector<double>& sims,
                                       const std::vector<std::uint8_t>& pos_mask,
                                       std::size_t n, const LossConfig& cfg) {
  validate_loss_config(cfg);
  if (sims.size() != n * n || pos_mask.size() != n * n)
    throw std::invalid_argument("circle_loss: matrix size mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (!pos_mask[i * n + i])
      throw std::invalid_argument("circle_loss: pos_mask diagonal must be set");

  const double gamma = cfg.gamma;
  CircleLossResult out;
  out.grad_sims.assign(n * n, 0.0);

  // Per anchor i the inner double sum factorizes:
  //   sum_j sum_k exp(g(s_n^k - s_p^j + m)) = e^{gm} (sum_k e^{g s_n}) (sum_j e^{-g s_p})
  // so with A = lse_k(g s_n), B = lse_j(-g s_p):
  //   L_i = softplus(gm + A + B)
  //   dL_i/ds_n^k =  sigmoid(.) * g * softmax_k,  dL_i/ds_p^j = -sigmoid(.) * g * softmax_j
  for (std::size_t i = 0; i < n; ++i) {
    const double* s = sims.data() + i * n;
    const std::uint8_t* mask = pos_mask.data() + i * n;

    double max_neg = -std::numeric_limits<double>::infinity();
    double max_pos = -std::numeric_limits<double>::infinity();
    std::size_t negatives = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask[j]) {
        max_pos = std::max(max_pos, -gamma * s[j]);
      } else {
        ++negatives;
        max_neg = std::max(max_neg, gamma * s[j]);
      }
    }
    if (negatives == 0) continue;  // log(1) = 0, no gradient

    double sum_neg = 0.0, sum_pos = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask[j])
        sum_pos += std::exp(-gamma * s[j] - max_pos);
      else
        sum_neg += std::exp(gamma * s[j] - max_neg);
    }
    double lse_neg = max_neg + std::log(sum_neg);
    double lse_pos = max_pos + std::log(sum_pos);
    double x = gamma * cfg.margin + lse_neg + lse_pos;

    out.loss += softplus(x);
    double sig = sigmoid(x);
    double* g = out.grad_sims.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask[j])
        g[j] = -sig * gamma * std::exp(-gamma * s[j] - lse_pos);
      else
        g[j] = sig * gamma * std::exp(gamma * s[j] - lse_neg);
    }
  }
  return out;
}

CircleLossResult circle_loss(const ContrastiveBatch& batch, const LossConfig& cfg) {
  const std::size_t n = batch.size();
  std::vector<double> sims(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      sims[i * n + j] = dot(batch.anchors[i], batch.views[j]);
  return circle_loss_from_sims(sims, batch.pos_mask, n, cfg);
}

namespace {

std::vector<std::uint8_t> make_pos_mask(const std::vector<Record>& records,
                                        const DupConfig& dcfg) {
  const std::size_t n = records.size();
  std::vector<std::uint8_t> mask(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) mask[i * n + i] = 1;
  for (auto [i, j] : detect_duplicates(records, dcfg)) {
    mask[i * n + j] = 1;
    mask[j * n + i] = 1;
  }
  return mask;
}

// Backpropagate dL/dz through normalization, pooling and dropout into the
// tables touched by one record.
void backprop_record(const EmbeddingModel& model, const PreparedRecord& rec,
                     const EncodeTrace& trace, const std::vector<double>& dldz,
                     ModelGradients& grads) {
  if (trace.zero || rec.tokens.empty()) return;
  const int dim = model.config.dim;
  const double inv_norm = 1.0 / trace.norm;

  // z = u / |u|  =>  dL/du = (dL/dz - z (z . dL/dz)) / |u|
  double z_dot_g = 0.0;
  for (int d = 0; d < dim; ++d)
    z_dot_g += (trace.pooled[d] * inv_norm) * dldz[d];
  std::vector<double> dldu(static_cast<std::size_t>(dim));
  for (int d = 0; d < dim; ++d)
    dldu[d] = (dldz[d] - trace.pooled[d] * inv_norm * z_dot_g) * inv_norm;

  const double inv_tokens = 1.0 / static_cast<double>(rec.tokens.size());
  const bool dropped = !trace.keep.empty();
  const double keep_scale = 1.0 / (1.0 - model.config.dropout_p);

  if (grads.pos_grads.empty())
    grads.pos_grads.assign(
        static_cast<std::size_t>(model.config.max_pos) * dim, 0.0);

  std::vector<double> g_tok(static_cast<std::size_t>(dim));
  for (std::size_t t = 0; t < rec.tokens.size(); ++t) {
    const PreparedToken& pt = rec.tokens[t];
    for (int d = 0; d < dim; ++d) {
      double g = dldu[d] * inv_tokens;
      if (dropped) g = trace.keep[t * dim + d] ? g * keep_scale : 0.0;
      g_tok[d] = g;
    }

    auto& trow = grads.token_grads[pt.token_bucket];
    if (trow.empty()) trow.assign(static_cast<std::size_t>(dim), 0.0);
    for (int d = 0; d < dim; ++d) trow[d] += g_tok[d];

    const auto& name_buckets = rec.attr_word_buckets[pt.attr_index];
    if (!name_buckets.empty()) {
      double inv_names = 1.0 / static_cast<double>(name_buckets.size());
      for (std::uint32_t b : name_buckets) {
        auto& arow = grads.attr_grads[b];
        if (arow.empty()) arow.assign(static_cast<std::size_t>(dim), 0.0);
        for (int d = 0; d < dim; ++d) arow[d] += g_tok[d] * inv_names;
      }
    }

    double* prow = grads.pos_grads.data() +
                   static_cast<std::size_t>(pt.pos_row) * dim;
    for (int d = 0; d < dim; ++d) prow[d] += g_tok[d];
  }
}

}  // namespace

ContrastiveBatch build_contrastive_batch(const std::vector<Record>& records,
                                         const EmbeddingModel& model,
                                         const ParaphraseConfig& pcfg,
                                         const DupConfig& dcfg,
                                         rng::Engine& rng) {
  if (records.size() < 2)
    throw std::invalid_argument("build_contrastive_batch: need at least 2 records");

  ContrastiveBatch batch;
  const int max_seq = model.config.max_seq_len;

  std::vector<Record> views;
  views.reserve(records.size());
  for (const auto& rec : records)
    views.push_back(literal_paraphrase(rec, pcfg, rng));

  batch.anchors.reserve(records.size());
  for (const auto& rec : records)
    batch.anchors.push_back(encode(model, serialize_record(rec, max_seq),
                                   EncodeMode::train, rng));
  batch.views.reserve(views.size());
  for (const auto& rec : views)
    batch.views.push_back(encode(model, serialize_record(rec, max_seq),
                                 EncodeMode::train, rng));

  batch.pos_mask = make_pos_mask(records, dcfg);
  return batch;
}

double forward_backward(const EmbeddingModel& model,
                        const std::vector<PreparedRecord>& anchors,
                        const std::vector<PreparedRecord>& views,
                        const std::vector<std::uint8_t>& pos_mask,
                        const LossConfig& lcfg, EncodeMode mode,
                        rng::Engine& rng, ModelGradients* grads) {
  const std::size_t n = anchors.size();
  const int dim = model.config.dim;

  std::vector<RecordVector> z(n), zp(n);
  std::vector<EncodeTrace> z_trace(n), zp_trace(n);
  for (std::size_t i = 0; i < n; ++i)
    z[i] = encode_prepared(model, anchors[i], mode, rng, &z_trace[i]);
  for (std::size_t j = 0; j < n; ++j)
    zp[j] = encode_prepared(model, views[j], mode, rng, &zp_trace[j]);

  std::vector<double> sims(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) sims[i * n + j] = dot(z[i], zp[j]);

  CircleLossResult res = circle_loss_from_sims(sims, pos_mask, n, lcfg);
  if (!grads) return res.loss;

  // d loss / d z_i = sum_j g_ij z'_j ; d loss / d z'_j = sum_i g_ij z_i
  std::vector<double> dldz(static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(dldz.begin(), dldz.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double g = res.grad_sims[i * n + j];
      if (g == 0.0) continue;
      for (int d = 0; d < dim; ++d) dldz[d] += g * zp[j].values[d];
    }
    backprop_record(model, anchors[i], z_trace[i], dldz, *grads);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(dldz.begin(), dldz.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double g = res.grad_sims[i * n + j];
      if (g == 0.0) continue;
      for (int d = 0; d < dim; ++d) dldz[d] += g * z[i].values[d];
    }
    backprop_record(model, views[j], zp_trace[j], dldz, *grads);
  }
  return res.loss;
}

namespace {

void fill_corpus_defaults(ParaphraseConfig& pcfg, const Collection& corpus) {
  if (pcfg.token_dictionary.empty()) {
    std::map<std::string, double> counts;
    for (const auto& rec : corpus.records)
      for (const auto& tok : word_tokens(record_text(rec))) counts[tok] += 1.0;
    pcfg.token_dictionary.reserve(counts.size());
    pcfg.token_weights.reserve(counts.size());
    for (auto& [tok, cnt] : counts) {
      pcfg.token_dictionary.push_back(tok);
      pcfg.token_weights.push_back(cnt);
    }
  }
  if (pcfg.attr_name_pool.empty()) {
    std::map<std::string, bool> names;
    for (const auto& rec : corpus.records)
      for (const auto& attr : rec.attrs) names[attr.name] = true;
    for (auto& [name, _] : names) pcfg.attr_name_pool.push_back(name);
  }
}

void apply_gradients(EmbeddingModel& model, const ModelGradients& grads,
                     double lr) {
  const int dim = model.config.dim;
  for (const auto& [bucket, g] : grads.token_grads) {
    double* row = model.token_table.data() + static_cast<std::size_t>(bucket) * dim;
    for (int d = 0; d < dim; ++d) row[d] -= lr * g[d];
  }
  for (const auto& [bucket, g] : grads.attr_grads) {
    double* row = model.attr_table.data() + static_cast<std::size_t>(bucket) * dim;
    for (int d = 0; d < dim; ++d) row[d] -= lr * g[d];
  }
  if (!grads.pos_grads.empty())
    for (std::size_t i = 0; i < grads.pos_grads.size(); ++i)
      model.pos_table[i] -= lr * grads.pos_grads[i];
}

}  // namespace

TrainResult train(const Collection& corpus, const TrainConfig& tcfg,
                  const LossConfig& lcfg, const EncoderConfig& ecfg) {
  validate_loss_config(lcfg);
  if (tcfg.batch_size < 2) throw ConfigError("train: batch_size must be >= 2");
  if (corpus.records.size() < static_cast<std::size_t>(tcfg.batch_size))
    throw ConfigError("train: corpus smaller than batch_size");
  if (tcfg.steps < 0) throw ConfigError("train: steps must be >= 0");
  if (tcfg.learning_rate <= 0.0) throw ConfigError("train: learning_rate must be positive");
  if (tcfg.paraphrase.action_prob < 0.0 || tcfg.paraphrase.action_prob > 1.0)
    throw ConfigError("train: paraphrase action_prob must be in [0,1]");

  TrainResult result;
  result.model = init_model(ecfg);
  result.loss_curve.reserve(static_cast<std::size_t>(tcfg.steps));

  ParaphraseConfig pcfg = tcfg.paraphrase;
  fill_corpus_defaults(pcfg, corpus);

  // Anchor serializations never change; prepare them once.
  const std::size_t n = corpus.records.size();
  std::vector<PreparedRecord> anchor_prep(n);
  for (std::size_t i = 0; i < n; ++i)
    anchor_prep[i] =
        prepare_record(ecfg, serialize_record(corpus.records[i], ecfg.max_seq_len));

  rng::Engine rng(tcfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = n;  // force a shuffle before the first batch

  const std::size_t batch = static_cast<std::size_t>(tcfg.batch_size);
  for (int step = 0; step < tcfg.steps; ++step) {
    if (cursor + batch > n) {
      rng::shuffle(rng, order);
      cursor = 0;
    }

    std::vector<Record> batch_records;
    std::vector<PreparedRecord> anchors;
    batch_records.reserve(batch);
    anchors.reserve(batch);
    for (std::size_t b = 0; b < batch; ++b) {
      batch_records.push_back(corpus.records[order[cursor + b]]);
      anchors.push_back(anchor_prep[order[cursor + b]]);
    }
    cursor += batch;

    std::vector<PreparedRecord> views;
    views.reserve(batch);
    for (const auto& rec : batch_records)
      views.push_back(prepare_record(
          ecfg, serialize_record(literal_paraphrase(rec, pcfg, rng),
                                 ecfg.max_seq_len)));

    std::vector<std::uint8_t> pos_mask = make_pos_mask(batch_records, tcfg.dup);

    ModelGradients grads;
    double loss = forward_backward(result.model, anchors, views, pos_mask, lcfg,
                                   EncodeMode::train, rng, &grads);
    if (!std::isfinite(loss))
      throw NumericError("train: non-finite loss at step " +
                         std::to_string(step + 1) + " (value " +
                         std::to_string(loss) + ")");
    // The optimizer steps on the batch-mean gradient; the curve reports the
    // summed batch loss.
    apply_gradients(result.model, grads,
                    tcfg.learning_rate / static_cast<double>(batch));
    result.loss_curve.push_back(loss);
  }
  return result;
}

}  // namespace blockkit
