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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "blockkit/blocker.hpp"
#include "blockkit/conditioning.hpp"
#include "blockkit/encoder.hpp"
#include "blockkit/errors.hpp"
#include "blockkit/eval.hpp"
#include "blockkit/io.hpp"
#include "blockkit/records.hpp"
#include "blockkit/similarity.hpp"
#include "blockkit/sparse.hpp"
#include "blockkit/synth.hpp"
#include "blockkit/tokenize.hpp"
#include "blockkit/training.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

using namespace blockkit;

std::uint64_t resolve_seed(const PipelineConfig& cfg,
                           const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("BLOCKKIT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError("BLOCKKIT_SEED is not an integer: " + std::string(env));
    }
  }
  return cfg.seed;
}

std::string file_stem(const std::string& path) {
  return fs::path(path).stem().string();
}

Collection load_collection(const std::string& path) {
  return read_records_jsonl(path, file_stem(path));
}

std::vector<Collection> load_collections(const std::vector<std::string>& paths) {
  std::vector<Collection> colls;
  std::vector<std::string> tags;
  for (const auto& path : paths) {
    std::string tag = file_stem(path);
    // Keep source tags unique so merged ids stay unambiguous.
    int suffix = 1;
    std::string candidate = tag;
    while (std::find(tags.begin(), tags.end(), candidate) != tags.end())
      candidate = tag + "_" + std::to_string(++suffix);
    tags.push_back(candidate);
    colls.push_back(read_records_jsonl(path, candidate));
  }
  return colls;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory: " + dir);
}

TokenizerScheme parse_scheme(const std::string& name, int q) {
  if (name == "word") return {TokenizerKind::word, q};
  if (name == "qgram") return {TokenizerKind::qgram, q};
  throw ConfigError("unknown tokenizer scheme '" + name + "' (word|qgram)");
}

struct ParaphraseFileFlags {
  std::string keyboard_path, ocr_path, dictionary_path;

  void apply(ParaphraseConfig& pcfg) const {
    if (!keyboard_path.empty()) load_confusion_map_json(keyboard_path, false, pcfg);
    if (!ocr_path.empty()) load_confusion_map_json(ocr_path, true, pcfg);
    if (!dictionary_path.empty()) load_token_dictionary_json(dictionary_path, pcfg);
  }
};

int cmd_condition(const std::vector<std::string>& tables,
                  const std::string& out_dir, const std::string& log_path) {
  ensure_dir(out_dir);
  ordered_json log = ordered_json::array();
  for (const auto& path : tables) {
    auto table = read_table_csv(path);
    FilterVerdict verdict = filter_table(table);
    ordered_json entry;
    entry["table"] = file_stem(path);
    entry["keep"] = verdict.keep;
    entry["reason"] = to_string(verdict.reason);
    ordered_json cols = ordered_json::array();
    for (const auto& col : table)
      cols.push_back(ordered_json{{"name", col.name},
                                  {"type", to_string(detect_column_type(col))}});
    entry["columns"] = std::move(cols);
    if (verdict.keep) {
      Collection coll = table_to_records(table, file_stem(path));
      std::string out_path = (fs::path(out_dir) / (file_stem(path) + ".jsonl")).string();
      write_records_jsonl(coll, out_path);
      entry["records"] = coll.records.size();
      entry["output"] = out_path;
    }
    std::cout << file_stem(path) << ": "
              << (verdict.keep ? "keep" : std::string("reject (") +
                                              to_string(verdict.reason) + ")")
              << "\n";
    log.push_back(std::move(entry));
  }
  if (!log_path.empty()) {
    std::ofstream out(log_path);
    if (!out) throw DataError("cannot write log: " + log_path);
    out << log.dump(2) << "\n";
  }
  return 0;
}

int cmd_stats(const std::string& coll_path, const std::string& scheme_name,
              int q, const std::string& out_path) {
  Collection coll = load_collection(coll_path);
  TokenizerScheme scheme = parse_scheme(scheme_name, q);
  CorpusTokenStats stats = corpus_token_stats(coll, scheme);

  ordered_json j;
  j["collection"] = coll.source_tag;
  j["records"] = coll.records.size();
  j["scheme"] = scheme_name;
  if (scheme.kind == TokenizerKind::qgram) j["q"] = scheme.q;
  j["avg_tokens_per_record"] = stats.avg_tokens_per_record;
  j["unique_token_count"] = stats.unique_token_count;
  j["avg_overlapping_records"] = stats.avg_overlapping_records;

  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw DataError("cannot write stats: " + out_path);
    out << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_synth(int entities, int copies, std::uint64_t seed, double prob,
              const std::string& out_dir) {
  SynthConfig cfg;
  cfg.entities = entities;
  cfg.copies = copies;
  cfg.seed = seed;
  cfg.paraphrase_prob = prob;
  SynthResult result = synth_corpus(cfg);

  ensure_dir(out_dir);
  std::string corpus_path = (fs::path(out_dir) / "corpus.jsonl").string();
  std::string gold_path = (fs::path(out_dir) / "gold.csv").string();
  write_records_jsonl(result.corpus, corpus_path);
  write_gold_csv(result.gold, gold_path);
  std::cout << "wrote " << result.corpus.records.size() << " records to "
            << corpus_path << "\n";
  std::cout << "wrote " << result.gold.size() << " gold pairs to " << gold_path
            << "\n";
  return 0;
}

int cmd_train(const std::string& coll_path, const PipelineConfig& cfg,
              std::uint64_t seed, const ParaphraseFileFlags& files,
              const std::string& model_path, const std::string& loss_path) {
  Collection corpus = load_collection(coll_path);

  EncoderConfig ecfg;
  ecfg.dim = cfg.dim;
  ecfg.vocab_buckets = cfg.vocab_buckets;
  ecfg.max_seq_len = cfg.max_seq_len;
  ecfg.dropout_p = cfg.dropout_p;
  ecfg.seed = seed;

  TrainConfig tcfg;
  tcfg.batch_size = cfg.batch_size;
  tcfg.steps = cfg.steps;
  tcfg.learning_rate = cfg.learning_rate;
  tcfg.seed = seed;
  tcfg.paraphrase = default_paraphrase_config();
  tcfg.paraphrase.action_prob = cfg.paraphrase_prob;
  tcfg.paraphrase.seed = seed;
  files.apply(tcfg.paraphrase);
  tcfg.dup.threshold = cfg.dup_threshold;

  LossConfig lcfg{cfg.gamma, cfg.margin};

  TrainResult result = train(corpus, tcfg, lcfg, ecfg);
  save_model(result.model, model_path);
  if (!loss_path.empty()) write_loss_csv(result.loss_curve, loss_path);

  std::cout << "trained " << result.loss_curve.size() << " steps on "
            << corpus.records.size() << " records\n";
  if (!result.loss_curve.empty())
    std::cout << "final loss " << result.loss_curve.back() << "\n";
  std::cout << "checkpoint written to " << model_path << "\n";
  return 0;
}

int cmd_block(const std::vector<std::string>& coll_paths,
              const std::string& vectorizer_spec, int k,
              const PipelineConfig& cfg, const std::string& out_path) {
  if (k < 1) throw ConfigError("block: --k must be >= 1");
  std::vector<Collection> colls = load_collections(coll_paths);

  RankedCandidates ranked;
  if (vectorizer_spec == "bm25") {
    TokenizerScheme scheme{TokenizerKind::qgram, cfg.q};
    ranked = bm25_block(colls, scheme, cfg.bm25, k);
  } else if (vectorizer_spec == "hashed") {
    ranked = nn_block(colls, make_hashed_vectorizer(cfg.dim, cfg.max_seq_len), k);
  } else if (vectorizer_spec.rfind("trained:", 0) == 0) {
    EmbeddingModel model = load_model(vectorizer_spec.substr(8));
    ranked = nn_block(colls, make_model_vectorizer(model), k);
  } else if (vectorizer_spec.rfind("external:", 0) == 0) {
    auto vecs = load_external_vectors(vectorizer_spec.substr(9));
    ranked = nn_block(colls, make_external_vectorizer(std::move(vecs)), k);
  } else {
    throw ConfigError("unknown vectorizer '" + vectorizer_spec +
                      "' (trained:<ckpt>|hashed|external:<file>|bm25)");
  }

  write_candidates_csv(ranked, out_path);
  std::cout << "wrote " << ranked.total_pairs() << " candidate pairs over "
            << ranked.ranks.size() << " ranks to " << out_path << "\n";
  return 0;
}

int cmd_eval(const std::string& candidates_path, const std::string& gold_path,
             const PipelineConfig& cfg, const std::string& out_path,
             const std::string& csv_path) {
  RankedCandidates ranked = read_candidates_csv(candidates_path);
  GoldMatches gold = read_gold_csv(gold_path);
  EvalReport report = protocol_report(ranked, gold, cfg.pc_threshold, cfg.k_budget);

  if (!out_path.empty()) write_report_json(report, out_path);
  if (!csv_path.empty()) write_report_csv(report, csv_path);

  std::cout << "mAP@" << report.k_budget << " = " << report.map << "\n";
  if (report.k_at_threshold) {
    const EvalRow& row = report.rows[static_cast<std::size_t>(*report.k_at_threshold - 1)];
    std::cout << "PC >= " << report.pc_threshold << " reached at k = "
              << *report.k_at_threshold << " (PC " << row.pc << ", PQ "
              << row.pq << ")\n";
  } else {
    std::cout << "PC threshold " << report.pc_threshold
              << " not reached within budget; PC@" << report.k_budget << " = "
              << report.rows.back().pc << "\n";
  }
  return 0;
}

int cmd_ensemble(const std::string& path1, const std::string& path2,
                 const std::string& out_path) {
  RankedCandidates merged =
      ensemble(read_candidates_csv(path1), read_candidates_csv(path2));
  write_candidates_csv(merged, out_path);
  std::cout << "wrote " << merged.total_pairs() << " candidate pairs over "
            << merged.ranks.size() << " ranks to " << out_path << "\n";
  return 0;
}

int cmd_compare(const std::string& path_a, const std::string& path_b) {
  EvalReport a = read_report_json(path_a);
  EvalReport b = read_report_json(path_b);
  CompareVerdict v = compare_blockers(a, b);

  const char* branch = v.branch == CompareBranch::pair_quality
                           ? "pair quality"
                           : "pair completeness";
  std::cout << "comparing on " << branch << ": a = " << v.metric_a
            << ", b = " << v.metric_b << "\n";
  switch (v.winner) {
    case Winner::a: std::cout << "winner: a (" << path_a << ")\n"; break;
    case Winner::b: std::cout << "winner: b (" << path_b << ")\n"; break;
    case Winner::tie: std::cout << "winner: tie\n"; break;
  }
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"blockkit: self-contained entity blocking engine"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "pipeline config JSON");
  std::optional<std::uint64_t> seed_flag;
  app.add_option("--seed", seed_flag, "RNG seed (overrides config and BLOCKKIT_SEED)");

  // condition
  auto* condition = app.add_subcommand("condition", "filter tables and emit record collections");
  std::vector<std::string> table_paths;
  condition->add_option("tables", table_paths, "table CSV files")->required();
  std::string cond_out_dir = ".";
  condition->add_option("--out-dir", cond_out_dir, "output directory");
  std::string cond_log;
  condition->add_option("--log", cond_log, "verdict log JSON path");

  // stats
  auto* stats = app.add_subcommand("stats", "corpus token statistics");
  std::string stats_coll;
  stats->add_option("collection", stats_coll, "records JSONL file")->required();
  std::string stats_scheme = "word";
  stats->add_option("--scheme", stats_scheme, "word|qgram");
  std::optional<int> stats_q;
  stats->add_option("--q", stats_q, "q-gram width");
  std::string stats_out;
  stats->add_option("--out", stats_out, "write JSON here instead of stdout");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a gold-labeled synthetic corpus");
  int synth_entities = 500;
  synth->add_option("--entities", synth_entities, "number of base entities");
  int synth_copies = 2;
  synth->add_option("--copies", synth_copies, "corrupted copies per entity");
  double synth_prob = 0.1;
  synth->add_option("--prob", synth_prob, "paraphrase probability");
  std::string synth_out_dir = ".";
  synth->add_option("--out-dir", synth_out_dir, "output directory");

  // train
  auto* train_cmd = app.add_subcommand("train", "contrastive training of the record encoder");
  std::string train_coll;
  train_cmd->add_option("collection", train_coll, "records JSONL file")->required();
  std::string train_model_out = "model.ckpt";
  train_cmd->add_option("--out", train_model_out, "checkpoint path");
  std::string train_loss_out;
  train_cmd->add_option("--loss-csv", train_loss_out, "loss curve CSV path");
  std::optional<int> train_steps, train_batch;
  train_cmd->add_option("--steps", train_steps, "training steps");
  train_cmd->add_option("--batch-size", train_batch, "batch size");
  ParaphraseFileFlags train_files;
  train_cmd->add_option("--keyboard-map", train_files.keyboard_path, "keyboard map JSON");
  train_cmd->add_option("--ocr-map", train_files.ocr_path, "OCR map JSON");
  train_cmd->add_option("--dictionary", train_files.dictionary_path, "token dictionary JSON");

  // block
  auto* block = app.add_subcommand("block", "generate ranked candidate pairs");
  std::vector<std::string> block_colls;
  block->add_option("collections", block_colls, "records JSONL files")->required();
  std::string block_vectorizer = "hashed";
  block->add_option("--vectorizer", block_vectorizer,
                    "trained:<ckpt>|hashed|external:<file>|bm25");
  int block_k = 0;
  block->add_option("--k", block_k, "nearest neighbors per record")->required();
  std::string block_out = "candidates.csv";
  block->add_option("--out", block_out, "candidates CSV path");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "protocol evaluation of candidates");
  std::string eval_candidates, eval_gold;
  eval_cmd->add_option("candidates", eval_candidates, "candidates CSV")->required();
  eval_cmd->add_option("gold", eval_gold, "gold matches CSV")->required();
  std::string eval_out = "report.json";
  eval_cmd->add_option("--out", eval_out, "report JSON path");
  std::string eval_csv;
  eval_cmd->add_option("--csv", eval_csv, "per-k table CSV path");
  std::optional<int> eval_budget;
  eval_cmd->add_option("--k-budget", eval_budget, "rank budget");
  std::optional<double> eval_threshold;
  eval_cmd->add_option("--pc-threshold", eval_threshold, "PC threshold");

  // ensemble
  auto* ens = app.add_subcommand("ensemble", "merge two candidate files per rank");
  std::string ens_a, ens_b;
  ens->add_option("candidates1", ens_a, "first candidates CSV")->required();
  ens->add_option("candidates2", ens_b, "second candidates CSV")->required();
  std::string ens_out = "ensemble.csv";
  ens->add_option("--out", ens_out, "merged candidates CSV path");

  // compare
  auto* cmp = app.add_subcommand("compare", "protocol verdict between two reports");
  std::string cmp_a, cmp_b;
  cmp->add_option("report1", cmp_a, "first report JSON")->required();
  cmp->add_option("report2", cmp_b, "second report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  PipelineConfig cfg;
  if (!config_path.empty()) cfg = load_pipeline_config(config_path);
  std::uint64_t seed = resolve_seed(cfg, seed_flag);

  if (*condition) return cmd_condition(table_paths, cond_out_dir, cond_log);
  if (*stats) {
    if (stats_q) cfg.q = *stats_q;
    return cmd_stats(stats_coll, stats_scheme, cfg.q, stats_out);
  }
  if (*synth) return cmd_synth(synth_entities, synth_copies, seed, synth_prob, synth_out_dir);
  if (*train_cmd) {
    if (train_steps) cfg.steps = *train_steps;
    if (train_batch) cfg.batch_size = *train_batch;
    validate_pipeline_config(cfg);
    return cmd_train(train_coll, cfg, seed, train_files, train_model_out, train_loss_out);
  }
  if (*block) return cmd_block(block_colls, block_vectorizer, block_k, cfg, block_out);
  if (*eval_cmd) {
    if (eval_budget) cfg.k_budget = *eval_budget;
    if (eval_threshold) cfg.pc_threshold = *eval_threshold;
    validate_pipeline_config(cfg);
    return cmd_eval(eval_candidates, eval_gold, cfg, eval_out, eval_csv);
  }
  if (*ens) return cmd_ensemble(ens_a, ens_b, ens_out);
  if (*cmp) return cmd_compare(cmp_a, cmp_b);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const blockkit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const blockkit::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const blockkit::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
