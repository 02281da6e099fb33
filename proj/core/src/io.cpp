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

#include "blockkit/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "blockkit/errors.hpp"
#include "blockkit/tokenize.hpp"

namespace blockkit {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  return out;
}

// RFC-4180-style CSV: quoted fields may contain commas, doubled quotes and
// newlines. Rows are returned as raw cell strings.
std::vector<std::vector<std::string>> parse_csv(const std::string& content,
                                                const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool in_quotes = false;
  bool cell_started = false;

  auto end_cell = [&]() {
    row.push_back(std::move(cell));
    cell.clear();
    cell_started = false;
  };
  auto end_row = [&]() {
    end_cell();
    rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cell.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (cell.empty() && !cell_started) {
          in_quotes = true;
          cell_started = true;
        } else {
          cell.push_back(c);
        }
        break;
      case ',':
        end_cell();
        break;
      case '\r':
        break;  // tolerate CRLF
      case '\n':
        end_row();
        break;
      default:
        cell.push_back(c);
        cell_started = true;
    }
  }
  if (in_quotes) throw DataError(path + ": unterminated quote in CSV");
  if (cell_started || !cell.empty() || !row.empty()) end_row();
  return rows;
}

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string csv_field(const std::string& s) {
  if (!needs_quoting(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

const char* mode_name(BlockingMode m) {
  return m == BlockingMode::single_collection ? "single_collection"
                                              : "two_collection";
}

BlockingMode parse_mode(const std::string& s, const std::string& path) {
  if (s == "single_collection") return BlockingMode::single_collection;
  if (s == "two_collection") return BlockingMode::two_collection;
  throw DataError(path + ": unknown blocking mode '" + s + "'");
}

}  // namespace

std::vector<Column> read_table_csv(const std::string& path) {
  auto rows = parse_csv(slurp(path), path);
  if (rows.empty()) throw DataError(path + ": empty table file");

  const auto& header = rows[0];
  if (header.empty() || (header.size() == 1 && header[0].empty()))
    throw DataError(path + ": missing header row");

  std::vector<Column> table(header.size());
  std::unordered_set<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!names.insert(header[c]).second)
      throw DataError(path + ": duplicate column name '" + header[c] + "'");
    table[c].name = header[c];
    table[c].values.reserve(rows.size() - 1);
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size())
      throw DataError(path + ": row " + std::to_string(r + 1) + " has " +
                      std::to_string(rows[r].size()) + " cells, expected " +
                      std::to_string(header.size()));
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (rows[r][c].empty())
        table[c].values.push_back(std::nullopt);
      else
        table[c].values.push_back(rows[r][c]);
    }
  }
  return table;
}

Collection read_records_jsonl(const std::string& path,
                              const std::string& source_tag) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open records file: " + path);

  Collection coll;
  coll.source_tag = source_tag;
  std::string line;
  std::size_t line_no = 0;
  std::unordered_set<std::string> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const ordered_json::parse_error& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("attrs") ||
        !j["id"].is_string() || !j["attrs"].is_object())
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected {\"id\": str, \"attrs\": {...}}");

    Record rec;
    rec.id = j["id"].get<std::string>();
    if (!ids.insert(rec.id).second)
      throw DataError(path + ": duplicate record id '" + rec.id + "'");
    for (auto& [name, value] : j["attrs"].items()) {
      if (value.is_null())
        rec.attrs.push_back({name, std::nullopt});
      else if (value.is_string())
        rec.attrs.push_back({name, value.get<std::string>()});
      else
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": attribute '" + name + "' must be string or null");
    }
    coll.records.push_back(std::move(rec));
  }
  return coll;
}

void write_records_jsonl(const Collection& coll, const std::string& path) {
  auto out = open_out(path);
  for (const auto& rec : coll.records) {
    ordered_json attrs = ordered_json::object();
    for (const auto& attr : rec.attrs) {
      if (attrs.contains(attr.name))
        throw DataError("record '" + rec.id + "': duplicate attribute name '" +
                        attr.name + "'");
      if (attr.value)
        attrs[attr.name] = *attr.value;
      else
        attrs[attr.name] = nullptr;
    }
    ordered_json j{{"id", rec.id}, {"attrs", std::move(attrs)}};
    out << j.dump() << "\n";
  }
}

GoldMatches read_gold_csv(const std::string& path) {
  auto rows = parse_csv(slurp(path), path);
  if (rows.empty() || rows[0].size() != 2 || rows[0][0] != "left_id" ||
      rows[0][1] != "right_id")
    throw DataError(path + ": expected header 'left_id,right_id'");

  GoldMatches gold;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2)
      throw DataError(path + ": row " + std::to_string(r + 1) +
                      " must have exactly two cells");
    gold.add(rows[r][0], rows[r][1]);
  }
  return gold;
}

void write_gold_csv(const GoldMatches& gold, const std::string& path) {
  auto out = open_out(path);
  out << "left_id,right_id\n";
  std::vector<std::string> keys(gold.keys.begin(), gold.keys.end());
  std::sort(keys.begin(), keys.end());
  for (const auto& key : keys) {
    auto sep = key.find('\x1f');
    out << csv_field(key.substr(0, sep)) << ","
        << csv_field(key.substr(sep + 1)) << "\n";
  }
}

void write_candidates_csv(const RankedCandidates& ranked, const std::string& path) {
  auto out = open_out(path);
  out << "#mode=" << mode_name(ranked.mode) << " k=" << ranked.ranks.size()
      << "\n";
  out << "rank,left_id,right_id\n";
  for (std::size_t r = 0; r < ranked.ranks.size(); ++r)
    for (const CandidatePair& p : ranked.ranks[r])
      out << (r + 1) << "," << csv_field(p.left) << "," << csv_field(p.right)
          << "\n";
}

RankedCandidates read_candidates_csv(const std::string& path) {
  std::string content = slurp(path);
  auto line_end = content.find('\n');
  if (line_end == std::string::npos || content.rfind("#mode=", 0) != 0)
    throw DataError(path + ": missing '#mode=... k=...' comment line");
  std::string header_comment = content.substr(0, line_end);
  if (!header_comment.empty() && header_comment.back() == '\r')
    header_comment.pop_back();

  auto space = header_comment.find(' ');
  if (space == std::string::npos || header_comment.rfind(" k=") == std::string::npos)
    throw DataError(path + ": malformed mode comment line");
  RankedCandidates ranked;
  ranked.mode = parse_mode(header_comment.substr(6, space - 6), path);
  std::size_t depth = 0;
  try {
    depth = std::stoul(header_comment.substr(header_comment.rfind(" k=") + 3));
  } catch (const std::exception&) {
    throw DataError(path + ": malformed k in mode comment line");
  }
  ranked.ranks.resize(depth);

  auto rows = parse_csv(content.substr(line_end + 1), path);
  if (rows.empty() || rows[0].size() != 3 || rows[0][0] != "rank" ||
      rows[0][1] != "left_id" || rows[0][2] != "right_id")
    throw DataError(path + ": expected header 'rank,left_id,right_id'");

  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 3)
      throw DataError(path + ": row " + std::to_string(r + 2) +
                      " must have exactly three cells");
    std::size_t rank = 0;
    try {
      rank = std::stoul(rows[r][0]);
    } catch (const std::exception&) {
      throw DataError(path + ": bad rank '" + rows[r][0] + "'");
    }
    if (rank < 1 || rank > depth)
      throw DataError(path + ": rank " + rows[r][0] + " outside 1.." +
                      std::to_string(depth));
    CandidatePair pair{rows[r][1], rows[r][2]};
    std::string key = pair.left + '\x1f' + pair.right;
    if (!seen.insert(key).second)
      throw DataError(path + ": duplicate candidate pair at row " +
                      std::to_string(r + 2));
    ranked.ranks[rank - 1].push_back(std::move(pair));
  }
  return ranked;
}

void write_vectors(const std::vector<std::string>& ids,
                   const std::vector<RecordVector>& vecs,
                   const std::string& path) {
  if (ids.size() != vecs.size())
    throw std::invalid_argument("write_vectors: ids/vectors size mismatch");
  auto out = open_out(path);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out << ids[i] << " " << vecs[i].values.size();
    for (double v : vecs[i].values) out << " " << fmt_double(v);
    out << "\n";
  }
}

void write_loss_csv(const std::vector<double>& losses, const std::string& path) {
  auto out = open_out(path);
  out << "step,loss\n";
  for (std::size_t i = 0; i < losses.size(); ++i)
    out << (i + 1) << "," << fmt_double(losses[i]) << "\n";
}

void write_report_json(const EvalReport& report, const std::string& path) {
  ordered_json j;
  j["k_budget"] = report.k_budget;
  j["pc_threshold"] = report.pc_threshold;
  j["map"] = report.map;
  if (report.k_at_threshold)
    j["k_at_threshold"] = *report.k_at_threshold;
  else
    j["k_at_threshold"] = nullptr;
  j["headline"] = report.headline();
  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows) {
    rows.push_back(ordered_json{{"k", row.k},
                                {"pc", row.pc},
                                {"pq", row.pq},
                                {"pq_defined", row.pq_defined},
                                {"candidates", row.candidates}});
  }
  j["rows"] = std::move(rows);
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

EvalReport read_report_json(const std::string& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(slurp(path));
  } catch (const ordered_json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
  try {
    EvalReport report;
    report.k_budget = j.at("k_budget").get<int>();
    report.pc_threshold = j.at("pc_threshold").get<double>();
    report.map = j.at("map").get<double>();
    if (!j.at("k_at_threshold").is_null())
      report.k_at_threshold = j.at("k_at_threshold").get<int>();
    for (const auto& row : j.at("rows")) {
      EvalRow r;
      r.k = row.at("k").get<int>();
      r.pc = row.at("pc").get<double>();
      r.pq = row.at("pq").get<double>();
      r.pq_defined = row.at("pq_defined").get<bool>();
      r.candidates = row.at("candidates").get<std::size_t>();
      report.rows.push_back(r);
    }
    return report;
  } catch (const ordered_json::exception& e) {
    throw DataError(path + ": malformed report: " + e.what());
  }
}

void write_report_csv(const EvalReport& report, const std::string& path) {
  auto out = open_out(path);
  out << "k,pc,pq,candidates\n";
  for (const auto& row : report.rows)
    out << row.k << "," << fmt_double(row.pc) << "," << fmt_double(row.pq)
        << "," << row.candidates << "\n";
}

void load_confusion_map_json(const std::string& path, bool ocr,
                             ParaphraseConfig& cfg) {
  ordered_json j;
  try {
    j = ordered_json::parse(slurp(path));
  } catch (const ordered_json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
  if (!j.is_object()) throw DataError(path + ": expected a JSON object");

  auto& target = ocr ? cfg.ocr_map : cfg.keyboard_map;
  target.clear();
  for (auto& [key, value] : j.items()) {
    auto cps = utf8_decode(key);
    if (cps.size() != 1)
      throw DataError(path + ": map key '" + key + "' must be one character");
    if (!value.is_array())
      throw DataError(path + ": replacements for '" + key + "' must be an array");
    for (const auto& rep : value) {
      if (!rep.is_string())
        throw DataError(path + ": replacement for '" + key + "' must be a string");
      auto rep_cps = utf8_decode(rep.get<std::string>());
      target[cps[0]].push_back(std::u32string(rep_cps.begin(), rep_cps.end()));
    }
  }
}

void load_token_dictionary_json(const std::string& path, ParaphraseConfig& cfg) {
  ordered_json j;
  try {
    j = ordered_json::parse(slurp(path));
  } catch (const ordered_json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
  cfg.token_dictionary.clear();
  cfg.token_weights.clear();
  if (j.is_array()) {
    for (const auto& w : j) {
      if (!w.is_string()) throw DataError(path + ": dictionary entries must be strings");
      cfg.token_dictionary.push_back(w.get<std::string>());
    }
    return;
  }
  if (!j.is_object() || !j.contains("words"))
    throw DataError(path + ": expected an array or {\"words\": [...]}");
  for (const auto& w : j["words"]) {
    if (!w.is_string()) throw DataError(path + ": dictionary entries must be strings");
    cfg.token_dictionary.push_back(w.get<std::string>());
  }
  if (j.contains("weights")) {
    for (const auto& w : j["weights"]) cfg.token_weights.push_back(w.get<double>());
    if (cfg.token_weights.size() != cfg.token_dictionary.size())
      throw DataError(path + ": weights and words must have equal length");
  }
}

void validate_pipeline_config(const PipelineConfig& cfg) {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (cfg.gamma <= 0.0) fail("gamma must be positive");
  if (cfg.dropout_p < 0.0 || cfg.dropout_p >= 1.0) fail("dropout_p must be in [0,1)");
  if (cfg.paraphrase_prob < 0.0 || cfg.paraphrase_prob > 1.0)
    fail("paraphrase_prob must be in [0,1]");
  if (cfg.dup_threshold < 0.0 || cfg.dup_threshold > 1.0)
    fail("dup_threshold must be in [0,1]");
  if (cfg.batch_size < 2) fail("batch_size must be >= 2");
  if (cfg.steps < 0) fail("steps must be >= 0");
  if (cfg.learning_rate <= 0.0) fail("learning_rate must be positive");
  if (cfg.dim < 1) fail("dim must be >= 1");
  if (cfg.vocab_buckets < 1) fail("vocab_buckets must be >= 1");
  if (cfg.max_seq_len < 1) fail("max_seq_len must be >= 1");
  if (cfg.q < 1) fail("q must be >= 1");
  if (cfg.bm25.k1 <= 0.0) fail("bm25.k1 must be positive");
  if (cfg.bm25.b < 0.0 || cfg.bm25.b > 1.0) fail("bm25.b must be in [0,1]");
  if (cfg.k_budget < 1) fail("k_budget must be >= 1");
  if (cfg.pc_threshold < 0.0 || cfg.pc_threshold > 1.0)
    fail("pc_threshold must be in [0,1]");
}

PipelineConfig load_pipeline_config(const std::string& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(slurp(path));
  } catch (const ordered_json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(path + ": config must be a JSON object");

  PipelineConfig cfg;
  try {
    for (auto& [key, value] : j.items()) {
      if (key == "gamma") cfg.gamma = value.get<double>();
      else if (key == "margin") cfg.margin = value.get<double>();
      else if (key == "dropout_p") cfg.dropout_p = value.get<double>();
      else if (key == "paraphrase_prob") cfg.paraphrase_prob = value.get<double>();
      else if (key == "dup_threshold") cfg.dup_threshold = value.get<double>();
      else if (key == "batch_size") cfg.batch_size = value.get<int>();
      else if (key == "steps") cfg.steps = value.get<int>();
      else if (key == "learning_rate") cfg.learning_rate = value.get<double>();
      else if (key == "dim") cfg.dim = value.get<int>();
      else if (key == "vocab_buckets") cfg.vocab_buckets = value.get<std::uint32_t>();
      else if (key == "max_seq_len") cfg.max_seq_len = value.get<int>();
      else if (key == "q") cfg.q = value.get<int>();
      else if (key == "k_budget") cfg.k_budget = value.get<int>();
      else if (key == "pc_threshold") cfg.pc_threshold = value.get<double>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "bm25") {
        if (!value.is_object()) throw ConfigError(path + ": bm25 must be an object");
        for (auto& [bkey, bvalue] : value.items()) {
          if (bkey == "k1") cfg.bm25.k1 = bvalue.get<double>();
          else if (bkey == "b") cfg.bm25.b = bvalue.get<double>();
          else throw ConfigError(path + ": unknown key 'bm25." + bkey + "'");
        }
      } else {
        throw ConfigError(path + ": unknown key '" + key + "'");
      }
    }
  } catch (const ordered_json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  validate_pipeline_config(cfg);
  return cfg;
}

}  // namespace blockkit
