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

#include "blockkit/conditioning.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <string_view>
#include <unordered_set>

#include "blockkit/errors.hpp"
#include "blockkit/tokenize.hpp"

namespace blockkit {

namespace {

std::string_view trimmed(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  return true;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

int to_int(std::string_view s) {
  int v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

bool valid_month_day(int month, int day) {
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

bool valid_time(std::string_view t) {
  // HH:MM[:SS[.fff]], optionally followed by Z or +/-HH[:MM].
  if (t.size() >= 1 && (t.back() == 'Z' || t.back() == 'z'))
    t.remove_suffix(1);
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i] == '+' || t[i] == '-') {
      std::string_view off = t.substr(i + 1);
      std::string_view hh = off, mm;
      std::size_t colon = off.size();
      for (std::size_t c = 0; c < off.size(); ++c)
        if (off[c] == ':') {
          colon = c;
          break;
        }
      if (colon < off.size()) {
        hh = off.substr(0, colon);
        mm = off.substr(colon + 1);
      } else if (off.size() == 4) {
        hh = off.substr(0, 2);
        mm = off.substr(2);
      }
      if (!all_digits(hh) || to_int(hh) > 14) return false;
      if (!mm.empty() && (!all_digits(mm) || to_int(mm) > 59)) return false;
      t = t.substr(0, i);
      break;
    }
  }
  std::array<std::string_view, 3> parts{};
  std::size_t n = 0, start = 0;
  for (std::size_t i = 0; i <= t.size(); ++i) {
    if (i == t.size() || t[i] == ':') {
      if (n >= 3) return false;
      parts[n++] = t.substr(start, i - start);
      start = i + 1;
    }
  }
  if (n < 2) return false;
  if (!all_digits(parts[0]) || to_int(parts[0]) > 23) return false;
  if (!all_digits(parts[1]) || to_int(parts[1]) > 59) return false;
  if (n == 3) {
    std::string_view sec = parts[2];
    if (auto dot = sec.find('.'); dot != std::string_view::npos) {
      if (!all_digits(sec.substr(dot + 1))) return false;
      sec = sec.substr(0, dot);
    }
    if (!all_digits(sec) || to_int(sec) > 60) return false;
  }
  return true;
}

constexpr std::array<std::string_view, 12> kMonths = {
    "january", "february", "march",     "april",   "may",      "june",
    "july",    "august",   "september", "october", "november", "december"};

int month_name_index(std::string_view w) {
  std::string lower;
  for (char c : w) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (lower == kMonths[i] || (lower.size() == 3 && kMonths[i].substr(0, 3) == lower))
      return static_cast<int>(i) + 1;
  }
  return 0;
}

// Numeric date: three '-', '/' or '.'-separated fields with a 4-digit year
// leading or trailing, the other two fields 1-2 digits readable as a valid
// month/day in either order.
bool numeric_date(std::string_view s) {
  char sep = 0;
  for (char c : {'-', '/', '.'}) {
    if (s.find(c) != std::string_view::npos) {
      sep = c;
      break;
    }
  }
  if (sep == 0) return false;
  std::array<std::string_view, 3> f{};
  std::size_t n = 0, start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      if (n >= 3) return false;
      f[n++] = s.substr(start, i - start);
      start = i + 1;
    }
  }
  if (n != 3) return false;
  for (auto part : f)
    if (!all_digits(part)) return false;

  if (f[0].size() == 4 && f[1].size() <= 2 && f[2].size() <= 2)
    return valid_month_day(to_int(f[1]), to_int(f[2]));
  if (f[2].size() == 4 && f[0].size() <= 2 && f[1].size() <= 2)
    return valid_month_day(to_int(f[0]), to_int(f[1])) ||
           valid_month_day(to_int(f[1]), to_int(f[0]));
  return false;
}

// "Jan 5, 2021", "January 5 2021" or "5 Jan 2021".
bool month_name_date(std::string_view s) {
  std::vector<std::string_view> words;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ' ' || s[i] == ',') {
      if (i > start) words.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  if (words.size() != 3) return false;
  int m = month_name_index(words[0]);
  if (m != 0)
    return all_digits(words[1]) && to_int(words[1]) >= 1 &&
           to_int(words[1]) <= 31 && words[2].size() == 4 &&
           all_digits(words[2]);
  m = month_name_index(words[1]);
  return m != 0 && all_digits(words[0]) && to_int(words[0]) >= 1 &&
         to_int(words[0]) <= 31 && words[2].size() == 4 && all_digits(words[2]);
}

}  // namespace

bool parses_as_numeric(std::string_view raw) {
  std::string_view s = trimmed(raw);
  if (s.empty()) return false;
  if (iequals(s, "true") || iequals(s, "false")) return true;
  if (s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  // Require at least one digit so "inf"/"nan" do not count as numeric.
  if (std::none_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isdigit(c) != 0;
      }))
    return false;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parses_as_url(std::string_view raw) {
  std::string_view s = trimmed(raw);
  for (std::string_view scheme : {"http://", "https://", "ftp://"}) {
    if (s.size() > scheme.size() &&
        iequals(s.substr(0, scheme.size()), scheme))
      return true;
  }
  return false;
}

bool parses_as_date(std::string_view raw) {
  std::string_view s = trimmed(raw);
  if (s.empty() || s.size() > 40) return false;

  // Split an optional time part introduced by 'T' or a space.
  std::string_view date_part = s;
  std::string_view time_part;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == 'T' || (s[i] == ' ' && i >= 8 && numeric_date(s.substr(0, i)))) {
      date_part = s.substr(0, i);
      time_part = s.substr(i + 1);
      break;
    }
  }
  if (!time_part.empty() && !valid_time(time_part)) return false;
  if (!time_part.empty()) return numeric_date(date_part);
  return numeric_date(date_part) || month_name_date(date_part);
}

const char* to_string(ColumnType t) {
  switch (t) {
    case ColumnType::identifier: return "identifier";
    case ColumnType::numeric: return "numeric";
    case ColumnType::url: return "url";
    case ColumnType::date: return "date";
    case ColumnType::category: return "category";
    case ColumnType::entity: return "entity";
    case ColumnType::text: return "text";
  }
  return "?";
}

const char* to_string(FilterReason r) {
  switch (r) {
    case FilterReason::ok: return "ok";
    case FilterReason::statistics_table: return "statistics_table";
    case FilterReason::log_table: return "log_table";
    case FilterReason::non_english: return "non_english";
  }
  return "?";
}

ColumnType detect_column_type(const Column& col) {
  if (col.values.empty())
    throw DataError("detect_column_type: empty column '" + col.name + "'");

  std::vector<std::string_view> cells;
  cells.reserve(col.values.size());
  for (const auto& v : col.values)
    if (!is_null_value(v)) cells.push_back(*v);
  if (cells.empty()) return ColumnType::entity;

  std::unordered_set<std::string_view> uniq(cells.begin(), cells.end());
  if (uniq.size() == cells.size()) return ColumnType::identifier;

  if (std::all_of(cells.begin(), cells.end(), parses_as_numeric))
    return ColumnType::numeric;
  if (std::all_of(cells.begin(), cells.end(), parses_as_url))
    return ColumnType::url;
  if (std::all_of(cells.begin(), cells.end(), parses_as_date))
    return ColumnType::date;

  std::vector<std::size_t> lens;
  lens.reserve(cells.size());
  for (auto c : cells) lens.push_back(word_tokens(c).size());
  double mean = 0.0;
  for (auto l : lens) mean += static_cast<double>(l);
  mean /= static_cast<double>(lens.size());
  bool zero_variance = std::all_of(lens.begin(), lens.end(),
                                   [&](std::size_t l) { return l == lens[0]; });
  if (zero_variance) return ColumnType::category;
  return mean < 10.0 ? ColumnType::entity : ColumnType::text;
}

namespace {

void check_rectangular(const std::vector<Column>& table) {
  for (const auto& col : table) {
    if (col.values.size() != table[0].values.size())
      throw DataError("table has ragged columns ('" + col.name + "')");
  }
}

// >= 80% of alphabetic characters in the sampled cells must be ASCII
// letters. Non-ASCII code points all count as alphabetic; a table with no
// alphabetic content passes.
bool looks_english(const std::vector<Column>& table) {
  constexpr std::size_t kSampleCap = 200;
  std::vector<std::string_view> cells;
  for (const auto& col : table)
    for (const auto& v : col.values)
      if (!is_null_value(v)) cells.push_back(*v);
  std::size_t stride = cells.size() > kSampleCap ? cells.size() / kSampleCap : 1;

  std::size_t ascii_letters = 0, non_ascii = 0;
  for (std::size_t i = 0; i < cells.size(); i += stride) {
    for (char32_t cp : utf8_decode(cells[i])) {
      if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z'))
        ++ascii_letters;
      else if (cp > 127)
        ++non_ascii;
    }
  }
  std::size_t total = ascii_letters + non_ascii;
  if (total == 0) return true;
  return static_cast<double>(ascii_letters) >= 0.8 * static_cast<double>(total);
}

}  // namespace

FilterVerdict filter_table(const std::vector<Column>& table) {
  if (table.empty() || table[0].values.empty())
    throw DataError("filter_table: table must have at least one column and row");
  check_rectangular(table);

  std::vector<ColumnType> types;
  types.reserve(table.size());
  for (const auto& col : table) types.push_back(detect_column_type(col));

  std::size_t stat_cols = 0;
  for (auto t : types)
    if (t == ColumnType::numeric || t == ColumnType::url || t == ColumnType::date)
      ++stat_cols;
  if (2 * stat_cols > table.size())
    return {false, FilterReason::statistics_table};
  if (types[0] == ColumnType::date) return {false, FilterReason::log_table};
  if (!looks_english(table)) return {false, FilterReason::non_english};
  return {true, FilterReason::ok};
}

Collection table_to_records(const std::vector<Column>& table,
                            const std::string& table_id) {
  if (table.empty() || table[0].values.empty())
    throw DataError("table_to_records: table must have at least one column and row");
  check_rectangular(table);

  Collection coll;
  coll.source_tag = table_id;
  const std::size_t rows = table[0].values.size();
  coll.records.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    Record rec;
    rec.id = "r" + std::to_string(r);
    rec.attrs.reserve(table.size());
    for (const auto& col : table) rec.attrs.push_back({col.name, col.values[r]});
    coll.records.push_back(std::move(rec));
  }
  return coll;
}

}  // namespace blockkit
