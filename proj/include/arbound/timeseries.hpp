// Copyright 2026 The Arbound Authors.
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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "arbound/errors.hpp"

namespace arbound {

/// A dated observation; value may be missing (market holidays etc.).
struct RawObservation {
  std::string date;  // ISO-8601 YYYY-MM-DD
  std::optional<double> value;
};

struct RawSeries {
  std::vector<RawObservation> observations;
  std::string source_id;

  std::size_t present_count() const {
    std::size_t k = 0;
    for (const auto& o : observations)
      if (o.value) ++k;
    return k;
  }
};

/// Natural-log growth rates of consecutive present values. This is the
/// sample handed to every downstream module; dates are shed here.
struct GrowthSeries {
  std::vector<double> values;
  std::string provenance;

  std::size_t n() const { return values.size(); }
};

namespace detail {

// Howard Hinnant's civil-date algorithm.
inline std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline std::string civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u",
                static_cast<long long>(y + (m <= 2)), m, d);
  return buf;
}

inline bool parse_iso_date(const std::string& s, int& y, int& m, int& d) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (int i : {0, 1, 2, 3, 5, 6, 8, 9})
    if (s[i] < '0' || s[i] > '9') return false;
  y = std::stoi(s.substr(0, 4));
  m = std::stoi(s.substr(5, 2));
  d = std::stoi(s.substr(8, 2));
  if (m < 1 || m > 12 || d < 1 || d > 31) return false;
  return true;
}

// One RFC-4180 record; handles quoted fields, embedded separators and
// doubled quotes. Returns false on end of stream.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  int ch;
  while ((ch = in.get()) != EOF) {
    any = true;
    const char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      // swallow; LF terminates
    } else if (c == '\n') {
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(c);
    }
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

inline std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Reads a two-column CSV (header required) of ISO dates and values. The
/// date column is the first column; `value_column` names the value field.
/// Tokens in `missing_tokens` (default: empty field and ".") become missing
/// observations. Errors carry the 1-based file row.
inline RawSeries load_csv(const std::string& path,
                          const std::string& value_column,
                          const std::set<std::string>& missing_tokens = {"", "."}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_csv: cannot open '" + path + "'");
  std::vector<std::string> fields;
  if (!detail::read_csv_record(in, fields))
    throw IoError("load_csv: '" + path + "' is empty");
  std::size_t value_idx = fields.size();
  for (std::size_t i = 0; i < fields.size(); ++i)
    if (detail::trimmed(fields[i]) == value_column) value_idx = i;
  if (value_idx >= fields.size())
    throw IoError("load_csv: no column named '" + value_column + "' in header of '" +
                  path + "'");
  if (value_idx == 0)
    throw IoError("load_csv: value column '" + value_column +
                  "' is the date column (first column)");

  RawSeries series;
  series.source_id = path;
  std::size_t row = 1;
  std::string prev_date;
  while (detail::read_csv_record(in, fields)) {
    ++row;
    if (fields.size() == 1 && detail::trimmed(fields[0]).empty()) continue;
    if (fields.size() <= value_idx)
      throw IoError("load_csv: row " + std::to_string(row) + " has " +
                    std::to_string(fields.size()) + " fields, need at least " +
                    std::to_string(value_idx + 1));
    RawObservation obs;
    obs.date = detail::trimmed(fields[0]);
    int y, m, d;
    if (!detail::parse_iso_date(obs.date, y, m, d))
      throw IoError("load_csv: row " + std::to_string(row) +
                    ": unparseable ISO-8601 date '" + obs.date + "'");
    if (!prev_date.empty() && obs.date <= prev_date)
      throw IoError("load_csv: row " + std::to_string(row) + ": date '" + obs.date +
                    "' does not increase past '" + prev_date + "'");
    prev_date = obs.date;
    const std::string token = detail::trimmed(fields[value_idx]);
    if (missing_tokens.count(token)) {
      obs.value = std::nullopt;
    } else {
      try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size() || !std::isfinite(v))
          throw std::invalid_argument(token);
        obs.value = v;
      } catch (const std::exception&) {
        throw IoError("load_csv: row " + std::to_string(row) +
                      ": unparseable value '" + token + "'");
      }
    }
    series.observations.push_back(std::move(obs));
  }
  return series;
}

/// Drops missing values, then takes log-ratios of consecutive survivors.
/// n = (#present values) - 1. Gaps are concatenated, never interpolated.
inline GrowthSeries log_growth(const RawSeries& raw) {
  std::vector<const RawObservation*> present;
  present.reserve(raw.observations.size());
  for (const auto& o : raw.observations)
    if (o.value) present.push_back(&o);
  if (present.size() < 2)
    throw ConfigError("log_growth: need at least 2 present values, have " +
                      std::to_string(present.size()));
  for (const auto* o : present)
    if (!(*o->value > 0.0))
      throw ConfigError("log_growth: nonpositive value " +
                        std::to_string(*o->value) + " on " + o->date);
  GrowthSeries out;
  out.values.reserve(present.size() - 1);
  for (std::size_t i = 1; i < present.size(); ++i)
    out.values.push_back(std::log(*present[i]->value / *present[i - 1]->value));
  out.provenance = raw.source_id + " (log growth, gaps dropped)";
  return out;
}

struct SeriesSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // population convention (divide by n)
  double min = 0.0;
  double max = 0.0;
  double max_squared_value = 0.0;
};

inline SeriesSummary summary(const GrowthSeries& series) {
  if (series.n() < 1) throw ConfigError("summary: empty series");
  SeriesSummary s;
  s.n = series.n();
  s.min = std::numeric_limits<double>::infinity();
  s.max = -std::numeric_limits<double>::infinity();
  for (double v : series.values) {
    s.mean += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
    s.max_squared_value = std::max(s.max_squared_value, v * v);
  }
  s.mean /= static_cast<double>(s.n);
  for (double v : series.values) s.variance += (v - s.mean) * (v - s.mean);
  s.variance /= static_cast<double>(s.n);
  return s;
}

}  // namespace arbound
