// Copyright 2026 The rcp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Bid batches as CSV: one profile per row, one column per bidder. An optional
// header `bid_1,...,bid_n` fixes n; otherwise the first data row does. Blank
// lines and lines starting with '#' are skipped.

#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcp/clearing.hpp"
#include "rcp/mechanisms.hpp"

namespace rcp {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return out;
}

}  // namespace detail

/// Reads a batch; errors name `source`, the 1-based line and column.
inline BidBatch read_batch_csv(std::istream& in, const std::string& source = "<input>") {
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  std::vector<std::vector<double>> rows;
  auto fail = [&](std::size_t col, const std::string& what) {
    throw CsvError(source + ":" + std::to_string(line_no) +
                   (col ? ":" + std::to_string(col) : std::string()) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto fields = detail::split_csv_line(line);
    if (width == 0 && rows.empty() && fields[0].rfind("bid_", 0) == 0) {
      for (std::size_t c = 0; c < fields.size(); ++c) {
        if (fields[c] != "bid_" + std::to_string(c + 1)) {
          fail(c + 1, "expected header field bid_" + std::to_string(c + 1));
        }
      }
      width = fields.size();
      continue;
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      fail(0, "row has " + std::to_string(fields.size()) + " fields, expected " +
                  std::to_string(width));
    }
    std::vector<double> row;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double x = 0.0;
      try {
        x = parse_number(fields[c]);
      } catch (const std::invalid_argument&) {
        fail(c + 1, "not a number: '" + fields[c] + "'");
      }
      if (!std::isfinite(x) || x < 0.0) fail(c + 1, "bid must be finite and >= 0");
      row.push_back(x);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvError(source + ": no bid rows");
  BidBatch batch(width);
  batch.reserve(rows.size());
  for (const auto& r : rows) batch.add(r);
  return batch;
}

inline BidBatch read_batch_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot read " + path.string());
  return read_batch_csv(in, path.string());
}

inline void write_batch_csv(std::ostream& os, const BidBatch& batch) {
  for (std::size_t i = 0; i < batch.bidders(); ++i) {
    os << (i ? "," : "") << "bid_" << i + 1;
  }
  os << '\n';
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto row = batch.profile(k);
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? "," : "") << format_number(row[i], 17);
    }
    os << '\n';
  }
}

}  // namespace rcp
