//
// Copyright 2026 The pobo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Low-level file and number plumbing: shortest round-trip double
// formatting, whole-file reads, atomic writes, and headerless numeric CSV.

#ifndef POBO_IO_HPP_
#define POBO_IO_HPP_

#include <Eigen/Dense>
#include <array>
#include <atomic>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pobo/errors.hpp"

namespace pobo::io {

// Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf;
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (result.ec != std::errc()) {
    throw NumericError("failed to format a floating point value");
  }
  return std::string(buf.data(), result.ptr);
}

inline bool try_parse_double(std::string_view text, double& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' ||
                           text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (text.empty()) return false;
  const auto result =
      std::from_chars(text.data(), text.data() + text.size(), out);
  return result.ec == std::errc() &&
         result.ptr == text.data() + text.size();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw IoError("failed while reading file: " + path);
  }
  return buffer.str();
}

// Writes to a temporary sibling and renames into place, so readers never
// observe a partially written file.
inline void atomic_write(const std::string& path, std::string_view content) {
  static std::atomic<std::uint64_t> counter{0};
  const std::filesystem::path target(path);
  std::filesystem::path tmp(path);
  tmp += ".tmp" + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot create file: " + tmp.string());
    }
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("failed while writing file: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IoError("cannot move output into place: " + path + ": " +
                  ec.message());
  }
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

inline std::string matrix_to_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

inline void write_matrix_csv(const std::string& path,
                             const Eigen::MatrixXd& m) {
  atomic_write(path, matrix_to_csv(m));
}

inline Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  const std::string text = read_file(path);
  const std::vector<std::string_view> lines = split_lines(text);
  if (lines.empty()) {
    throw SchemaError("file holds no rows: " + path);
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(lines.size());
  const Eigen::Index cols =
      static_cast<Eigen::Index>(split_fields(lines[0]).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::vector<std::string_view> fields =
        split_fields(lines[static_cast<std::size_t>(i)]);
    if (static_cast<Eigen::Index>(fields.size()) != cols) {
      throw SchemaError("row " + std::to_string(i + 1) + " of " + path +
                        " has " + std::to_string(fields.size()) +
                        " fields, expected " + std::to_string(cols));
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      double value = 0.0;
      if (!try_parse_double(fields[static_cast<std::size_t>(j)], value)) {
        throw ParseError(
            "row " + std::to_string(i + 1) + " of " + path +
            ": cannot parse '" +
            std::string(fields[static_cast<std::size_t>(j)]) +
            "' as a number");
      }
      m(i, j) = value;
    }
  }
  return m;
}

}  // namespace pobo::io

#endif  // POBO_IO_HPP_
