// Copyright 2026 The lfmf Authors.
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

#include "lfmf/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "lfmf/errors.hpp"

namespace lfmf {

namespace {

std::string quote(const std::string& v) {
  if (v.find_first_of(",\"\n\r") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_number(long long v) { return std::to_string(v); }

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) text_ += ',';
    text_ += quote(header[i]);
  }
  text_ += '\n';
}

void CsvTable::end_row() {
  if (!open_) return;
  if (cells_in_row_ != columns_) throw DimensionError("csv: row has wrong width");
  text_ += '\n';
  open_ = false;
}

CsvTable& CsvTable::row() {
  end_row();
  open_ = true;
  cells_in_row_ = 0;
  return *this;
}

CsvTable& CsvTable::add(const std::string& v) {
  if (!open_) throw std::logic_error("csv: add() before row()");
  if (cells_in_row_ > 0) text_ += ',';
  text_ += quote(v);
  ++cells_in_row_;
  return *this;
}

CsvTable& CsvTable::add(double v) { return add(format_number(v)); }
CsvTable& CsvTable::add(long long v) { return add(format_number(v)); }

std::string CsvTable::str() const {
  CsvTable copy = *this;
  copy.end_row();
  return copy.text_;
}

void CsvTable::write(const std::filesystem::path& path) const {
  const std::string body = str();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace lfmf
