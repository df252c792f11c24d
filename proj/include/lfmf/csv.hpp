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

// Minimal CSV output: header row, comma separator, numbers with 17
// significant digits so that every double round-trips.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace lfmf {

std::string format_number(double v);
std::string format_number(long long v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  // Starts a new row; append cells with add().
  CsvTable& row();
  CsvTable& add(double v);
  CsvTable& add(long long v);
  CsvTable& add(int v) { return add(static_cast<long long>(v)); }
  CsvTable& add(const std::string& v);

  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::string text_;
  std::size_t cells_in_row_ = 0;
  bool open_ = false;
  void end_row();
};

}  // namespace lfmf
