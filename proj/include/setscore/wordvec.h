// Copyright 2026 The Authors.
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

#ifndef SETSCORE_WORDVEC_H_
#define SETSCORE_WORDVEC_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace setscore {

// Frozen token -> vector table with one dimension for every entry.
class WordVecTable {
 public:
  WordVecTable() = default;
  explicit WordVecTable(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }

  // Returns false (and keeps the existing entry) when the token is present.
  bool insert(std::string token, std::vector<float> vector);

  // nullptr on a miss.
  const std::vector<float>* find(std::string_view token) const;

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<float>> vectors_;
};

// Parses "token v1 ... vD" lines. Ragged rows and bad floats raise DataError
// with the line number; duplicate tokens keep the first entry and append a
// warning.
WordVecTable load_wordvec_table(std::istream& in,
                                std::vector<std::string>* warnings = nullptr);
WordVecTable load_wordvec_table(const std::filesystem::path& path,
                                std::vector<std::string>* warnings = nullptr);

// Lowercases ASCII letters and splits on every run of non-alphanumeric
// characters.
std::vector<std::string> tokenize(std::string_view title);

struct TitleEncoding {
  std::vector<double> vector;  // table.dim() entries
  std::size_t hits = 0;        // tokens found in the table
};

// Mean of the vectors of tokens present in the table; zero vector when no
// token hits.
TitleEncoding encode_title(std::string_view title, const WordVecTable& table);

}  // namespace setscore

#endif  // SETSCORE_WORDVEC_H_
