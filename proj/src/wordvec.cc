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

#include "setscore/wordvec.h"

#include <cctype>
#include <charconv>
#include <fstream>

#include "setscore/errors.h"

namespace setscore {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                               line[i] == '\r')) {
      ++i;
    }
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' &&
           line[j] != '\r') {
      ++j;
    }
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

}  // namespace

bool WordVecTable::insert(std::string token, std::vector<float> vector) {
  if (vectors_.empty() && dim_ == 0) dim_ = vector.size();
  if (vector.size() != dim_) {
    throw DataError("word vector for '" + token + "' has dimension " +
                    std::to_string(vector.size()) + ", table has " +
                    std::to_string(dim_));
  }
  return vectors_.emplace(std::move(token), std::move(vector)).second;
}

const std::vector<float>* WordVecTable::find(std::string_view token) const {
  auto it = vectors_.find(std::string(token));
  return it == vectors_.end() ? nullptr : &it->second;
}

WordVecTable load_wordvec_table(std::istream& in,
                                std::vector<std::string>* warnings) {
  WordVecTable table;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    const std::size_t this_dim = fields.size() - 1;
    if (table.size() == 0 && dim == 0) {
      dim = this_dim;
    } else if (this_dim != dim) {
      throw DataError("word vectors: ragged dimension at line " +
                      std::to_string(line_no) + ": expected " +
                      std::to_string(dim) + " values, got " +
                      std::to_string(this_dim));
    }
    std::vector<float> values(this_dim);
    for (std::size_t k = 0; k < this_dim; ++k) {
      std::string_view f = fields[k + 1];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), values[k]);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw DataError("word vectors: unparsable value '" + std::string(f) +
                        "' at line " + std::to_string(line_no));
      }
    }
    std::string token(fields[0]);
    if (!table.insert(token, std::move(values)) && warnings) {
      warnings->push_back("word vectors: duplicate token '" + token +
                          "' at line " + std::to_string(line_no) +
                          " ignored");
    }
  }
  if (table.size() == 0 && warnings) {
    warnings->push_back(
        "word vectors: empty table, titles encode to the zero vector");
  }
  return table;
}

WordVecTable load_wordvec_table(const std::filesystem::path& path,
                                std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open word vector file " + path.string());
  return load_wordvec_table(in, warnings);
}

std::vector<std::string> tokenize(std::string_view title) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : title) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

TitleEncoding encode_title(std::string_view title, const WordVecTable& table) {
  TitleEncoding enc{std::vector<double>(table.dim(), 0.0), 0};
  for (const std::string& token : tokenize(title)) {
    const std::vector<float>* v = table.find(token);
    if (v == nullptr) continue;
    for (std::size_t k = 0; k < v->size(); ++k) enc.vector[k] += (*v)[k];
    ++enc.hits;
  }
  if (enc.hits > 0) {
    for (double& x : enc.vector) x /= static_cast<double>(enc.hits);
  }
  return enc;
}

}  // namespace setscore
