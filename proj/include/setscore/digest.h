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

#ifndef SETSCORE_DIGEST_H_
#define SETSCORE_DIGEST_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace setscore {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

std::string read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::string_view bytes);

// Digest over every regular file below `dir`, in sorted relative-path order,
// covering both names and contents.
std::string directory_digest(const std::filesystem::path& dir);

}  // namespace setscore

#endif  // SETSCORE_DIGEST_H_
