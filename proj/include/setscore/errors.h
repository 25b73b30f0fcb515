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

#ifndef SETSCORE_ERRORS_H_
#define SETSCORE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace setscore {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (shapes, sizes, empty sets).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Input data is malformed or inconsistent (files, ids, dimensions).
class DataError : public Error {
 public:
  using Error::Error;
};

// A configuration value is out of range or unknown.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A computation produced NaN or Inf.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace setscore

#endif  // SETSCORE_ERRORS_H_
