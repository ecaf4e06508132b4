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

#pragma once

#include <stdexcept>
#include <string>

namespace pobo {

// Caller supplied arguments outside an operation's domain.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A linear-algebra step failed beyond recovery (factorization, SVD).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// An operation was invoked outside the regime its guarantee covers.
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

// Filesystem-level failure: missing, unreadable, or unwritable file.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// A data file is present but lacks a required column.
class SchemaError : public IoError {
 public:
  explicit SchemaError(const std::string& what) : IoError(what) {}
};

// A data file cell failed numeric parsing; the message names the location.
class ParseError : public IoError {
 public:
  explicit ParseError(const std::string& what) : IoError(what) {}
};

}  // namespace pobo
