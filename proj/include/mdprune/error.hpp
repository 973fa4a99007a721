// Copyright 2026 The mdprune Authors
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

#ifndef MDPRUNE_ERROR_HPP
#define MDPRUNE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mdp {

/// Error categories. The numeric values of the first four double as the
/// CLI exit codes and the C API status codes.
enum class ErrorKind {
  infeasible = 2,
  validation = 3,
  io = 4,
  invalid_argument = 5,
  limit = 6,
  internal = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed documents, shape mismatches and broken invariants.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::validation, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what)
      : Error(ErrorKind::invalid_argument, what) {}
};

/// A guard (state-space size, tensor size) was exceeded.
class LimitError : public Error {
 public:
  explicit LimitError(const std::string& what) : Error(ErrorKind::limit, what) {}
};

}  // namespace mdp

#endif  // MDPRUNE_ERROR_HPP
