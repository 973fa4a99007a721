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

#ifndef MDPRUNE_TESTS_SUPPORT_ERRORS_HPP
#define MDPRUNE_TESTS_SUPPORT_ERRORS_HPP

#include <optional>
#include <string>

#include "mdprune/error.hpp"

namespace mdp::testing {

struct Caught {
  ErrorKind kind;
  std::string message;
};

/// Runs `fn` and returns the mdp::Error it threw, if any.
template <typename Fn>
std::optional<Caught> catch_error(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return Caught{e.kind(), e.what()};
  }
  return std::nullopt;
}

inline bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace mdp::testing

#endif  // MDPRUNE_TESTS_SUPPORT_ERRORS_HPP
