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

#ifndef MDPRUNE_SRC_ASSIGNMENT_IO_HPP
#define MDPRUNE_SRC_ASSIGNMENT_IO_HPP

#include <string>

#include "json_util.hpp"
#include "mdprune/arch.hpp"
#include "mdprune/importance.hpp"

namespace mdp::detail {

/// {"omega": {dim_id: option, ...}, "kappa": {"<block id>": bool, ...}}.
/// kappa lists removable blocks only.
Json assignment_to_json(const ArchitectureSpec& arch, const Assignment& a);

/// Inverse of assignment_to_json. Missing dims default to their last option
/// and missing blocks to kept. The result is checked against `arch`.
Assignment assignment_from_json(const Json& j, const std::string& path,
                                const ArchitectureSpec& arch);

}  // namespace mdp::detail

#endif  // MDPRUNE_SRC_ASSIGNMENT_IO_HPP
