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

#include "assignment_io.hpp"

#include "mdprune/error.hpp"

namespace mdp::detail {

Json assignment_to_json(const ArchitectureSpec& arch, const Assignment& a) {
  Json omega = Json::object();
  for (std::size_t i = 0; i < arch.dim_count(); ++i)
    omega[arch.dims()[i].id] = a.omega[i];
  Json kappa = Json::object();
  for (std::size_t b = 0; b < arch.block_count(); ++b)
    if (arch.blocks()[b].removable)
      kappa[std::to_string(arch.blocks()[b].id)] = a.kappa[b] != 0;
  return {{"omega", std::move(omega)}, {"kappa", std::move(kappa)}};
}

Assignment assignment_from_json(const Json& j, const std::string& path,
                                const ArchitectureSpec& arch) {
  require_object(j, path);
  check_keys(j, path, {"omega", "kappa"});
  Assignment a = full_assignment(arch);
  if (j.contains("omega")) {
    const Json& omega = j["omega"];
    require_object(omega, path + ".omega");
    for (const auto& [id, value] : omega.items()) {
      auto di = arch.find_dim(id);
      if (!di)
        throw ValidationError(path + ".omega: unknown dimension '" + id + "'");
      a.omega[*di] =
          static_cast<int>(get_integer(value, path + ".omega." + id));
    }
  }
  if (j.contains("kappa")) {
    const Json& kappa = j["kappa"];
    require_object(kappa, path + ".kappa");
    for (const auto& [id, value] : kappa.items()) {
      std::size_t b = arch.block_count();
      for (std::size_t k = 0; k < arch.block_count(); ++k)
        if (std::to_string(arch.blocks()[k].id) == id) b = k;
      if (b == arch.block_count())
        throw ValidationError(path + ".kappa: unknown block '" + id + "'");
      a.kappa[b] = get_bool(value, path + ".kappa." + id) ? 1 : 0;
    }
  }
  try {
    check_assignment(arch, a);
  } catch (const ArgumentError& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return a;
}

}  // namespace mdp::detail
