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

#ifndef MDPRUNE_SRC_JSON_UTIL_HPP
#define MDPRUNE_SRC_JSON_UTIL_HPP

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mdprune/error.hpp"

namespace mdp::detail {

using Json = nlohmann::json;

inline Json parse_document(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // Report line/column rather than nlohmann's byte offset.
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ValidationError(std::string(what) + ": parse error at line " +
                          std::to_string(line) + ", column " +
                          std::to_string(col) + ": " + e.what());
  } catch (const Json::exception& e) {
    throw ValidationError(std::string(what) + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("cannot write '" + path + "'");
}

inline void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path + ": expected an object");
}

inline void require_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path + ": expected a list");
}

/// Rejects keys outside `allowed`.
inline void check_keys(const Json& j, const std::string& path,
                       std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError(path + ": unknown key '" + key + "'");
  }
}

inline const Json& member(const Json& j, const std::string& path,
                          const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw ValidationError(path + ": missing key '" + key + "'");
  return *it;
}

inline std::string get_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ValidationError(path + ": expected a string");
  return j.get<std::string>();
}

inline long long get_integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer())
    throw ValidationError(path + ": expected an integer");
  return j.get<long long>();
}

inline bool get_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) throw ValidationError(path + ": expected true/false");
  return j.get<bool>();
}

inline double get_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ValidationError(path + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError(path + ": non-finite value");
  return v;
}

inline std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

}  // namespace mdp::detail

#endif  // MDPRUNE_SRC_JSON_UTIL_HPP
