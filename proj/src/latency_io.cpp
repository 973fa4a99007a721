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

#include <bit>
#include <cstring>

#include <openssl/evp.h>

#include "assignment_io.hpp"
#include "json_util.hpp"
#include "mdprune/error.hpp"
#include "mdprune/latency.hpp"

namespace mdp {

namespace {

using detail::Json;

constexpr std::string_view kBase64 = "base64-f64le";

static_assert(std::endian::native == std::endian::little,
              "base-64 payloads assume a little-endian host");

std::string encode_f64(const std::vector<double>& values) {
  std::string raw(values.size() * sizeof(double), '\0');
  std::memcpy(raw.data(), values.data(), raw.size());
  std::string out(4 * ((raw.size() + 2) / 3) + 1, '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(raw.data()),
                                static_cast<int>(raw.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<double> decode_f64(const std::string& text, const std::string& path) {
  if (text.size() % 4 != 0)
    throw ValidationError(path + ": base-64 length is not a multiple of 4");
  std::string raw(text.size() / 4 * 3 + 1, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(raw.data()),
                                reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw ValidationError(path + ": invalid base-64 payload");
  std::size_t len = static_cast<std::size_t>(n);
  // EVP_DecodeBlock counts padding bytes as data.
  if (!text.empty() && text.back() == '=') --len;
  if (text.size() > 1 && text[text.size() - 2] == '=') --len;
  if (len % sizeof(double) != 0)
    throw ValidationError(path + ": payload is not a whole number of float64");
  std::vector<double> values(len / sizeof(double));
  std::memcpy(values.data(), raw.data(), len);
  return values;
}

std::optional<TablePart> parse_part(const std::string& name, int layer) {
  if (name == "conv_layer") return TablePart::conv(layer);
  if (name == "qk") return TablePart::qk();
  if (name == "vproj") return TablePart::vproj();
  if (name == "mlp") return TablePart::mlp();
  return std::nullopt;
}

}  // namespace

LatencyTableSet parse_lut(std::string_view document) {
  using namespace detail;
  const Json root = parse_document(document, "lut");
  require_object(root, "$");
  check_keys(root, "$", {"tables", "manifest_sha256"});
  const Json& list = member(root, "$", "tables");
  require_array(list, "$.tables");

  std::vector<LatencyTable> tables;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string p = index_path("$.tables", i);
    const Json& jt = list[i];
    require_object(jt, p);
    check_keys(jt, p, {"block_id", "part", "layer", "axes", "shape", "encoding", "data"});
    LatencyTable t;
    t.block_id = static_cast<int>(get_integer(member(jt, p, "block_id"), p + ".block_id"));
    const std::string part = get_string(member(jt, p, "part"), p + ".part");
    int layer = 0;
    if (part == "conv_layer") {
      layer = static_cast<int>(get_integer(member(jt, p, "layer"), p + ".layer"));
    } else if (jt.contains("layer")) {
      throw ValidationError(p + ": 'layer' only applies to conv_layer tables");
    }
    auto parsed = parse_part(part, layer);
    if (!parsed) throw ValidationError(p + ".part: unknown part '" + part + "'");
    t.part = *parsed;

    const Json& axes = member(jt, p, "axes");
    require_array(axes, p + ".axes");
    for (std::size_t k = 0; k < axes.size(); ++k)
      t.axes.push_back(get_string(axes[k], index_path(p + ".axes", k)));
    const Json& shape = member(jt, p, "shape");
    require_array(shape, p + ".shape");
    for (std::size_t k = 0; k < shape.size(); ++k) {
      const long long s = get_integer(shape[k], index_path(p + ".shape", k));
      if (s < 1) throw ValidationError(index_path(p + ".shape", k) + ": must be positive");
      t.shape.push_back(static_cast<std::size_t>(s));
    }
    if (t.shape.size() != t.part.rank())
      throw ValidationError(p + ": rank-" + std::to_string(t.shape.size()) +
                            " data declared as " + part + " (expects rank " +
                            std::to_string(t.part.rank()) + ")");

    std::string encoding = "text";
    if (jt.contains("encoding")) encoding = get_string(jt["encoding"], p + ".encoding");
    const Json& data = member(jt, p, "data");
    if (encoding == "text") {
      require_array(data, p + ".data");
      t.data.reserve(data.size());
      for (std::size_t k = 0; k < data.size(); ++k) {
        const std::string dp = index_path(p + ".data", k);
        t.data.push_back(get_number(data[k], dp));
        if (t.data.back() < 0.0) throw ValidationError(dp + ": negative latency");
      }
    } else if (encoding == kBase64) {
      t.data = decode_f64(get_string(data, p + ".data"), p + ".data");
    } else {
      throw ValidationError(p + ".encoding: unknown encoding '" + encoding + "'");
    }
    try {
      check_table(t);
    } catch (const ValidationError& e) {
      throw ValidationError(p + ": " + e.what());
    }
    tables.push_back(std::move(t));
  }
  return LatencyTableSet(std::move(tables));
}

LatencyTableSet load_lut(const std::string& path) {
  try {
    return parse_lut(detail::read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string serialize_lut(const LatencyTableSet& tables, PayloadEncoding encoding,
                          const std::string& manifest_sha256) {
  Json list = Json::array();
  for (const auto& t : tables.tables()) {
    Json jt = {{"block_id", t.block_id},
               {"part", std::string(to_string(t.part.kind))},
               {"axes", t.axes},
               {"shape", t.shape}};
    if (t.part.kind == PartKind::conv_layer) jt["layer"] = t.part.layer;
    if (encoding == PayloadEncoding::base64) {
      jt["encoding"] = std::string(kBase64);
      jt["data"] = encode_f64(t.data);
    } else {
      jt["data"] = t.data;
    }
    list.push_back(std::move(jt));
  }
  Json root = {{"tables", std::move(list)}};
  if (!manifest_sha256.empty()) root["manifest_sha256"] = manifest_sha256;
  return root.dump(1) + "\n";
}

PruneTrajectory parse_trajectory(std::string_view document,
                                 const ArchitectureSpec& arch) {
  using namespace detail;
  const Json root = parse_document(document, "trajectory");
  require_object(root, "$");
  check_keys(root, "$", {"steps"});
  const Json& steps = member(root, "$", "steps");
  require_array(steps, "$.steps");
  PruneTrajectory traj;
  for (std::size_t i = 0; i < steps.size(); ++i)
    traj.steps.push_back(assignment_from_json(steps[i], index_path("$.steps", i), arch));
  return traj;
}

}  // namespace mdp
