/* Copyright 2026 The hexsched Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

// Internal helpers shared by the document parsers. Not installed.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "hexsched/errors.hpp"

namespace hexsched {

using json = nlohmann::json;

inline json parse_json(const std::string &text, const std::string &what) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    throw ParseError(what + ": malformed JSON");
  }
  return j;
}

inline const json &require_field(const json &j, const char *key,
                                 const std::string &what) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError(what + ": missing field '" + key + "'");
  }
  return *it;
}

inline double get_double(const json &j, const char *key,
                         const std::string &what) {
  const json &v = require_field(j, key, what);
  if (!v.is_number()) {
    throw ParseError(what + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

// Byte counts and token counts are integral; a fractional value is an input
// mistake rather than something to round silently.
inline int64_t get_int(const json &j, const char *key, const std::string &what) {
  const json &v = require_field(j, key, what);
  if (v.is_number_integer() || v.is_number_unsigned()) {
    return v.get<int64_t>();
  }
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9.2e18) {
      return (int64_t)d;
    }
  }
  throw ParseError(what + ": field '" + key + "' must be an integer");
}

inline std::string get_string(const json &j, const char *key,
                              const std::string &what) {
  const json &v = require_field(j, key, what);
  if (!v.is_string()) {
    throw ParseError(what + ": field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

inline std::optional<double> opt_double(const json &j, const char *key,
                                        const std::string &what) {
  if (!j.contains(key) || j.at(key).is_null()) {
    return std::nullopt;
  }
  return get_double(j, key, what);
}

inline std::optional<int64_t> opt_int(const json &j, const char *key,
                                      const std::string &what) {
  if (!j.contains(key) || j.at(key).is_null()) {
    return std::nullopt;
  }
  return get_int(j, key, what);
}

} // namespace hexsched
