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

#include <stdexcept>
#include <string>

namespace hexsched {

// Malformed input document or a value that violates a structural constraint.
// The CLI maps this to exit code 2.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string &msg) : std::runtime_error(msg) {}
};

// Structurally sound input that fails a semantic invariant (bad partition,
// head coverage, negative length, ...). Also exit code 2.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string &msg) : std::runtime_error(msg) {}
};

// No feasible placement exists for the requested problem. Exit code 3.
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace hexsched
