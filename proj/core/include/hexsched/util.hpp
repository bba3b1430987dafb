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

#include <cstdint>
#include <functional>
#include <string>

namespace hexsched {

// Reads a whole file; throws ParseError when the file cannot be opened.
std::string read_file(const std::string &path);

// Writes content atomically enough for our purposes (truncate + write).
void write_file(const std::string &path, const std::string &content);

// FNV-1a 64-bit content hash, hex-encoded. Used by run manifests so reruns
// can detect changed inputs without storing the inputs themselves.
std::string fnv1a_hex(const std::string &content);

// Shortest round-trip decimal form of a double (std::to_chars). All CSV and
// JSON emitters use this one formatter so outputs are byte-stable.
std::string format_double(double v);

// Runs fn(0..count-1), split over up to `threads` workers (strided by index).
// Callers must write results into per-index slots; with that discipline the
// outcome is independent of the thread count. The first exception thrown by
// any worker is rethrown after all workers join.
void parallel_for(int64_t count, int threads,
                  const std::function<void(int64_t)> &fn);

} // namespace hexsched
