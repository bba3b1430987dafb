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

#include <string>

namespace hexsched {

enum class LogLevel { kQuiet = 0, kInfo = 1, kTrace = 2 };

// Current verbosity; initialized from the HEXSCHED_LOG environment variable
// (quiet|info|trace, default info) the first time it is queried.
LogLevel log_level();
void set_log_level(LogLevel level);

// Diagnostics go to stderr so machine-readable stdout stays clean.
void log_info(const std::string &msg);
void log_trace(const std::string &msg);
void log_warn(const std::string &msg);

} // namespace hexsched
