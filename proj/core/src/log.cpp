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
#include "hexsched/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace hexsched {

namespace {

LogLevel parse_env_level() {
  const char *env = std::getenv("HEXSCHED_LOG");
  if (env == nullptr) {
    return LogLevel::kInfo;
  }
  if (std::strcmp(env, "quiet") == 0) {
    return LogLevel::kQuiet;
  }
  if (std::strcmp(env, "trace") == 0) {
    return LogLevel::kTrace;
  }
  return LogLevel::kInfo;
}

LogLevel &current_level() {
  static LogLevel level = parse_env_level();
  return level;
}

} // namespace

LogLevel log_level() { return current_level(); }

void set_log_level(LogLevel level) { current_level() = level; }

void log_info(const std::string &msg) {
  if (log_level() >= LogLevel::kInfo) {
    std::fprintf(stderr, "info: %s\n", msg.c_str());
  }
}

void log_trace(const std::string &msg) {
  if (log_level() >= LogLevel::kTrace) {
    std::fprintf(stderr, "trace: %s\n", msg.c_str());
  }
}

void log_warn(const std::string &msg) {
  if (log_level() >= LogLevel::kInfo) {
    std::fprintf(stderr, "warning: %s\n", msg.c_str());
  }
}

} // namespace hexsched
