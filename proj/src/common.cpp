// Copyright 2026 The lolws Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lolws/common.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace lolws {

namespace {

LogLevel parseLogLevel() {
  const char* env = std::getenv("LOLWS_LOG");
  if (env == nullptr) return LogLevel::Info;
  const std::string v(env);
  if (v == "debug") return LogLevel::Debug;
  if (v == "info") return LogLevel::Info;
  if (v == "warn") return LogLevel::Warn;
  if (v == "error") return LogLevel::Error;
  if (v == "quiet") return LogLevel::Quiet;
  return LogLevel::Info;
}

const char* levelTag(LogLevel level) {
  switch (level) {
    case LogLevel::Debug: return "debug";
    case LogLevel::Info: return "info";
    case LogLevel::Warn: return "warn";
    case LogLevel::Error: return "error";
    default: return "?";
  }
}

std::mutex& logMutex() {
  static std::mutex m;
  return m;
}

}  // namespace

LogLevel logLevel() {
  static const LogLevel level = parseLogLevel();
  return level;
}

void logMessage(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) < static_cast<int>(logLevel())) return;
  std::lock_guard<std::mutex> lock(logMutex());
  std::cerr << "[lolws:" << levelTag(level) << "] " << msg << "\n";
}

}  // namespace lolws
