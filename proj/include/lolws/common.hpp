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

#ifndef LOLWS_COMMON_HPP_
#define LOLWS_COMMON_HPP_

#include <stdexcept>
#include <string>

namespace lolws {

inline constexpr const char* kToolVersion = "1.0.0";

/// Bad user input: malformed config, invalid flag combination, unusable file.
/// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent data encountered while reading corpus/cache
/// files. Also exit code 2 (the input has to be fixed by the user).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite value produced during training or evaluation. Exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3, Quiet = 4 };

/// Current verbosity, parsed once from the LOLWS_LOG environment variable
/// (debug|info|warn|error|quiet). Defaults to Info.
LogLevel logLevel();

/// Writes one line to stderr if `level` is at or above the current verbosity.
/// Thread safe (whole lines, single lock).
void logMessage(LogLevel level, const std::string& msg);

inline void logDebug(const std::string& msg) { logMessage(LogLevel::Debug, msg); }
inline void logInfo(const std::string& msg) { logMessage(LogLevel::Info, msg); }
inline void logWarn(const std::string& msg) { logMessage(LogLevel::Warn, msg); }
inline void logError(const std::string& msg) { logMessage(LogLevel::Error, msg); }

}  // namespace lolws

#endif  // LOLWS_COMMON_HPP_
