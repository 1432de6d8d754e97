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

#ifndef LOLWS_CLI_HPP_
#define LOLWS_CLI_HPP_

#include <string>
#include <vector>

namespace lolws::cli {

/// Runs one command line (arguments only, no program name) and returns the
/// process exit code: 0 success, 2 bad input or configuration, 3 numeric
/// failure. In-process so tests can drive the full pipeline.
int run(std::vector<std::string> args);

}  // namespace lolws::cli

#endif  // LOLWS_CLI_HPP_
