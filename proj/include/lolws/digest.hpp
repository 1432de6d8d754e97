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

#ifndef LOLWS_DIGEST_HPP_
#define LOLWS_DIGEST_HPP_

#include <string>

namespace lolws {

/// SHA-256 of a byte string, as lowercase hex.
std::string sha256Hex(const std::string& bytes);

/// SHA-256 of a file's contents. Throws DataError if unreadable.
std::string sha256HexFile(const std::string& path);

}  // namespace lolws

#endif  // LOLWS_DIGEST_HPP_
