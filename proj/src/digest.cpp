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

#include "lolws/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <sstream>

#include "lolws/common.hpp"

namespace lolws {

std::string sha256Hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int mdLen = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &mdLen, EVP_sha256(), nullptr) != 1) {
    throw NumericError("sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * mdLen);
  for (unsigned int i = 0; i < mdLen; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

std::string sha256HexFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file for digest: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256Hex(buf.str());
}

}  // namespace lolws
