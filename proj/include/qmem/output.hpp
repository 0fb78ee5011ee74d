// Copyright 2026 The qmem Authors
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

#ifndef QMEM_OUTPUT_HPP
#define QMEM_OUTPUT_HPP

#include <filesystem>
#include <string>
#include <string_view>

namespace qmem {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

/// Parses a complete decimal number; throws std::invalid_argument otherwise.
double parse_double(std::string_view text);

/// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

}  // namespace qmem

#endif  // QMEM_OUTPUT_HPP
