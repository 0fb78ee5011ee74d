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

#ifndef QMEM_CONFIG_HPP
#define QMEM_CONFIG_HPP

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qmem/protocol.hpp"

namespace qmem {

/// A validated configuration plus the set of "section.key" names that were
/// set explicitly; everything else carries a default.
struct ParsedConfig {
    ExperimentConfig config;
    std::set<std::string> explicit_keys;
};

/// INI-style text with sections source, memory, chain, detectors, protocol.
/// Throws ConfigError on unknown keys, malformed values or broken invariants.
ParsedConfig parse_config_text(std::string_view text);
ParsedConfig parse_config(const std::filesystem::path& path);

/// Canonical form: every key, fixed order, values at 15 significant digits.
std::string emit_config(const ExperimentConfig& config);
/// Canonical form with a "; default" marker on every defaulted key.
std::string emit_config(const ParsedConfig& parsed);

/// SHA-256 of the canonical form.
std::string config_hash(const ExperimentConfig& config);

/// All recognised keys as "section.key", in canonical order.
std::vector<std::string> config_keys();

}  // namespace qmem

#endif  // QMEM_CONFIG_HPP
