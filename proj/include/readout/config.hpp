// Copyright 2026 The readout-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "readout/experiments.hpp"

namespace readout {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Parse a JSON scenario document. Unknown keys are hard errors (the message
/// names the offending key path), as are non-finite numbers and schema type
/// mismatches. Defaults are the standard quantum-dot setup so "{}" runs out of the
/// box. `overrides` are dotted-key=value strings (e.g. params.eta=0.025)
/// applied on top of the document before validation.
Scenario parse_config_text(const std::string& json_text,
                           const std::vector<std::string>& overrides = {});

/// Same, reading from a file. A missing or unreadable file is a ConfigError.
Scenario parse_config(const std::string& path,
                      const std::vector<std::string>& overrides = {});

/// The built-in defaults (quantum-dot parameter set, four-level model).
Scenario default_scenario();

/// Example configuration document matching the schema (for --help and docs).
std::string example_config_json();

}  // namespace readout
