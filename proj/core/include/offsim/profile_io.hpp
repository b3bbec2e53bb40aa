/* Copyright 2026 The Offsim Authors.
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
#include <vector>

#include "offsim/hw.hpp"
#include "offsim/memplan.hpp"
#include "offsim/toml.hpp"

namespace offsim {

// Environment variable holding a colon-separated profile search path.
inline constexpr const char* kProfilePathEnv = "OFFSIM_PROFILE_PATH";

HardwareProfile profile_from_table(const toml::Table& table);
HardwareProfile load_profile_file(const std::string& path);

// Profiles compiled in from the same text as the shipped profiles/ files.
std::vector<std::string> builtin_profile_names();
const std::string& builtin_profile_text(const std::string& name);
HardwareProfile builtin_profile(const std::string& name);

// Resolution order: an existing file path; `<dir>/<name>.toml` over
// $OFFSIM_PROFILE_PATH then ./profiles; the builtin table. Throws ConfigError
// naming the spec when nothing matches.
HardwareProfile resolve_profile(const std::string& spec);

// Preset files use `name = [layers, hidden]` rows (vocab defaults to 50257).
std::vector<ModelConfig> presets_from_table(const toml::Table& table);
std::vector<ModelConfig> load_presets_file(const std::string& path);

}  // namespace offsim
