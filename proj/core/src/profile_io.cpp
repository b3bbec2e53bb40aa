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

#include "offsim/profile_io.hpp"

#include <cstdlib>
#include <filesystem>
#include <map>

#include "offsim/errors.hpp"

namespace offsim {

namespace {

// One text per profile, byte-identical to the shipped profiles/<name>.toml.
// The cast rows are generated from the bandwidth curve plus documented cast
// and staging constants; see profiles/README notes in the repo README.
const std::map<std::string, std::string>& builtin_texts() {
  static const std::map<std::string, std::string> texts = {
      {"gh200", R"(# Single GH200 superchip: Hopper GPU + Grace CPU over NVLink-C2C.
name = "gh200"

[compute]
gpu_peak_flops = 990e12
gpu_achievable_fraction = 0.6
cpu_peak_flops = 3.0e12

[memory]
gpu_bytes = 96e9
cpu_bytes = 480e9
cpu_mem_bw = 500e9

[link]
peak_bw = 900e9
# [transfer_bytes, sustained unidirectional bytes/s], log2-interpolated
bw_curve = [[65536, 50e9], [524288, 120e9], [4194304, 250e9], [16777216, 350e9], [67108864, 450e9]]

[cast]
# [full-precision tensor bytes, seconds], total cast + move cost per strategy
gpu_move_full = [[1048576, 6.813069e-06], [16777216, 5.422636e-05], [67108864, 1.742966e-04], [134217728, 3.485933e-04], [268435456, 6.971865e-04], [536870912, 1.394373e-03], [1073741824, 2.788746e-03], [2147483648, 5.577492e-03]]
cpu_move_half = [[1048576, 1.188386e-05], [16777216, 1.062557e-04], [67108864, 3.690988e-04], [134217728, 7.009148e-04], [268435456, 1.401830e-03], [536870912, 2.803659e-03], [1073741824, 5.607318e-03], [2147483648, 1.121464e-02]]
)"},
      {"dgx-a100", R"(# One A100 + host share of a DGX-A100 node (PCIe 4.0 x16).
name = "dgx-a100"

[compute]
gpu_peak_flops = 312e12
gpu_achievable_fraction = 0.6
cpu_peak_flops = 2.3e12

[memory]
gpu_bytes = 80e9
cpu_bytes = 250e9
cpu_mem_bw = 150e9

[link]
peak_bw = 64e9
bw_curve = [[65536, 8e9], [1048576, 16e9], [16777216, 28e9], [67108864, 32e9]]

[cast]
gpu_move_full = [[1048576, 6.632243e-05], [16777216, 6.117692e-04], [67108864, 2.147484e-03], [134217728, 4.294967e-03], [268435456, 8.589935e-03], [536870912, 1.717987e-02], [1073741824, 3.435974e-02], [2147483648, 6.871948e-02]]
cpu_move_half = [[1048576, 8.538405e-05], [16777216, 8.388608e-04], [67108864, 2.908051e-03], [134217728, 5.536481e-03], [268435456, 1.107296e-02], [536870912, 2.214593e-02], [1073741824, 4.429185e-02], [2147483648, 8.858370e-02]]
)"},
      {"dgx-2", R"(# One V100 + host share of a DGX-2 node (PCIe 3.0 x16).
name = "dgx-2"

[compute]
gpu_peak_flops = 125e12
gpu_achievable_fraction = 0.6
cpu_peak_flops = 2.07e12

[memory]
gpu_bytes = 32e9
cpu_bytes = 90e9
cpu_mem_bw = 100e9

[link]
peak_bw = 32e9
bw_curve = [[65536, 4e9], [1048576, 8e9], [16777216, 14e9], [67108864, 16e9]]

[cast]
gpu_move_full = [[1048576, 1.328196e-04], [16777216, 1.226335e-03], [67108864, 4.306152e-03], [134217728, 8.612304e-03], [268435456, 1.722461e-02], [536870912, 3.444922e-02], [1073741824, 6.889843e-02], [2147483648, 1.377969e-01]]
cpu_move_half = [[1048576, 1.655252e-04], [16777216, 1.593836e-03], [67108864, 5.480557e-03], [134217728, 1.040187e-02], [268435456, 2.080375e-02], [536870912, 4.160750e-02], [1073741824, 8.321499e-02], [2147483648, 1.664300e-01]]
)"},
  };
  return texts;
}

}  // namespace

HardwareProfile profile_from_table(const toml::Table& t) {
  HardwareProfile p;
  p.name = t.string("", "name");
  p.gpu_peak_flops = t.number("compute", "gpu_peak_flops");
  p.gpu_achievable_fraction = t.number_or("compute", "gpu_achievable_fraction", 0.6);
  p.cpu_peak_flops = t.number("compute", "cpu_peak_flops");
  p.gpu_mem_bytes = static_cast<std::int64_t>(t.number("memory", "gpu_bytes"));
  p.cpu_mem_bytes = static_cast<std::int64_t>(t.number("memory", "cpu_bytes"));
  p.cpu_mem_bw = t.number("memory", "cpu_mem_bw");
  p.link_peak_bw = t.number("link", "peak_bw");
  for (const auto& [bytes, bw] : t.pairs("link", "bw_curve")) {
    p.link_bw_curve.push_back({bytes, bw});
  }
  for (const auto& [bytes, s] : t.pairs("cast", "gpu_move_full")) {
    p.cast_gpu_move_full.push_back({bytes, s});
  }
  for (const auto& [bytes, s] : t.pairs("cast", "cpu_move_half")) {
    p.cast_cpu_move_half.push_back({bytes, s});
  }
  p.check();
  return p;
}

HardwareProfile load_profile_file(const std::string& path) {
  return profile_from_table(toml::parse_file(path));
}

std::vector<std::string> builtin_profile_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : builtin_texts()) names.push_back(name);
  return names;
}

const std::string& builtin_profile_text(const std::string& name) {
  const auto& texts = builtin_texts();
  auto it = texts.find(name);
  if (it == texts.end()) throw ConfigError("no builtin profile named '" + name + "'");
  return it->second;
}

HardwareProfile builtin_profile(const std::string& name) {
  return profile_from_table(toml::parse(builtin_profile_text(name), "builtin:" + name));
}

HardwareProfile resolve_profile(const std::string& spec) {
  namespace fs = std::filesystem;
  if (spec.find('/') != std::string::npos || spec.size() > 5 &&
      spec.substr(spec.size() - 5) == ".toml") {
    if (!fs::exists(spec)) throw ConfigError("profile file not found: " + spec);
    return load_profile_file(spec);
  }
  std::vector<std::string> dirs;
  if (const char* env = std::getenv(kProfilePathEnv)) {
    std::string path(env);
    std::size_t start = 0;
    while (start <= path.size()) {
      const auto colon = path.find(':', start);
      const std::string dir =
          path.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
      if (!dir.empty()) dirs.push_back(dir);
      if (colon == std::string::npos) break;
      start = colon + 1;
    }
  }
  dirs.push_back("profiles");
  for (const auto& dir : dirs) {
    const std::string candidate = dir + "/" + spec + ".toml";
    if (fs::exists(candidate)) return load_profile_file(candidate);
  }
  if (builtin_texts().count(spec) > 0) return builtin_profile(spec);
  throw ConfigError("cannot resolve profile '" + spec +
                    "': no such file, nothing on the search path, and no builtin");
}

std::vector<ModelConfig> presets_from_table(const toml::Table& t) {
  auto it = t.sections.find("models");
  if (it == t.sections.end()) throw ConfigError("preset file: missing [models] section");
  std::vector<ModelConfig> out;
  for (const auto& [name, value] : it->second) {
    if (!value.is_array() || value.array.size() < 2) {
      throw ConfigError("preset '" + name + "' must be [layers, hidden]");
    }
    ModelConfig cfg;
    cfg.name = name;
    cfg.layers = static_cast<std::int64_t>(value.array[0].number);
    cfg.hidden = static_cast<std::int64_t>(value.array[1].number);
    if (value.array.size() > 2) cfg.vocab = static_cast<std::int64_t>(value.array[2].number);
    out.push_back(cfg);
  }
  return out;
}

std::vector<ModelConfig> load_presets_file(const std::string& path) {
  return presets_from_table(toml::parse_file(path));
}

}  // namespace offsim
