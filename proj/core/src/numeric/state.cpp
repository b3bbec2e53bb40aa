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

#include "offsim/numeric/state.hpp"

#include <cstdio>
#include <cstring>
#include <memory>

#include "offsim/errors.hpp"

namespace offsim {

TrainState TrainState::zeros(std::size_t n) {
  TrainState s;
  s.master.assign(n, 0.0f);
  s.moment1.assign(n, 0.0f);
  s.moment2.assign(n, 0.0f);
  s.working.assign(n, Half());
  s.refresh_working();
  return s;
}

TrainState TrainState::from_weights(const std::vector<float>& weights) {
  TrainState s = zeros(weights.size());
  s.master = weights;
  s.refresh_working();
  return s;
}

void TrainState::refresh_working(std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    working[i] = Half::from_float(master[i]);
  }
}

namespace {

constexpr char kMagic[8] = {'O', 'F', 'S', 'I', 'M', 'C', 'K', '1'};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_exact(std::FILE* f, const void* data, std::size_t bytes, const std::string& path) {
  if (std::fwrite(data, 1, bytes, f) != bytes) {
    throw ConfigError("checkpoint write failed: " + path);
  }
}

void read_exact(std::FILE* f, void* data, std::size_t bytes, const std::string& path) {
  if (std::fread(data, 1, bytes, f) != bytes) {
    throw ConfigError("checkpoint truncated: " + path);
  }
}

}  // namespace

void checkpoint_save(const TrainState& state, const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw ConfigError("cannot open checkpoint for writing: " + path);
  write_exact(f.get(), kMagic, sizeof(kMagic), path);
  const std::uint64_t n = state.size();
  write_exact(f.get(), &n, sizeof(n), path);
  write_exact(f.get(), &state.step, sizeof(state.step), path);
  write_exact(f.get(), &state.loss_scale, sizeof(state.loss_scale), path);
  write_exact(f.get(), state.master.data(), n * sizeof(float), path);
  write_exact(f.get(), state.moment1.data(), n * sizeof(float), path);
  write_exact(f.get(), state.moment2.data(), n * sizeof(float), path);
  for (const Half& h : state.working) {
    const std::uint16_t bits = h.bits();
    write_exact(f.get(), &bits, sizeof(bits), path);
  }
}

TrainState checkpoint_load(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw ConfigError("cannot open checkpoint: " + path);
  char magic[8];
  read_exact(f.get(), magic, sizeof(magic), path);
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ConfigError("not an offsim checkpoint: " + path);
  }
  std::uint64_t n = 0;
  TrainState state;
  read_exact(f.get(), &n, sizeof(n), path);
  read_exact(f.get(), &state.step, sizeof(state.step), path);
  read_exact(f.get(), &state.loss_scale, sizeof(state.loss_scale), path);
  state.master.resize(n);
  state.moment1.resize(n);
  state.moment2.resize(n);
  state.working.resize(n);
  read_exact(f.get(), state.master.data(), n * sizeof(float), path);
  read_exact(f.get(), state.moment1.data(), n * sizeof(float), path);
  read_exact(f.get(), state.moment2.data(), n * sizeof(float), path);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint16_t bits = 0;
    read_exact(f.get(), &bits, sizeof(bits), path);
    state.working[i] = Half::from_bits(bits);
  }
  return state;
}

}  // namespace offsim
