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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "offsim/numeric/half.hpp"

namespace offsim {

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled
  std::optional<double> clip_norm;

  void check() const;
};

// Mixed-precision optimizer state: full-precision masters and moments plus a
// half-precision working mirror. working[i] == round_to_half(master[i]) at
// every iteration boundary.
struct TrainState {
  std::vector<float> master;
  std::vector<float> moment1;
  std::vector<float> moment2;
  std::vector<Half> working;
  std::int64_t step = 0;
  float loss_scale = 1024.0f;
  std::int64_t clean_steps = 0;  // applied iterations since the last skip

  std::size_t size() const { return master.size(); }

  static TrainState zeros(std::size_t n);
  static TrainState from_weights(const std::vector<float>& weights);

  void refresh_working(std::size_t begin, std::size_t end);
  void refresh_working() { refresh_working(0, size()); }
};

struct Verdict {
  enum class Kind { Proceed, Clip, SkipNonFinite } kind = Kind::Proceed;
  double coef = 1.0;  // clip coefficient, < 1 when kind == Clip

  bool operator==(const Verdict&) const = default;
};

std::string to_string(const Verdict& v);

// Saved full-precision slices of one speculatively stepped bucket.
struct BucketSnapshot {
  int bucket_id = -1;
  std::size_t begin = 0;
  std::vector<float> master;
  std::vector<float> moment1;
  std::vector<float> moment2;
  std::int64_t step = 0;
};

// Loss-scale policy shared by the speculative and synchronous paths: halve on
// a skipped iteration, double after 2000 consecutive applied iterations.
inline constexpr std::int64_t kLossScaleGrowthInterval = 2000;
inline constexpr float kLossScaleMin = 0x1p-16f;
inline constexpr float kLossScaleMax = 0x1p24f;

void checkpoint_save(const TrainState& state, const std::string& path);
TrainState checkpoint_load(const std::string& path);

}  // namespace offsim
