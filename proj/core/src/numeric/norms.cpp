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

#include "offsim/numeric/norms.hpp"

#include <cmath>

#include "offsim/errors.hpp"

namespace offsim {

double global_grad_norm(std::span<const std::span<const float>> grad_buckets) {
  if (grad_buckets.empty()) throw DomainError("global_grad_norm: no buckets");
  double total = 0.0;
  for (const auto& bucket : grad_buckets) {
    double partial = 0.0;
    for (float g : bucket) {
      partial += static_cast<double>(g) * static_cast<double>(g);
    }
    total += partial;
  }
  return std::sqrt(total);
}

Verdict validate_gradients(std::span<const std::span<const float>> grad_buckets,
                           const AdamHyper& hyper, float loss_scale) {
  for (const auto& bucket : grad_buckets) {
    for (float g : bucket) {
      if (!std::isfinite(g)) return {Verdict::Kind::SkipNonFinite, 1.0};
    }
  }
  if (!hyper.clip_norm) return {Verdict::Kind::Proceed, 1.0};

  double total = 0.0;
  for (const auto& bucket : grad_buckets) {
    double partial = 0.0;
    for (float g : bucket) {
      const float unscaled = g / loss_scale;
      partial += static_cast<double>(unscaled) * static_cast<double>(unscaled);
    }
    total += partial;
  }
  const double norm = std::sqrt(total);
  if (norm > *hyper.clip_norm) return {Verdict::Kind::Clip, *hyper.clip_norm / norm};
  return {Verdict::Kind::Proceed, 1.0};
}

std::string to_string(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::Proceed: return "proceed";
    case Verdict::Kind::Clip: return "clip(" + std::to_string(v.coef) + ")";
    case Verdict::Kind::SkipNonFinite: return "skip_nonfinite";
  }
  return "?";
}

}  // namespace offsim
