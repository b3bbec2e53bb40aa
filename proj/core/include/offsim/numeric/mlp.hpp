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
#include <span>
#include <vector>

namespace offsim {

// Two-layer bias-free perceptron with tanh, the gradient source for the
// protocol tests. Weights are flattened W1 (hidden x in, row-major) followed
// by W2 (out x hidden).
struct MlpSpec {
  int in = 16;
  int hidden = 32;
  int out = 8;

  std::int64_t param_count() const {
    return static_cast<std::int64_t>(hidden) * in + static_cast<std::int64_t>(out) * hidden;
  }
};

struct Batch {
  int bsz = 0;
  std::vector<double> x;  // bsz * in
  std::vector<double> y;  // bsz * out
};

// Deterministic across platforms: mt19937_64 bits mapped to [-1, 1).
Batch make_synthetic_batch(const MlpSpec& spec, std::uint64_t seed, std::int64_t iteration,
                           int bsz);

std::vector<float> init_weights(const MlpSpec& spec, std::uint64_t seed);

// Mean squared error over the batch; analytic gradients in double precision.
// Throws DomainError on a shape mismatch.
double mlp_loss_grad(const MlpSpec& spec, std::span<const double> weights,
                     const Batch& batch, std::span<double> grads_out);

// Loss only (for finite-difference probes).
double mlp_loss(const MlpSpec& spec, std::span<const double> weights, const Batch& batch);

}  // namespace offsim
