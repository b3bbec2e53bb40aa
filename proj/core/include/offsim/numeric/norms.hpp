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

#include <span>
#include <vector>

#include "offsim/numeric/state.hpp"

namespace offsim {

// L2 norm with a fixed reduction order: sequential double-precision sum of
// squares per bucket, then a sequential sum across buckets in bucket-id
// order, then one square root. The order is part of the contract so parallel
// callers can reproduce it exactly.
double global_grad_norm(std::span<const std::span<const float>> grad_buckets);

// Deferred validation of one iteration's (still scaled) gradients:
// SkipNonFinite if any element is non-finite (checked before unscaling, so an
// Inf is not masked by turning into NaN); otherwise unscale, take the global
// norm, and clip when it exceeds the threshold (strict inequality; a norm
// exactly at the threshold proceeds).
Verdict validate_gradients(std::span<const std::span<const float>> grad_buckets,
                           const AdamHyper& hyper, float loss_scale);

}  // namespace offsim
