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

#include <cstddef>
#include <span>

#include "offsim/numeric/state.hpp"

namespace offsim {

inline constexpr std::size_t kDefaultTileElems = 4096;

// Applies one Adam update to state elements [begin, end) using `grads`
// (slice-local, grads[i] pairs with element begin+i). `t` is the 1-based
// bias-correction step. Work proceeds in tiles of `tile_elems` elements; the
// update is elementwise, so the result is bitwise independent of the tile
// size. Per element, in single precision:
//   m <- b1*m + (1-b1)*g
//   v <- b2*v + (1-b2)*g^2
//   p <- p - lr*wd*p - lr*(m/(1-b1^t)) / (sqrt(v/(1-b2^t)) + eps)
void adam_step_bucket(TrainState& state, std::span<const float> grads,
                      std::size_t begin, std::size_t end, const AdamHyper& hyper,
                      std::int64_t t, std::size_t tile_elems = kDefaultTileElems);

// Plain per-element loop without tiling, kept as the comparison baseline for
// the kernel benchmark.
void adam_step_range_scalar(TrainState& state, std::span<const float> grads,
                            std::size_t begin, std::size_t end, const AdamHyper& hyper,
                            std::int64_t t);

}  // namespace offsim
