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

#include "offsim/numeric/adam.hpp"

#include <cmath>

#include "offsim/errors.hpp"

namespace offsim {

void AdamHyper::check() const {
  if (beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1) {
    throw DomainError("AdamHyper: betas must be in [0,1)");
  }
  if (eps <= 0) throw DomainError("AdamHyper: eps must be positive");
  if (weight_decay < 0) throw DomainError("AdamHyper: weight_decay must be nonnegative");
  if (clip_norm && *clip_norm <= 0) throw DomainError("AdamHyper: clip_norm must be positive");
}

namespace {

struct StepConstants {
  float beta1, beta2, one_minus_beta1, one_minus_beta2;
  float inv_bc1, inv_bc2;
  float lr, wd_lr, eps;
};

StepConstants make_constants(const AdamHyper& hyper, std::int64_t t) {
  StepConstants c;
  c.beta1 = static_cast<float>(hyper.beta1);
  c.beta2 = static_cast<float>(hyper.beta2);
  c.one_minus_beta1 = static_cast<float>(1.0 - hyper.beta1);
  c.one_minus_beta2 = static_cast<float>(1.0 - hyper.beta2);
  c.inv_bc1 = static_cast<float>(1.0 / (1.0 - std::pow(hyper.beta1, static_cast<double>(t))));
  c.inv_bc2 = static_cast<float>(1.0 / (1.0 - std::pow(hyper.beta2, static_cast<double>(t))));
  c.lr = static_cast<float>(hyper.lr);
  c.wd_lr = static_cast<float>(hyper.lr * hyper.weight_decay);
  c.eps = static_cast<float>(hyper.eps);
  return c;
}

inline void update_span(float* __restrict p, float* __restrict m, float* __restrict v,
                        const float* __restrict g, std::size_t count,
                        const StepConstants& c) {
  for (std::size_t i = 0; i < count; ++i) {
    const float grad = g[i];
    float m_i = c.beta1 * m[i] + c.one_minus_beta1 * grad;
    float v_i = c.beta2 * v[i] + c.one_minus_beta2 * (grad * grad);
    const float m_hat = m_i * c.inv_bc1;
    const float v_hat = v_i * c.inv_bc2;
    const float denom = std::sqrt(v_hat) + c.eps;
    const float decay = c.wd_lr * p[i];
    p[i] = p[i] - decay - c.lr * (m_hat / denom);
    m[i] = m_i;
    v[i] = v_i;
  }
}

void check_range(const TrainState& state, std::span<const float> grads, std::size_t begin,
                 std::size_t end, std::int64_t t) {
  if (begin > end || end > state.size()) throw DomainError("adam step: slice out of range");
  if (grads.size() < end - begin) throw DomainError("adam step: gradient slice too short");
  if (t < 1) throw DomainError("adam step: step index must be >= 1");
}

}  // namespace

void adam_step_bucket(TrainState& state, std::span<const float> grads, std::size_t begin,
                      std::size_t end, const AdamHyper& hyper, std::int64_t t,
                      std::size_t tile_elems) {
  hyper.check();
  check_range(state, grads, begin, end, t);
  if (tile_elems == 0) throw DomainError("adam step: tile_elems must be positive");
  const StepConstants c = make_constants(hyper, t);
  for (std::size_t off = begin; off < end; off += tile_elems) {
    const std::size_t count = std::min(tile_elems, end - off);
    update_span(state.master.data() + off, state.moment1.data() + off,
                state.moment2.data() + off, grads.data() + (off - begin), count, c);
  }
}

void adam_step_range_scalar(TrainState& state, std::span<const float> grads,
                            std::size_t begin, std::size_t end, const AdamHyper& hyper,
                            std::int64_t t) {
  hyper.check();
  check_range(state, grads, begin, end, t);
  const StepConstants c = make_constants(hyper, t);
  for (std::size_t i = begin; i < end; ++i) {
    const float grad = grads[i - begin];
    float m_i = c.beta1 * state.moment1[i] + c.one_minus_beta1 * grad;
    float v_i = c.beta2 * state.moment2[i] + c.one_minus_beta2 * (grad * grad);
    const float m_hat = m_i * c.inv_bc1;
    const float v_hat = v_i * c.inv_bc2;
    const float denom = std::sqrt(v_hat) + c.eps;
    const float decay = c.wd_lr * state.master[i];
    state.master[i] = state.master[i] - decay - c.lr * (m_hat / denom);
    state.moment1[i] = m_i;
    state.moment2[i] = v_i;
  }
}

}  // namespace offsim
