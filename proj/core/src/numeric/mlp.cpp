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

#include "offsim/numeric/mlp.hpp"

#include <cmath>
#include <random>

#include "offsim/errors.hpp"

namespace offsim {

namespace {

// mt19937_64 output is pinned by the standard; the mapping keeps the stream
// reproducible across compilers, unlike std::uniform_real_distribution.
double next_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-52 - 1.0;  // [-1, 1)
}

}  // namespace

Batch make_synthetic_batch(const MlpSpec& spec, std::uint64_t seed, std::int64_t iteration,
                           int bsz) {
  std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(iteration + 1)));
  Batch b;
  b.bsz = bsz;
  b.x.resize(static_cast<std::size_t>(bsz) * spec.in);
  b.y.resize(static_cast<std::size_t>(bsz) * spec.out);
  for (auto& v : b.x) v = next_uniform(rng);
  for (auto& v : b.y) v = 0.5 * next_uniform(rng);
  return b;
}

std::vector<float> init_weights(const MlpSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<float> w(spec.param_count());
  const double scale1 = 1.0 / std::sqrt(static_cast<double>(spec.in));
  const double scale2 = 1.0 / std::sqrt(static_cast<double>(spec.hidden));
  const std::size_t w1 = static_cast<std::size_t>(spec.hidden) * spec.in;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double scale = i < w1 ? scale1 : scale2;
    w[i] = static_cast<float>(next_uniform(rng) * scale);
  }
  return w;
}

double mlp_loss(const MlpSpec& spec, std::span<const double> weights, const Batch& batch) {
  if (weights.size() != static_cast<std::size_t>(spec.param_count())) {
    throw DomainError("mlp: weight vector length mismatch");
  }
  if (batch.x.size() != static_cast<std::size_t>(batch.bsz) * spec.in ||
      batch.y.size() != static_cast<std::size_t>(batch.bsz) * spec.out) {
    throw DomainError("mlp: batch shape mismatch");
  }
  const double* w1 = weights.data();
  const double* w2 = weights.data() + static_cast<std::size_t>(spec.hidden) * spec.in;
  double loss = 0.0;
  std::vector<double> a(spec.hidden);
  for (int s = 0; s < batch.bsz; ++s) {
    const double* x = batch.x.data() + static_cast<std::size_t>(s) * spec.in;
    const double* y = batch.y.data() + static_cast<std::size_t>(s) * spec.out;
    for (int j = 0; j < spec.hidden; ++j) {
      double z = 0.0;
      const double* row = w1 + static_cast<std::size_t>(j) * spec.in;
      for (int i = 0; i < spec.in; ++i) z += row[i] * x[i];
      a[j] = std::tanh(z);
    }
    for (int k = 0; k < spec.out; ++k) {
      double z = 0.0;
      const double* row = w2 + static_cast<std::size_t>(k) * spec.hidden;
      for (int j = 0; j < spec.hidden; ++j) z += row[j] * a[j];
      const double err = z - y[k];
      loss += err * err;
    }
  }
  return 0.5 * loss / (static_cast<double>(batch.bsz) * spec.out);
}

double mlp_loss_grad(const MlpSpec& spec, std::span<const double> weights,
                     const Batch& batch, std::span<double> grads_out) {
  if (grads_out.size() != weights.size()) {
    throw DomainError("mlp: gradient vector length mismatch");
  }
  if (weights.size() != static_cast<std::size_t>(spec.param_count())) {
    throw DomainError("mlp: weight vector length mismatch");
  }
  if (batch.x.size() != static_cast<std::size_t>(batch.bsz) * spec.in ||
      batch.y.size() != static_cast<std::size_t>(batch.bsz) * spec.out) {
    throw DomainError("mlp: batch shape mismatch");
  }

  const std::size_t w1_count = static_cast<std::size_t>(spec.hidden) * spec.in;
  const double* w1 = weights.data();
  const double* w2 = weights.data() + w1_count;
  double* g1 = grads_out.data();
  double* g2 = grads_out.data() + w1_count;
  for (auto& g : grads_out) g = 0.0;

  const double inv = 1.0 / (static_cast<double>(batch.bsz) * spec.out);
  std::vector<double> a(spec.hidden);
  std::vector<double> dz2(spec.out);
  std::vector<double> da(spec.hidden);
  double loss = 0.0;

  for (int s = 0; s < batch.bsz; ++s) {
    const double* x = batch.x.data() + static_cast<std::size_t>(s) * spec.in;
    const double* y = batch.y.data() + static_cast<std::size_t>(s) * spec.out;

    for (int j = 0; j < spec.hidden; ++j) {
      double z = 0.0;
      const double* row = w1 + static_cast<std::size_t>(j) * spec.in;
      for (int i = 0; i < spec.in; ++i) z += row[i] * x[i];
      a[j] = std::tanh(z);
    }
    for (int k = 0; k < spec.out; ++k) {
      double z = 0.0;
      const double* row = w2 + static_cast<std::size_t>(k) * spec.hidden;
      for (int j = 0; j < spec.hidden; ++j) z += row[j] * a[j];
      const double err = z - y[k];
      loss += 0.5 * err * err * inv;
      dz2[k] = err * inv;
    }
    for (int j = 0; j < spec.hidden; ++j) da[j] = 0.0;
    for (int k = 0; k < spec.out; ++k) {
      double* grow = g2 + static_cast<std::size_t>(k) * spec.hidden;
      const double* row = w2 + static_cast<std::size_t>(k) * spec.hidden;
      for (int j = 0; j < spec.hidden; ++j) {
        grow[j] += dz2[k] * a[j];
        da[j] += dz2[k] * row[j];
      }
    }
    for (int j = 0; j < spec.hidden; ++j) {
      const double dz1 = da[j] * (1.0 - a[j] * a[j]);
      double* grow = g1 + static_cast<std::size_t>(j) * spec.in;
      for (int i = 0; i < spec.in; ++i) grow[i] += dz1 * x[i];
    }
  }
  return loss;
}

}  // namespace offsim
