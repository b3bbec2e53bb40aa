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

#include "offsim/hw.hpp"

#include <cmath>

#include "offsim/errors.hpp"

namespace offsim {

const char* to_string(CastStrategy s) {
  switch (s) {
    case CastStrategy::CastOnGpuMoveFull: return "cast_gpu_move_full";
    case CastStrategy::CastOnCpuMoveHalf: return "cast_cpu_move_half";
  }
  return "?";
}

const std::vector<CastCostRow>& HardwareProfile::cast_rows(CastStrategy s) const {
  return s == CastStrategy::CastOnGpuMoveFull ? cast_gpu_move_full : cast_cpu_move_half;
}

void HardwareProfile::check() const {
  if (gpu_peak_flops <= 0 || cpu_peak_flops <= 0 || link_peak_bw <= 0 ||
      cpu_mem_bw <= 0 || gpu_mem_bytes <= 0 || cpu_mem_bytes <= 0) {
    throw ConfigError("profile '" + name + "': all rates and capacities must be positive");
  }
  if (gpu_achievable_fraction <= 0 || gpu_achievable_fraction > 1) {
    throw ConfigError("profile '" + name + "': gpu_achievable_fraction must be in (0,1]");
  }
  if (link_bw_curve.empty()) {
    throw ConfigError("profile '" + name + "': link_bw_curve must not be empty");
  }
  for (std::size_t i = 0; i < link_bw_curve.size(); ++i) {
    const auto& k = link_bw_curve[i];
    if (k.bytes <= 0 || k.bytes_per_sec <= 0) {
      throw ConfigError("profile '" + name + "': curve knots must be positive");
    }
    if (k.bytes_per_sec > link_peak_bw) {
      throw ConfigError("profile '" + name + "': curve exceeds link_peak_bw");
    }
    if (i > 0 && (k.bytes <= link_bw_curve[i - 1].bytes ||
                  k.bytes_per_sec < link_bw_curve[i - 1].bytes_per_sec)) {
      throw ConfigError("profile '" + name + "': curve must be nondecreasing");
    }
  }
  for (auto strategy : {CastStrategy::CastOnGpuMoveFull, CastStrategy::CastOnCpuMoveHalf}) {
    const auto& rows = cast_rows(strategy);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].bytes <= 0 || rows[i].seconds <= 0) {
        throw ConfigError("profile '" + name + "': cast rows must be positive");
      }
      if (i > 0 && rows[i].bytes <= rows[i - 1].bytes) {
        throw ConfigError("profile '" + name + "': cast rows must be sorted by size");
      }
    }
  }
}

namespace {

// Piecewise-linear interpolation in log2(size) over (bytes, value) pairs,
// clamped to the first/last entry.
template <typename Row>
double log_interp(const std::vector<Row>& rows, std::int64_t bytes, double Row::*value) {
  if (bytes <= rows.front().bytes) return rows.front().*value;
  if (bytes >= rows.back().bytes) return rows.back().*value;
  std::size_t hi = 1;
  while (rows[hi].bytes < bytes) ++hi;
  const auto& a = rows[hi - 1];
  const auto& b = rows[hi];
  if (bytes == a.bytes) return a.*value;
  const double t = (std::log2(static_cast<double>(bytes)) - std::log2(static_cast<double>(a.bytes))) /
                   (std::log2(static_cast<double>(b.bytes)) - std::log2(static_cast<double>(a.bytes)));
  return a.*value + t * (b.*value - a.*value);
}

}  // namespace

double bandwidth_at(const HardwareProfile& profile, std::int64_t bytes) {
  if (bytes <= 0) throw DomainError("bandwidth_at: transfer size must be positive");
  if (profile.link_bw_curve.empty()) {
    throw ConfigError("profile '" + profile.name + "': no bandwidth curve");
  }
  return log_interp(profile.link_bw_curve, bytes, &BandwidthKnot::bytes_per_sec);
}

std::optional<std::int64_t> curve_saturation_bytes(const HardwareProfile& profile) {
  const auto& curve = profile.link_bw_curve;
  if (curve.empty()) return std::nullopt;
  const double peak = curve.back().bytes_per_sec;
  if (curve.front().bytes_per_sec == peak) return std::nullopt;  // flat curve
  for (const auto& k : curve) {
    if (k.bytes_per_sec == peak) return k.bytes;
  }
  return curve.back().bytes;
}

double efficiency(std::int64_t params, std::int64_t bsz, std::int64_t seq,
                  const HardwareProfile& profile, std::optional<double> bw_override) {
  if (params <= 0 || bsz <= 0 || seq <= 0) {
    throw DomainError("efficiency: params, bsz and seq must be positive");
  }
  const double bw = bw_override.value_or(profile.unidirectional_bw());
  if (bw <= 0) throw DomainError("efficiency: bandwidth must be positive");
  const double comp_time = 2.0 * static_cast<double>(bsz) * static_cast<double>(seq) *
                           static_cast<double>(params) / profile.achievable_flops();
  const double comm_time = 2.0 * static_cast<double>(params) / bw;
  return comp_time / (comp_time + comm_time);
}

double cast_move_cost(std::int64_t bytes, CastStrategy strategy,
                      const HardwareProfile& profile) {
  if (bytes <= 0) throw DomainError("cast_move_cost: tensor size must be positive");
  const auto& rows = profile.cast_rows(strategy);
  if (rows.empty()) {
    throw ConfigError("profile '" + profile.name + "': no cast calibration for " +
                      to_string(strategy));
  }
  return log_interp(rows, bytes, &CastCostRow::seconds);
}

CastStrategy choose_cast_strategy(std::int64_t bytes, const HardwareProfile& profile) {
  const double full = cast_move_cost(bytes, CastStrategy::CastOnGpuMoveFull, profile);
  const double half = cast_move_cost(bytes, CastStrategy::CastOnCpuMoveHalf, profile);
  return half < full ? CastStrategy::CastOnCpuMoveHalf : CastStrategy::CastOnGpuMoveFull;
}

}  // namespace offsim
