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

namespace offsim {

// One knot of the link bandwidth curve: sustained bytes/s observed for a
// transfer of `bytes`. Knots must be sorted by size and nondecreasing in
// bandwidth; the curve clamps outside the knot range.
struct BandwidthKnot {
  std::int64_t bytes = 0;
  double bytes_per_sec = 0.0;
};

// Where a tensor is cast between half and full precision relative to the
// GPU<->CPU move. CastOnGpuMoveFull casts on the GPU and moves the
// full-precision copy; CastOnCpuMoveHalf moves the half-precision copy
// through an unpinned staging buffer and casts on the CPU.
enum class CastStrategy {
  CastOnGpuMoveFull,
  CastOnCpuMoveHalf,
};

const char* to_string(CastStrategy s);

// Calibrated total seconds to cast-and-move a tensor of `bytes`
// (full-precision size) under one strategy. The shipped rows are generated
// from the link curve plus documented cast/staging constants; users replace
// them with measured data.
struct CastCostRow {
  std::int64_t bytes = 0;
  double seconds = 0.0;
};

struct HardwareProfile {
  std::string name;
  double gpu_peak_flops = 0.0;            // theoretical peak, flop/s
  double gpu_achievable_fraction = 0.6;   // fraction of peak reached by dense kernels
  double cpu_peak_flops = 0.0;            // flop/s
  double link_peak_bw = 0.0;              // aggregate GPU<->CPU bytes/s
  std::vector<BandwidthKnot> link_bw_curve;
  double cpu_mem_bw = 0.0;                // CPU DRAM bytes/s
  std::int64_t gpu_mem_bytes = 0;
  std::int64_t cpu_mem_bytes = 0;
  std::vector<CastCostRow> cast_gpu_move_full;
  std::vector<CastCostRow> cast_cpu_move_half;

  double achievable_flops() const { return gpu_peak_flops * gpu_achievable_fraction; }
  // One direction of the link; the curve values are already unidirectional.
  double unidirectional_bw() const { return link_peak_bw / 2.0; }

  const std::vector<CastCostRow>& cast_rows(CastStrategy s) const;

  // Throws ConfigError when an invariant fails (non-positive rates, a
  // decreasing curve, curve values above link_peak_bw, ...).
  void check() const;
};

// Sustained link bandwidth for a transfer of `bytes`, piecewise-linear in
// log2(size) over the profile's knots, clamped to the first/last knot.
double bandwidth_at(const HardwareProfile& profile, std::int64_t bytes);

// Smallest knot size whose bandwidth equals the final knot's value, i.e. the
// size at which the curve saturates. Empty when the curve is flat (every knot
// already at peak), in which case saturation is meaningless.
std::optional<std::int64_t> curve_saturation_bytes(const HardwareProfile& profile);

// Fraction of time spent computing when forward compute (2*bsz*seq*params
// flops at the achievable rate) is overlapped with streaming the
// half-precision parameters (2*params bytes) over the link. `bw_override`
// replaces the default unidirectional link bandwidth.
double efficiency(std::int64_t params, std::int64_t bsz, std::int64_t seq,
                  const HardwareProfile& profile,
                  std::optional<double> bw_override = std::nullopt);

// Total seconds to cast-and-move a full-precision tensor of `bytes` under
// `strategy`, interpolated from the profile's calibration rows
// (piecewise-linear in log2(size), clamped at the ends).
double cast_move_cost(std::int64_t bytes, CastStrategy strategy,
                      const HardwareProfile& profile);

// Cheaper of the two strategies at this size; ties go to CastOnGpuMoveFull.
CastStrategy choose_cast_strategy(std::int64_t bytes, const HardwareProfile& profile);

}  // namespace offsim
