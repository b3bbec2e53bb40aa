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
#include <string>
#include <vector>

#include "offsim/hw.hpp"

namespace offsim {

// GPT-style transformer dimensions. Parameter count follows the standard
// 12*L*h^2 block estimate plus one vocab*h embedding table.
struct ModelConfig {
  std::string name;
  std::int64_t layers = 0;
  std::int64_t hidden = 0;
  std::int64_t vocab = 50257;
  std::int64_t seq_default = 1024;

  std::int64_t param_count() const;
};

struct Workload {
  std::int64_t bsz = 8;
  std::int64_t seq = 1024;
  bool checkpointing = false;
};

enum class WeightPolicy {
  Stationary,  // half-precision weights resident on GPU
  Flow,        // weights streamed per layer group from CPU
};

const char* to_string(WeightPolicy p);

struct MemoryFootprint {
  std::int64_t model_state_bytes = 0;
  std::int64_t activation_bytes = 0;
  std::int64_t gpu_resident_bytes = 0;
  std::int64_t cpu_resident_bytes = 0;
};

// Memory accounting constants (documented calibration; see README).
inline constexpr double kGpuReserveFraction = 0.20;  // workspace + fragmentation
inline constexpr double kCpuReserveFraction = 0.10;  // OS + pinned staging buffers
// Bytes of live activation per token per hidden unit per layer without
// checkpointing. Calibrated so a ~7B model at a 1M-token sequence needs on
// the order of 2e12 bytes.
inline constexpr std::int64_t kActivationBytesPerTokenHidden = 10;
// With checkpointing only half-precision layer-boundary tensors survive.
inline constexpr std::int64_t kCheckpointBoundaryBytes = 2;
// Default workload assumed by capacity searches.
inline constexpr std::int64_t kFeasibilityBsz = 8;
inline constexpr std::int64_t kFeasibilitySeq = 1024;
// Resolution of the trainable-size search.
inline constexpr std::int64_t kParamSearchGranularity = 100'000'000;
// Streaming scratch kept on GPU under the Flow policy: two in-flight
// half-precision buckets of the default 64 MiB size.
inline constexpr std::int64_t kFlowStreamBufferBytes = 2ll * 64 * 1024 * 1024;

std::int64_t param_count(const ModelConfig& config);

// Mixed-precision Adam accounting: 2 bytes parameters + 2 bytes gradients +
// 12 bytes optimizer state per parameter.
std::int64_t model_state_bytes(std::int64_t params);

std::int64_t activation_bytes(const ModelConfig& config, std::int64_t bsz,
                              std::int64_t seq, bool checkpointing);

inline std::int64_t usable_gpu_bytes(const HardwareProfile& p) {
  return static_cast<std::int64_t>((1.0 - kGpuReserveFraction) * static_cast<double>(p.gpu_mem_bytes));
}
inline std::int64_t usable_cpu_bytes(const HardwareProfile& p) {
  return static_cast<std::int64_t>((1.0 - kCpuReserveFraction) * static_cast<double>(p.cpu_mem_bytes));
}

// The values behind a weight-policy choice, kept so callers can log and
// re-check the decision.
struct PolicyDecision {
  WeightPolicy policy = WeightPolicy::Stationary;
  std::int64_t stationary_gpu_bytes = 0;  // half weights + activations
  std::int64_t usable_gpu = 0;
  double efficiency_value = 0.0;
  bool stationary_oversubscribed = false;  // condition (a)
  bool streaming_overlappable = false;     // condition (b), efficiency >= threshold
  std::string describe() const;
};

inline constexpr double kFlowEfficiencyThreshold = 0.60;

// Flow when stationary placement cannot hold half weights plus activations,
// or when streaming fully overlaps compute (efficiency >= 0.60); otherwise
// Stationary. Throws InfeasibleError when the model states exceed the
// combined usable GPU+CPU memory.
PolicyDecision choose_weight_policy(const ModelConfig& config, std::int64_t bsz,
                                    std::int64_t seq, const HardwareProfile& profile);

enum class PlacementMode {
  GpuOnly,       // all 16 bytes/param on GPU
  OptimOffload,  // 4 bytes/param on GPU, 12 on CPU
  Adaptive,      // minimal GPU residency with weight flow
};

const char* to_string(PlacementMode m);

// Largest trainable parameter count under the mode's placement repertoire,
// searched at kParamSearchGranularity with the default feasibility workload.
// Each mode may fall back to the cheaper placements below it, so the result
// is nondecreasing in mode order.
std::int64_t max_trainable_params(const HardwareProfile& profile, PlacementMode mode);

// Appendix-style preset ladder. Names are nominal sizes ("5b"); derived
// counts match the labels within 10%.
const std::vector<ModelConfig>& model_presets();

// Accepts a preset name ("13b") or "custom:<layers>,<hidden>[,<vocab>]".
ModelConfig resolve_model(const std::string& spec);

// Per-chip placement check for sequence-parallel runs. The sequence dimension
// is sharded K ways; Flow streams weights and checkpoints activations when
// needed, Stationary keeps half weights resident and runs without
// checkpointing (its throughput-oriented default).
struct ShardedPlacement {
  bool feasible = false;
  bool checkpointing = false;
  std::int64_t gpu_bytes = 0;
  std::int64_t cpu_bytes = 0;
};

ShardedPlacement ulysses_placement(const ModelConfig& config, std::int64_t bsz,
                                   std::int64_t seq, int chips, WeightPolicy policy,
                                   const HardwareProfile& profile);

}  // namespace offsim
