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

#include <optional>
#include <set>
#include <vector>

#include "offsim/partition.hpp"
#include "offsim/trace.hpp"

namespace offsim {

enum class ScheduleAlgo {
  BaselineSTE,  // synchronization-then-execution with global barriers
  SuperSTV,     // speculation-then-validation
};

const char* to_string(ScheduleAlgo a);

struct ScheduleKind {
  ScheduleAlgo algo = ScheduleAlgo::SuperSTV;
  WeightPolicy weights = WeightPolicy::Stationary;
  PartitionPlan plan;
};

// Cost model calibration constants (documented in the README).
inline constexpr double kFwdFlopsPerTokenParam = 2.0;
inline constexpr double kBwdFlopsPerTokenParam = 4.0;
inline constexpr double kModelFlopsPerTokenParam = 6.0;
inline constexpr double kAdamFlopsPerParam = 12.0;
inline constexpr double kAdamBytesPerParam = 36.0;   // memory roofline of the fused step
inline constexpr double kSlowAdamFactor = 1.36;      // unfused baseline optimizer
inline constexpr double kValidateFlopsPerParam = 2.0;
inline constexpr double kRollbackSecondsPerParam = 2.0 / 175e9;
inline constexpr double kCheckpointBwdFactor = 1.5;  // one recomputed forward

// Simulator knobs used by the ablation harness.
struct CostKnobs {
  bool grace_adam = true;                        // fused tiled CPU optimizer
  std::optional<CastStrategy> forced_cast;       // empty = pick the cheaper strategy
};

// Per-iteration scalar costs fed to the event construction.
struct IterationCosts {
  double fwd = 0.0;       // seconds, full forward pass
  double validate = 0.0;  // deferred global-norm check on CPU
  double rollback = 0.0;  // restore + re-step, when injected
  BucketCosts bucket;
};

IterationCosts derive_iteration_costs(const ModelConfig& model, const Workload& workload,
                                      const HardwareProfile& profile,
                                      std::int64_t bucket_bytes, WeightPolicy policy,
                                      const CostKnobs& knobs = {});

struct SimOptions {
  int iterations = 4;
  std::set<int> rollback_iterations;  // inject a rollback after these iterations
};

// Deterministic event construction for one chip. BaselineSTE serializes the
// phases (forward, backward, GPU steps, gradient moves, CPU steps, parameter
// moves) with global barriers; SuperSTV streams per-bucket moves and steps
// behind the backward pass, defers validation to the next forward, and holds
// the next backward until the verdict lands.
ScheduleTrace simulate_from_costs(ScheduleAlgo algo, const PartitionPlan& plan,
                                  const IterationCosts& costs,
                                  const SimOptions& options = {});

// Full pipeline: derive costs from the profile, then build events. The plan
// inside `kind` must cover the model's gradient bytes.
ScheduleTrace simulate(const ScheduleKind& kind, const ModelConfig& model,
                       const Workload& workload, const HardwareProfile& profile,
                       const CostKnobs& knobs = {}, const SimOptions& options = {});

// Gradient byte sizes of the declared parameter tensors (embedding first,
// then one entry per transformer block), the flattening the plans cover.
std::vector<std::int64_t> gradient_tensor_bytes(const ModelConfig& model);

// Plan with the default 64 MiB buckets and n picked by min_gpu_buckets.
PartitionPlan default_plan(const ModelConfig& model, const Workload& workload,
                           const HardwareProfile& profile,
                           std::int64_t bucket_bytes = kDefaultBucketBytes,
                           std::optional<int> forced_resident = std::nullopt,
                           const CostKnobs& knobs = {});

enum class Parallelism { ZeRO3, UlyssesSP };

const char* to_string(Parallelism p);

struct MultiChipConfig {
  int chips = 1;
  Parallelism parallelism = Parallelism::ZeRO3;
  double interconnect_bw = 25e9;  // bytes/s, 200 Gb/s Slingshot default
};

// Per-chip trace of a symmetric multi-chip run. ZeRO3 shards the parameter
// space 1/K per chip and adds all-gather / reduce-scatter events on the
// interconnect; UlyssesSP shards the sequence dimension and adds all-to-all
// events, switching to the weight-flow placement when required. K=1 reduces
// exactly to simulate().
ScheduleTrace simulate_multichip(const MultiChipConfig& cfg, ScheduleAlgo algo,
                                 const ModelConfig& model, const Workload& workload,
                                 const HardwareProfile& profile,
                                 const CostKnobs& knobs = {},
                                 const SimOptions& options = {});

enum class Toggle { GraceAdamSpeed, CastOpt, STV, BucketRepart };

const char* to_string(Toggle t);

struct AblationRow {
  std::set<Toggle> enabled;
  double flops_per_sec = 0.0;
  double mfu = 0.0;
  double iteration_s = 0.0;
};

// Cumulative enable ladder in the order GraceAdamSpeed, CastOpt, STV,
// BucketRepart, starting from everything off.
std::vector<AblationRow> ablation_run(const ModelConfig& model, const Workload& workload,
                                      const HardwareProfile& profile);

}  // namespace offsim
