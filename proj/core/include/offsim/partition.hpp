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
#include <string>
#include <vector>

#include "offsim/hw.hpp"
#include "offsim/memplan.hpp"

namespace offsim {

inline constexpr std::int64_t kParamAlignBytes = 4;
inline constexpr std::int64_t kDefaultBucketBytes = 64ll * 1024 * 1024;

enum class Residency { GpuResident, CpuOffloaded };

// A contiguous slice of the flattened parameter space. Bucket ids follow
// declaration (forward) order; gradients materialize in reverse id order
// during the backward pass.
struct Bucket {
  int id = 0;
  std::int64_t byte_begin = 0;
  std::int64_t byte_end = 0;   // exclusive
  int param_begin = 0;         // first declared parameter overlapping the slice
  int param_end = 0;           // exclusive

  std::int64_t bytes() const { return byte_end - byte_begin; }
};

// Bucketization of the flattened space plus device residency. The
// gpu_resident_count lowest bucket ids keep their optimizer state on the GPU:
// those are the last buckets created in the backward pass and the first ones
// the next forward pass reads.
struct PartitionPlan {
  std::int64_t bucket_bytes = kDefaultBucketBytes;
  std::vector<Bucket> buckets;
  int gpu_resident_count = 0;

  int bucket_count() const { return static_cast<int>(buckets.size()); }
  int cpu_bucket_count() const { return bucket_count() - gpu_resident_count; }
  std::int64_t total_bytes() const {
    return buckets.empty() ? 0 : buckets.back().byte_end;
  }
  Residency residency(int bucket_id) const {
    return bucket_id < gpu_resident_count ? Residency::GpuResident
                                          : Residency::CpuOffloaded;
  }
  // Fraction of a full bucket; the trailing bucket may be partial.
  double fill_fraction(int bucket_id) const {
    return static_cast<double>(buckets[bucket_id].bytes()) /
           static_cast<double>(bucket_bytes);
  }
  void check() const;  // throws on a gap, overlap, or bad residency count

  std::string serialize() const;
  static PartitionPlan deserialize(const std::string& text);
};

// Greedy fill of declared parameter byte sizes into fixed-size buckets.
// Every bucket except possibly the last has exactly `bucket_bytes` bytes.
PartitionPlan build_buckets(std::span<const std::int64_t> param_sizes,
                            std::int64_t bucket_bytes);

// Per-full-bucket stage costs in seconds.
struct BucketCosts {
  double move_grad = 0.0;
  double step_cpu = 0.0;
  double move_param = 0.0;
  double bwd_per_bucket = 0.0;
  double step_gpu_per_bucket = 0.0;
};

struct MinGpuBuckets {
  int n = 0;
  bool fallback = false;  // no n satisfied the inequality; everything resident
};

// Smallest n in [0, bucket_count] with
//   move_grad + step_cpu + move_param <= n * (bwd_per_bucket + step_gpu_per_bucket),
// i.e. the tail transfer chain hides behind the backward pass and GPU-side
// steps of the n retained buckets. Falls back to bucket_count when no n works.
MinGpuBuckets min_gpu_buckets(const BucketCosts& costs, int bucket_count);

// Candidate bucket sizes tried by the planner.
std::vector<std::int64_t> default_bucket_candidates();

struct CandidateEval {
  std::int64_t bucket_bytes = 0;
  int gpu_resident = 0;
  bool fallback = false;
  double iteration_s = 0.0;
};

struct GridSearchResult {
  PartitionPlan plan;
  double iteration_s = 0.0;
  std::vector<CandidateEval> evaluated;
};

// For each candidate size: derive stage costs from the profile, pick n via
// min_gpu_buckets, and simulate one steady-state iteration. Times within
// kGridTimeTieRel are treated as equal; among tied candidates the planner
// prefers the smallest size at or above the link's saturation point (the
// size that first reaches peak bandwidth), then the larger size, then the
// smaller n.
GridSearchResult grid_search_plan(const ModelConfig& model, const Workload& workload,
                                  const HardwareProfile& profile,
                                  std::span<const std::int64_t> candidates);

inline constexpr double kGridTimeTieRel = 1e-3;

}  // namespace offsim
