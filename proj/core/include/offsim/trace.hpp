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

#include "offsim/partition.hpp"

namespace offsim {

enum class Resource {
  GpuCompute,
  CpuCompute,
  LinkD2H,
  LinkH2D,
  Interconnect,
};

enum class EventKind {
  Fwd,
  Bwd,
  MoveGrad,
  StepCpu,
  StepGpu,
  MoveParam,
  Validate,
  Rollback,
  AllGather,
  ReduceScatter,
  AllToAll,
};

const char* to_string(Resource r);
const char* to_string(EventKind k);

struct TraceEvent {
  Resource resource = Resource::GpuCompute;
  EventKind kind = EventKind::Fwd;
  int bucket = -1;     // -1 for whole-iteration events
  int iteration = 0;
  double start = 0.0;
  double end = 0.0;

  double duration() const { return end - start; }
};

struct ScheduleTrace {
  std::vector<TraceEvent> events;
  std::vector<double> iteration_starts;  // forward start per iteration
  double makespan = 0.0;

  int iterations() const { return static_cast<int>(iteration_starts.size()); }
  // Span of iteration i, i.e. the distance to the next forward start. The
  // final iteration's span runs to the makespan.
  double span(int i) const;
  // Mean span over iterations excluding the first (warm-up).
  double steady_span() const;
  // Sum of event durations of iteration i on a resource.
  double busy_time(Resource r, int i) const;

  std::string serialize() const;
};

// 1 - busy/span on a resource, averaged over iterations excluding the first.
double idle_fraction(const ScheduleTrace& trace, Resource resource);

// Checks per-resource non-overlap, time ordering, and the per-bucket causal
// chain Bwd -> MoveGrad -> StepCpu -> MoveParam. Throws DomainError on a
// violation.
void validate_trace(const ScheduleTrace& trace, const PartitionPlan& plan);

struct ThroughputEstimate {
  double flops_per_sec = 0.0;
  double mfu = 0.0;
  double iteration_s = 0.0;
};

// Model flops per iteration are 6 * params * bsz * seq (forward + backward,
// recomputation excluded); MFU divides by the theoretical peak.
ThroughputEstimate throughput_estimate(const ScheduleTrace& trace,
                                       const ModelConfig& model,
                                       const Workload& workload,
                                       const HardwareProfile& profile);

// Structured text with one record per event plus a trailing summary record.
std::string serialize_with_summary(const ScheduleTrace& trace,
                                   const ThroughputEstimate& estimate);

// Events as CSV with a versioned header row.
std::string trace_to_csv(const ScheduleTrace& trace);

}  // namespace offsim
