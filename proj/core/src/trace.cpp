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

#include "offsim/trace.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "offsim/errors.hpp"

namespace offsim {

const char* to_string(Resource r) {
  switch (r) {
    case Resource::GpuCompute: return "gpu_compute";
    case Resource::CpuCompute: return "cpu_compute";
    case Resource::LinkD2H: return "link_d2h";
    case Resource::LinkH2D: return "link_h2d";
    case Resource::Interconnect: return "interconnect";
  }
  return "?";
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::Fwd: return "fwd";
    case EventKind::Bwd: return "bwd";
    case EventKind::MoveGrad: return "move_grad";
    case EventKind::StepCpu: return "step_cpu";
    case EventKind::StepGpu: return "step_gpu";
    case EventKind::MoveParam: return "move_param";
    case EventKind::Validate: return "validate";
    case EventKind::Rollback: return "rollback";
    case EventKind::AllGather: return "all_gather";
    case EventKind::ReduceScatter: return "reduce_scatter";
    case EventKind::AllToAll: return "all_to_all";
  }
  return "?";
}

double ScheduleTrace::span(int i) const {
  const double start = iteration_starts.at(i);
  const double end = (i + 1 < iterations()) ? iteration_starts[i + 1] : makespan;
  return end - start;
}

double ScheduleTrace::steady_span() const {
  if (iterations() < 2) return span(0);
  double acc = 0.0;
  int count = 0;
  // Exclude warm-up; also drop the final iteration, whose "span" includes the
  // pipeline drain rather than the distance to a successor.
  const int last = iterations() >= 3 ? iterations() - 1 : iterations();
  for (int i = 1; i < last; ++i) {
    acc += span(i);
    ++count;
  }
  return acc / count;
}

double ScheduleTrace::busy_time(Resource r, int i) const {
  double acc = 0.0;
  for (const auto& e : events) {
    if (e.resource == r && e.iteration == i) acc += e.duration();
  }
  return acc;
}

double idle_fraction(const ScheduleTrace& trace, Resource resource) {
  if (trace.events.empty() || trace.iterations() == 0) {
    throw DomainError("idle_fraction: empty trace");
  }
  if (trace.iterations() == 1) {
    return 1.0 - trace.busy_time(resource, 0) / trace.span(0);
  }
  double acc = 0.0;
  int count = 0;
  const int last = trace.iterations() >= 3 ? trace.iterations() - 1 : trace.iterations();
  for (int i = 1; i < last; ++i) {
    acc += 1.0 - trace.busy_time(resource, i) / trace.span(i);
    ++count;
  }
  return acc / count;
}

void validate_trace(const ScheduleTrace& trace, const PartitionPlan& plan) {
  // Per-resource events must be time-ordered and non-overlapping.
  std::map<Resource, std::vector<const TraceEvent*>> per_resource;
  for (const auto& e : trace.events) {
    if (e.end < e.start) throw DomainError("trace: event ends before it starts");
    per_resource[e.resource].push_back(&e);
  }
  for (auto& [r, evs] : per_resource) {
    std::vector<const TraceEvent*> sorted = evs;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const TraceEvent* a, const TraceEvent* b) { return a->start < b->start; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i]->start < sorted[i - 1]->end - 1e-12) {
        throw DomainError(std::string("trace: overlapping events on ") + to_string(r));
      }
    }
  }
  // Causal chain per offloaded bucket and iteration.
  struct Chain {
    double bwd_end = -1, mg_start = -1, mg_end = -1, sc_start = -1, sc_end = -1, mp_start = -1;
  };
  std::map<std::pair<int, int>, Chain> chains;  // (iteration, bucket)
  for (const auto& e : trace.events) {
    if (e.bucket < 0) continue;
    auto& c = chains[{e.iteration, e.bucket}];
    switch (e.kind) {
      case EventKind::Bwd: c.bwd_end = e.end; break;
      case EventKind::MoveGrad: c.mg_start = e.start; c.mg_end = e.end; break;
      case EventKind::StepCpu: c.sc_start = e.start; c.sc_end = e.end; break;
      case EventKind::MoveParam: c.mp_start = e.start; break;
      default: break;
    }
  }
  for (const auto& [key, c] : chains) {
    if (c.mg_start >= 0) {
      if (plan.residency(key.second) != Residency::CpuOffloaded) {
        throw DomainError("trace: resident bucket has a gradient move");
      }
      if (c.bwd_end < 0 || c.mg_start < c.bwd_end - 1e-12) {
        throw DomainError("trace: MoveGrad before Bwd finished");
      }
      if (c.sc_start < c.mg_end - 1e-12) throw DomainError("trace: StepCpu before MoveGrad");
      if (c.mp_start < c.sc_end - 1e-12) throw DomainError("trace: MoveParam before StepCpu");
    }
  }
}

ThroughputEstimate throughput_estimate(const ScheduleTrace& trace,
                                       const ModelConfig& model,
                                       const Workload& workload,
                                       const HardwareProfile& profile) {
  ThroughputEstimate est;
  est.iteration_s = trace.steady_span();
  const double model_flops = 6.0 * static_cast<double>(param_count(model)) *
                             static_cast<double>(workload.bsz) *
                             static_cast<double>(workload.seq);
  est.flops_per_sec = model_flops / est.iteration_s;
  est.mfu = est.flops_per_sec / profile.gpu_peak_flops;
  return est;
}

namespace {

void append_event_line(std::ostringstream& out, const TraceEvent& e) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "event %s %s %d %d %.9e %.9e\n", to_string(e.resource),
                to_string(e.kind), e.bucket, e.iteration, e.start, e.end);
  out << buf;
}

}  // namespace

std::string ScheduleTrace::serialize() const {
  std::ostringstream out;
  out << "# offsim-trace v1\n";
  out << "iterations " << iterations() << "\n";
  char buf[96];
  for (int i = 0; i < iterations(); ++i) {
    std::snprintf(buf, sizeof(buf), "iteration_start %d %.9e\n", i, iteration_starts[i]);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "makespan %.9e\n", makespan);
  out << buf;
  for (const auto& e : events) append_event_line(out, e);
  return out.str();
}

std::string serialize_with_summary(const ScheduleTrace& trace,
                                   const ThroughputEstimate& estimate) {
  std::ostringstream out;
  out << trace.serialize();
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "summary iteration_s=%.9e gpu_idle=%.9e cpu_idle=%.9e flops=%.9e mfu=%.9e\n",
                estimate.iteration_s, idle_fraction(trace, Resource::GpuCompute),
                idle_fraction(trace, Resource::CpuCompute), estimate.flops_per_sec,
                estimate.mfu);
  out << buf;
  return out.str();
}

std::string trace_to_csv(const ScheduleTrace& trace) {
  std::ostringstream out;
  out << "schema_version,resource,label,bucket,iteration,start_s,end_s\n";
  char buf[160];
  for (const auto& e : trace.events) {
    std::snprintf(buf, sizeof(buf), "1,%s,%s,%d,%d,%.9e,%.9e\n", to_string(e.resource),
                  to_string(e.kind), e.bucket, e.iteration, e.start, e.end);
    out << buf;
  }
  return out.str();
}

}  // namespace offsim
