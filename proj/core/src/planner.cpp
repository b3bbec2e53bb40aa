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

#include <algorithm>

#include "offsim/errors.hpp"
#include "offsim/partition.hpp"
#include "offsim/sim.hpp"

namespace offsim {

GridSearchResult grid_search_plan(const ModelConfig& model, const Workload& workload,
                                  const HardwareProfile& profile,
                                  std::span<const std::int64_t> candidates) {
  if (candidates.empty()) throw DomainError("grid_search_plan: no candidates");
  const WeightPolicy policy =
      choose_weight_policy(model, workload.bsz, workload.seq, profile).policy;
  const auto sizes = gradient_tensor_bytes(model);

  std::vector<std::int64_t> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());

  struct Eval {
    CandidateEval summary;
    PartitionPlan plan;
  };
  std::vector<Eval> evals;
  for (std::int64_t bk : sorted) {
    Eval e;
    e.plan = build_buckets(sizes, bk);
    const IterationCosts costs =
        derive_iteration_costs(model, workload, profile, bk, policy);
    const MinGpuBuckets mn = min_gpu_buckets(costs.bucket, e.plan.bucket_count());
    e.plan.gpu_resident_count = mn.n;
    SimOptions opt;
    opt.iterations = 3;
    const ScheduleTrace trace =
        simulate_from_costs(ScheduleAlgo::SuperSTV, e.plan, costs, opt);
    e.summary = {bk, mn.n, mn.fallback, trace.steady_span()};
    evals.push_back(std::move(e));
  }

  double best_time = evals.front().summary.iteration_s;
  for (const auto& e : evals) best_time = std::min(best_time, e.summary.iteration_s);
  std::vector<const Eval*> tied;
  for (const auto& e : evals) {
    if (e.summary.iteration_s <= best_time * (1.0 + kGridTimeTieRel)) tied.push_back(&e);
  }

  // Among time-equivalent candidates, prefer the smallest size that already
  // saturates the link; saturated buckets use full bandwidth while keeping
  // the overlap unit (and the resident-state footprint) small. Flat curves
  // have no saturation point, so the plain larger-size tie-break applies.
  const Eval* winner = nullptr;
  if (const auto sat = curve_saturation_bytes(profile)) {
    for (const Eval* e : tied) {
      if (e->summary.bucket_bytes >= *sat) {
        if (winner == nullptr || e->summary.bucket_bytes < winner->summary.bucket_bytes) {
          winner = e;
        }
      }
    }
  }
  if (winner == nullptr) {
    for (const Eval* e : tied) {
      if (winner == nullptr ||
          e->summary.bucket_bytes > winner->summary.bucket_bytes ||
          (e->summary.bucket_bytes == winner->summary.bucket_bytes &&
           e->summary.gpu_resident < winner->summary.gpu_resident)) {
        winner = e;
      }
    }
  }

  GridSearchResult result;
  result.plan = winner->plan;
  result.iteration_s = winner->summary.iteration_s;
  for (const auto& e : evals) result.evaluated.push_back(e.summary);
  return result;
}

}  // namespace offsim
