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

#include "offsim/numeric/mlp.hpp"
#include "offsim/numeric/norms.hpp"
#include "offsim/numeric/state.hpp"
#include "offsim/partition.hpp"

namespace offsim {

// How speculation and validation interleave. Serialized runs the validation
// inline; TwoTask runs it on a separate thread and hands the verdict back
// through a single-producer single-consumer channel that the stepping side
// blocks on at the post-forward barrier. Results are identical because
// validation is a pure function of the (immutable) scaled gradients.
enum class SchedulerMode { Serialized, TwoTask };

// Deliberate corruption hooks for negative-control tests: the mutation makes
// rollback lose the second moment of the first restored bucket, which must be
// caught by the equivalence suite.
enum class Mutation { None, CorruptRestore };

struct IterationReport {
  Verdict verdict;
  int rollbacks = 0;
};

// One speculation-then-validation iteration over `scaled_grads` (length ==
// state size, already multiplied by the loss scale). Buckets step in backward
// creation order (descending id); each is snapshotted before its speculative
// step. On Proceed the snapshots drop; on Clip everything restores and
// re-steps with clipped gradients; on SkipNonFinite everything restores, the
// step counter stays, and the loss scale halves.
IterationReport stv_iteration(TrainState& state, std::span<const float> scaled_grads,
                              const PartitionPlan& plan, const AdamHyper& hyper,
                              SchedulerMode mode = SchedulerMode::Serialized,
                              Mutation mutation = Mutation::None);

// Validate-first reference: identical kernels, no speculation machinery.
IterationReport sync_oracle_iteration(TrainState& state,
                                      std::span<const float> scaled_grads,
                                      const PartitionPlan& plan, const AdamHyper& hyper);

enum class TrainMode { SyncOracle, STV };

// Fault injected into the scaled gradient stream before the optimizer sees it.
struct Fault {
  enum class Kind { Nan, Scale } kind = Kind::Nan;
  std::int64_t iteration = 0;
  double factor = 1.0;  // Scale only
};

// Text format: one `<iteration> nan` or `<iteration> scale <factor>` per line.
std::vector<Fault> parse_fault_spec(const std::string& text);
std::string format_fault_spec(std::span<const Fault> faults);

struct TrainRun {
  TrainState final_state;
  std::vector<IterationReport> reports;   // one per iteration
  std::vector<std::int64_t> step_history; // state.step after each iteration
  std::vector<double> losses;
  std::vector<std::int64_t> rollback_iterations;
};

// Plan covering an n-element state with the given bucket size in elements.
PartitionPlan element_plan(std::size_t elements, std::size_t bucket_elems);

// Trains a tiny MLP on a deterministic synthetic regression stream. Both
// modes consume identical gradient streams; their histories are bitwise
// comparable.
TrainRun run_training(TrainMode mode, const MlpSpec& spec, std::uint64_t seed,
                      std::int64_t steps, const AdamHyper& hyper,
                      const PartitionPlan& plan,
                      SchedulerMode scheduler = SchedulerMode::Serialized,
                      std::span<const Fault> faults = {},
                      Mutation mutation = Mutation::None);

}  // namespace offsim
