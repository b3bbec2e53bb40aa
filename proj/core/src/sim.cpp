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

#include "offsim/sim.hpp"

#include <algorithm>
#include <cmath>

#include "offsim/errors.hpp"

namespace offsim {

const char* to_string(ScheduleAlgo a) {
  return a == ScheduleAlgo::BaselineSTE ? "ste" : "stv";
}

const char* to_string(Parallelism p) {
  return p == Parallelism::ZeRO3 ? "zero3" : "ulysses";
}

const char* to_string(Toggle t) {
  switch (t) {
    case Toggle::GraceAdamSpeed: return "adam_speed";
    case Toggle::CastOpt: return "cast_opt";
    case Toggle::STV: return "stv";
    case Toggle::BucketRepart: return "bucket_repart";
  }
  return "?";
}

IterationCosts derive_iteration_costs(const ModelConfig& model, const Workload& workload,
                                      const HardwareProfile& profile,
                                      std::int64_t bucket_bytes, WeightPolicy policy,
                                      const CostKnobs& knobs) {
  profile.check();
  if (bucket_bytes < kParamAlignBytes) {
    throw DomainError("derive_iteration_costs: bucket_bytes too small");
  }
  const double psi = static_cast<double>(param_count(model));
  const double tokens =
      static_cast<double>(workload.bsz) * static_cast<double>(workload.seq);
  const double ach = profile.achievable_flops();
  const double ckpt_factor = workload.checkpointing ? kCheckpointBwdFactor : 1.0;

  double fwd = kFwdFlopsPerTokenParam * tokens * psi / ach;
  const double bwd_total = kBwdFlopsPerTokenParam * tokens * psi / ach * ckpt_factor;
  double bwd_scale = 1.0;
  if (policy == WeightPolicy::Flow) {
    // Streamed half-precision weights must cross the link once per pass; the
    // pass cannot finish faster than that stream.
    const double stream = 2.0 * psi / profile.unidirectional_bw();
    fwd = std::max(fwd, stream);
    bwd_scale = std::max(1.0, stream / bwd_total);
  }

  const double params_per_bucket = static_cast<double>(bucket_bytes) / 2.0;
  const CastStrategy strategy = knobs.forced_cast.value_or(
      choose_cast_strategy(2 * bucket_bytes, profile));

  IterationCosts costs;
  costs.fwd = fwd;
  costs.validate = kValidateFlopsPerParam * psi / profile.cpu_peak_flops;
  costs.rollback = kRollbackSecondsPerParam * psi;
  costs.bucket.bwd_per_bucket =
      kBwdFlopsPerTokenParam * tokens * params_per_bucket / ach * ckpt_factor * bwd_scale;
  costs.bucket.move_grad = cast_move_cost(2 * bucket_bytes, strategy, profile);
  costs.bucket.move_param = costs.bucket.move_grad;
  const double adam_speed = knobs.grace_adam ? 1.0 : kSlowAdamFactor;
  costs.bucket.step_cpu =
      std::max(kAdamFlopsPerParam * params_per_bucket / profile.cpu_peak_flops,
               kAdamBytesPerParam * params_per_bucket / profile.cpu_mem_bw) *
      adam_speed;
  costs.bucket.step_gpu_per_bucket = kAdamFlopsPerParam * params_per_bucket / ach;
  return costs;
}

namespace {

// Collective durations; zero means the event is not emitted.
struct CollectiveCosts {
  double allgather = 0.0;
  double reduce_scatter = 0.0;
  double a2a_fwd = 0.0;
  double a2a_bwd = 0.0;
};

struct Builder {
  ScheduleTrace trace;
  void emit(Resource r, EventKind k, int bucket, int iter, double start, double dur) {
    trace.events.push_back({r, k, bucket, iter, start, start + dur});
  }
};

ScheduleTrace build_ste(const PartitionPlan& plan, const IterationCosts& c,
                        const CollectiveCosts& coll, const SimOptions& opt) {
  Builder b;
  const int B = plan.bucket_count();
  const int n = plan.gpu_resident_count;
  double t = 0.0;
  for (int i = 0; i < opt.iterations; ++i) {
    if (coll.allgather > 0) {
      b.emit(Resource::Interconnect, EventKind::AllGather, -1, i, t, coll.allgather);
      t += coll.allgather;
    }
    if (coll.a2a_fwd > 0) {
      b.emit(Resource::Interconnect, EventKind::AllToAll, -1, i, t, coll.a2a_fwd);
      t += coll.a2a_fwd;
    }
    b.trace.iteration_starts.push_back(t);
    b.emit(Resource::GpuCompute, EventKind::Fwd, -1, i, t, c.fwd);
    t += c.fwd;
    if (coll.a2a_bwd > 0) {
      b.emit(Resource::Interconnect, EventKind::AllToAll, -1, i, t, coll.a2a_bwd);
      t += coll.a2a_bwd;
    }
    for (int id = B - 1; id >= 0; --id) {  // backward creation order
      const double d = c.bucket.bwd_per_bucket * plan.fill_fraction(id);
      b.emit(Resource::GpuCompute, EventKind::Bwd, id, i, t, d);
      t += d;
    }
    if (coll.reduce_scatter > 0) {
      b.emit(Resource::Interconnect, EventKind::ReduceScatter, -1, i, t, coll.reduce_scatter);
      t += coll.reduce_scatter;
    }
    for (int id = n - 1; id >= 0; --id) {
      const double d = c.bucket.step_gpu_per_bucket * plan.fill_fraction(id);
      b.emit(Resource::GpuCompute, EventKind::StepGpu, id, i, t, d);
      t += d;
    }
    // Global barriers: all gradients received before any CPU step, all CPU
    // steps done before parameters return, all parameters back before the
    // next forward.
    for (int id = B - 1; id >= n; --id) {
      const double d = c.bucket.move_grad * plan.fill_fraction(id);
      b.emit(Resource::LinkD2H, EventKind::MoveGrad, id, i, t, d);
      t += d;
    }
    for (int id = B - 1; id >= n; --id) {
      const double d = c.bucket.step_cpu * plan.fill_fraction(id);
      b.emit(Resource::CpuCompute, EventKind::StepCpu, id, i, t, d);
      t += d;
    }
    for (int id = B - 1; id >= n; --id) {
      const double d = c.bucket.move_param * plan.fill_fraction(id);
      b.emit(Resource::LinkH2D, EventKind::MoveParam, id, i, t, d);
      t += d;
    }
  }
  b.trace.makespan = t;
  return b.trace;
}

ScheduleTrace build_stv(const PartitionPlan& plan, const IterationCosts& c,
                        const CollectiveCosts& coll, const SimOptions& opt) {
  Builder b;
  const int B = plan.bucket_count();
  const int n = plan.gpu_resident_count;
  const double total_bytes = static_cast<double>(plan.total_bytes());

  double gpu_free = 0, cpu_free = 0, d2h_free = 0, h2d_free = 0, ic_free = 0;
  double verdict_barrier = 0;      // next backward waits for the previous verdict
  double prev_params_ready = 0;    // all parameters updated (zero3 all-gather dep)
  std::vector<double> prev_mp_end(B, 0.0);
  std::vector<double> bwd_end(B, 0.0);

  for (int i = 0; i < opt.iterations; ++i) {
    double ag_end = 0;
    if (coll.allgather > 0) {
      const double s = std::max(ic_free, prev_params_ready);
      b.emit(Resource::Interconnect, EventKind::AllGather, -1, i, s, coll.allgather);
      ic_free = ag_end = s + coll.allgather;
    }
    double a2af_end = 0;
    if (coll.a2a_fwd > 0) {
      const double s = std::max(ic_free, gpu_free);
      b.emit(Resource::Interconnect, EventKind::AllToAll, -1, i, s, coll.a2a_fwd);
      ic_free = a2af_end = s + coll.a2a_fwd;
    }

    // Forward may begin before the tail parameter moves land, as long as each
    // bucket is back by the time the forward first reads it (proportional to
    // its byte offset). With an all-gather the whole set must be present.
    double fs = std::max({gpu_free, ag_end, a2af_end});
    if (coll.allgather <= 0 && i > 0) {
      for (int id = n; id < B; ++id) {
        const double use_off =
            c.fwd * static_cast<double>(plan.buckets[id].byte_begin) / total_bytes;
        fs = std::max(fs, prev_mp_end[id] - use_off);
      }
    }
    b.trace.iteration_starts.push_back(fs);
    b.emit(Resource::GpuCompute, EventKind::Fwd, -1, i, fs, c.fwd);
    gpu_free = fs + c.fwd;

    double a2ab_end = 0;
    if (coll.a2a_bwd > 0) {
      const double s = std::max(ic_free, gpu_free);
      b.emit(Resource::Interconnect, EventKind::AllToAll, -1, i, s, coll.a2a_bwd);
      ic_free = a2ab_end = s + coll.a2a_bwd;
    }

    // Post-forward barrier: the previous iteration's verdict is consumed here.
    double t = std::max({gpu_free, verdict_barrier, a2ab_end});
    for (int id = B - 1; id >= 0; --id) {
      const double d = c.bucket.bwd_per_bucket * plan.fill_fraction(id);
      b.emit(Resource::GpuCompute, EventKind::Bwd, id, i, t, d);
      t += d;
      bwd_end[id] = t;
    }
    gpu_free = t;

    double grads_reduced = 0;
    if (coll.reduce_scatter > 0) {
      const double s = std::max(ic_free, gpu_free);
      b.emit(Resource::Interconnect, EventKind::ReduceScatter, -1, i, s, coll.reduce_scatter);
      ic_free = grads_reduced = s + coll.reduce_scatter;
    }

    double sg = std::max(gpu_free, grads_reduced);
    for (int id = n - 1; id >= 0; --id) {
      const double d = c.bucket.step_gpu_per_bucket * plan.fill_fraction(id);
      b.emit(Resource::GpuCompute, EventKind::StepGpu, id, i, sg, d);
      sg += d;
    }
    gpu_free = sg;

    // Offloaded buckets stream as their gradients materialize; each stage is
    // FIFO on its resource.
    double last_mg_end = 0;
    for (int id = B - 1; id >= n; --id) {
      const double frac = plan.fill_fraction(id);
      const double ready = std::max(bwd_end[id], grads_reduced);
      const double mg_s = std::max(ready, d2h_free);
      const double mg_d = c.bucket.move_grad * frac;
      b.emit(Resource::LinkD2H, EventKind::MoveGrad, id, i, mg_s, mg_d);
      d2h_free = mg_s + mg_d;
      last_mg_end = d2h_free;

      const double sc_s = std::max(d2h_free, cpu_free);
      const double sc_d = c.bucket.step_cpu * frac;
      b.emit(Resource::CpuCompute, EventKind::StepCpu, id, i, sc_s, sc_d);
      cpu_free = sc_s + sc_d;

      const double mp_s = std::max(cpu_free, h2d_free);
      const double mp_d = c.bucket.move_param * frac;
      b.emit(Resource::LinkH2D, EventKind::MoveParam, id, i, mp_s, mp_d);
      h2d_free = mp_s + mp_d;
      prev_mp_end[id] = h2d_free;
    }

    if (B - n > 0) {
      const double vs = std::max(cpu_free, last_mg_end);
      b.emit(Resource::CpuCompute, EventKind::Validate, -1, i, vs, c.validate);
      cpu_free = vs + c.validate;
      verdict_barrier = cpu_free;
      if (opt.rollback_iterations.count(i) > 0) {
        b.emit(Resource::CpuCompute, EventKind::Rollback, -1, i, cpu_free, c.rollback);
        cpu_free += c.rollback;
        verdict_barrier = cpu_free;
      }
    } else {
      verdict_barrier = 0;
    }

    prev_params_ready = gpu_free;
    for (int id = n; id < B; ++id) prev_params_ready = std::max(prev_params_ready, prev_mp_end[id]);
  }

  double makespan = 0;
  for (const auto& e : b.trace.events) makespan = std::max(makespan, e.end);
  b.trace.makespan = makespan;
  return b.trace;
}

}  // namespace

ScheduleTrace simulate_from_costs(ScheduleAlgo algo, const PartitionPlan& plan,
                                  const IterationCosts& costs, const SimOptions& options) {
  plan.check();
  if (options.iterations < 1) throw DomainError("simulate: need at least one iteration");
  const CollectiveCosts none;
  return algo == ScheduleAlgo::BaselineSTE ? build_ste(plan, costs, none, options)
                                           : build_stv(plan, costs, none, options);
}

std::vector<std::int64_t> gradient_tensor_bytes(const ModelConfig& model) {
  std::vector<std::int64_t> sizes;
  sizes.push_back(2 * model.vocab * model.hidden);
  for (std::int64_t l = 0; l < model.layers; ++l) {
    sizes.push_back(2 * 12 * model.hidden * model.hidden);
  }
  return sizes;
}

PartitionPlan default_plan(const ModelConfig& model, const Workload& workload,
                           const HardwareProfile& profile, std::int64_t bucket_bytes,
                           std::optional<int> forced_resident, const CostKnobs& knobs) {
  const auto sizes = gradient_tensor_bytes(model);
  PartitionPlan plan = build_buckets(sizes, bucket_bytes);
  if (forced_resident) {
    if (*forced_resident < 0 || *forced_resident > plan.bucket_count()) {
      throw DomainError("default_plan: resident count out of range");
    }
    plan.gpu_resident_count = *forced_resident;
    return plan;
  }
  const WeightPolicy policy =
      choose_weight_policy(model, workload.bsz, workload.seq, profile).policy;
  const IterationCosts costs =
      derive_iteration_costs(model, workload, profile, bucket_bytes, policy, knobs);
  plan.gpu_resident_count = min_gpu_buckets(costs.bucket, plan.bucket_count()).n;
  return plan;
}

ScheduleTrace simulate(const ScheduleKind& kind, const ModelConfig& model,
                       const Workload& workload, const HardwareProfile& profile,
                       const CostKnobs& knobs, const SimOptions& options) {
  std::int64_t grad_bytes = 0;
  for (std::int64_t s : gradient_tensor_bytes(model)) grad_bytes += s;
  if (kind.plan.total_bytes() != grad_bytes) {
    throw DomainError("simulate: plan does not cover the model's gradient bytes");
  }
  const IterationCosts costs = derive_iteration_costs(
      model, workload, profile, kind.plan.bucket_bytes, kind.weights, knobs);
  return simulate_from_costs(kind.algo, kind.plan, costs, options);
}

ScheduleTrace simulate_multichip(const MultiChipConfig& cfg, ScheduleAlgo algo,
                                 const ModelConfig& model, const Workload& workload,
                                 const HardwareProfile& profile, const CostKnobs& knobs,
                                 const SimOptions& options) {
  if (cfg.chips < 1) throw DomainError("simulate_multichip: chips must be >= 1");
  const int K = cfg.chips;
  const double psi = static_cast<double>(param_count(model));

  if (cfg.parallelism == Parallelism::ZeRO3) {
    // Each chip owns 1/K of every tensor; compute covers the full model, so a
    // chip's owned gradients materialize at K times its bucket granularity.
    std::vector<std::int64_t> local_sizes;
    for (std::int64_t s : gradient_tensor_bytes(model)) {
      local_sizes.push_back(std::max<std::int64_t>(kParamAlignBytes, s / K));
    }
    PartitionPlan plan = build_buckets(local_sizes, kDefaultBucketBytes);
    const WeightPolicy policy =
        choose_weight_policy(model, workload.bsz, workload.seq, profile).policy;
    IterationCosts costs = derive_iteration_costs(model, workload, profile,
                                                  plan.bucket_bytes, policy, knobs);
    costs.bucket.bwd_per_bucket *= static_cast<double>(K);
    costs.validate /= static_cast<double>(K);
    costs.rollback /= static_cast<double>(K);
    plan.gpu_resident_count = min_gpu_buckets(costs.bucket, plan.bucket_count()).n;

    CollectiveCosts coll;
    const double volume = 2.0 * psi * static_cast<double>(K - 1) / static_cast<double>(K);
    coll.allgather = volume / cfg.interconnect_bw;
    coll.reduce_scatter = volume / cfg.interconnect_bw;
    return algo == ScheduleAlgo::BaselineSTE ? build_ste(plan, costs, coll, options)
                                             : build_stv(plan, costs, coll, options);
  }

  // UlyssesSP: shard the sequence dimension; weight-flow keeps the sharded
  // activations feasible.
  const auto placement = ulysses_placement(model, workload.bsz, workload.seq, K,
                                           WeightPolicy::Flow, profile);
  if (!placement.feasible) {
    throw InfeasibleError("ulysses placement infeasible for seq=" +
                          std::to_string(workload.seq) + " on " + std::to_string(K) +
                          " chips");
  }
  Workload local = workload;
  local.seq = (workload.seq + K - 1) / K;
  local.checkpointing = placement.checkpointing;
  PartitionPlan plan = build_buckets(gradient_tensor_bytes(model), kDefaultBucketBytes);
  IterationCosts costs = derive_iteration_costs(model, local, profile, plan.bucket_bytes,
                                                WeightPolicy::Flow, knobs);
  plan.gpu_resident_count = min_gpu_buckets(costs.bucket, plan.bucket_count()).n;

  CollectiveCosts coll;
  if (K > 1) {
    const double volume = 4.0 * static_cast<double>(local.bsz) *
                          static_cast<double>(local.seq) *
                          static_cast<double>(model.hidden) *
                          static_cast<double>(model.layers) *
                          static_cast<double>(K - 1) / static_cast<double>(K);
    coll.a2a_fwd = volume / cfg.interconnect_bw;
    coll.a2a_bwd = volume / cfg.interconnect_bw;
  }
  return algo == ScheduleAlgo::BaselineSTE ? build_ste(plan, costs, coll, options)
                                           : build_stv(plan, costs, coll, options);
}

std::vector<AblationRow> ablation_run(const ModelConfig& model, const Workload& workload,
                                      const HardwareProfile& profile) {
  const std::vector<Toggle> order = {Toggle::GraceAdamSpeed, Toggle::CastOpt, Toggle::STV,
                                     Toggle::BucketRepart};
  std::vector<AblationRow> rows;
  std::set<Toggle> enabled;
  for (int step = 0; step <= static_cast<int>(order.size()); ++step) {
    if (step > 0) enabled.insert(order[step - 1]);
    CostKnobs knobs;
    knobs.grace_adam = enabled.count(Toggle::GraceAdamSpeed) > 0;
    if (enabled.count(Toggle::CastOpt) == 0) {
      knobs.forced_cast = CastStrategy::CastOnCpuMoveHalf;
    }
    const ScheduleAlgo algo = enabled.count(Toggle::STV) > 0 ? ScheduleAlgo::SuperSTV
                                                             : ScheduleAlgo::BaselineSTE;
    const std::optional<int> resident =
        enabled.count(Toggle::BucketRepart) > 0 ? std::nullopt : std::optional<int>(0);
    PartitionPlan plan =
        default_plan(model, workload, profile, kDefaultBucketBytes, resident, knobs);
    ScheduleKind kind{algo,
                      choose_weight_policy(model, workload.bsz, workload.seq, profile).policy,
                      plan};
    const ScheduleTrace trace = simulate(kind, model, workload, profile, knobs);
    const ThroughputEstimate est = throughput_estimate(trace, model, workload, profile);
    rows.push_back({enabled, est.flops_per_sec, est.mfu, est.iteration_s});
  }
  return rows;
}

}  // namespace offsim
