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

#include "offsim/memplan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "offsim/errors.hpp"

namespace offsim {

const char* to_string(WeightPolicy p) {
  return p == WeightPolicy::Stationary ? "stationary" : "flow";
}

const char* to_string(PlacementMode m) {
  switch (m) {
    case PlacementMode::GpuOnly: return "gpu-only";
    case PlacementMode::OptimOffload: return "optim-offload";
    case PlacementMode::Adaptive: return "adaptive";
  }
  return "?";
}

std::int64_t param_count(const ModelConfig& config) {
  if (config.layers < 0 || config.hidden <= 0 || config.vocab <= 0) {
    throw DomainError("param_count: dimensions must be positive");
  }
  return 12 * config.layers * config.hidden * config.hidden + config.vocab * config.hidden;
}

std::int64_t ModelConfig::param_count() const { return offsim::param_count(*this); }

std::int64_t model_state_bytes(std::int64_t params) {
  if (params <= 0) throw DomainError("model_state_bytes: params must be positive");
  return 16 * params;
}

std::int64_t activation_bytes(const ModelConfig& config, std::int64_t bsz,
                              std::int64_t seq, bool checkpointing) {
  if (bsz <= 0 || seq <= 0) throw DomainError("activation_bytes: bsz and seq must be positive");
  const double tokens = static_cast<double>(bsz) * static_cast<double>(seq);
  double bytes;
  if (checkpointing) {
    bytes = static_cast<double>(kCheckpointBoundaryBytes) * tokens *
            static_cast<double>(config.hidden) * static_cast<double>(config.layers + 1);
  } else {
    bytes = static_cast<double>(kActivationBytesPerTokenHidden) * tokens *
            static_cast<double>(config.hidden) * static_cast<double>(config.layers);
  }
  return static_cast<std::int64_t>(bytes);
}

std::string PolicyDecision::describe() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "policy=%s stationary_gpu=%lld usable_gpu=%lld oversubscribed=%d "
                "efficiency=%.4f overlappable=%d",
                to_string(policy), static_cast<long long>(stationary_gpu_bytes),
                static_cast<long long>(usable_gpu), stationary_oversubscribed ? 1 : 0,
                efficiency_value, streaming_overlappable ? 1 : 0);
  return buf;
}

PolicyDecision choose_weight_policy(const ModelConfig& config, std::int64_t bsz,
                                    std::int64_t seq, const HardwareProfile& profile) {
  if (bsz <= 0 || seq <= 0) throw DomainError("choose_weight_policy: bsz and seq must be positive");
  const std::int64_t psi = param_count(config);
  const std::int64_t states = model_state_bytes(psi);
  const std::int64_t gpu = usable_gpu_bytes(profile);
  const std::int64_t cpu = usable_cpu_bytes(profile);
  if (states > gpu + cpu) {
    throw InfeasibleError("model states (" + std::to_string(states) +
                          " bytes) exceed combined usable GPU+CPU memory (" +
                          std::to_string(gpu + cpu) + " bytes)");
  }

  PolicyDecision d;
  d.usable_gpu = gpu;
  d.stationary_gpu_bytes = 2 * psi + activation_bytes(config, bsz, seq, /*checkpointing=*/false);
  d.stationary_oversubscribed = d.stationary_gpu_bytes > gpu;
  d.efficiency_value = efficiency(psi, bsz, seq, profile);
  d.streaming_overlappable = d.efficiency_value >= kFlowEfficiencyThreshold;
  d.policy = (d.stationary_oversubscribed || d.streaming_overlappable)
                 ? WeightPolicy::Flow
                 : WeightPolicy::Stationary;
  return d;
}

namespace {

// Activation estimate for a parameter count alone: take the hidden size of
// the nearest preset at or below psi and invert the parameter formula for a
// layer count. Used only by the capacity search.
ModelConfig synthesize_config(std::int64_t psi) {
  const auto& presets = model_presets();
  ModelConfig base = presets.front();
  for (const auto& p : presets) {
    if (p.param_count() <= psi) base = p;
  }
  ModelConfig cfg = base;
  const double block = 12.0 * static_cast<double>(cfg.hidden) * static_cast<double>(cfg.hidden);
  const double remaining = static_cast<double>(psi) - static_cast<double>(cfg.vocab * cfg.hidden);
  cfg.layers = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(remaining / block)));
  cfg.name = "synthetic";
  return cfg;
}

bool fits_gpu_only(std::int64_t psi, std::int64_t act, const HardwareProfile& p) {
  return 16 * psi + act <= usable_gpu_bytes(p);
}

bool fits_optim_offload(std::int64_t psi, std::int64_t act, const HardwareProfile& p) {
  return 4 * psi + act <= usable_gpu_bytes(p) && 12 * psi <= usable_cpu_bytes(p);
}

bool fits_adaptive(std::int64_t psi, std::int64_t act, const HardwareProfile& p) {
  return act + kFlowStreamBufferBytes <= usable_gpu_bytes(p) &&
         16 * psi <= usable_cpu_bytes(p);
}

bool placement_feasible(std::int64_t psi, PlacementMode mode, const HardwareProfile& p) {
  const ModelConfig cfg = synthesize_config(psi);
  const std::int64_t act =
      activation_bytes(cfg, kFeasibilityBsz, kFeasibilitySeq, /*checkpointing=*/false);
  // Modes are cumulative repertoires: a richer mode may fall back to any
  // cheaper placement, which keeps the frontier monotone across modes.
  switch (mode) {
    case PlacementMode::GpuOnly:
      return fits_gpu_only(psi, act, p);
    case PlacementMode::OptimOffload:
      return fits_optim_offload(psi, act, p) || fits_gpu_only(psi, act, p);
    case PlacementMode::Adaptive:
      return fits_adaptive(psi, act, p) || fits_optim_offload(psi, act, p) ||
             fits_gpu_only(psi, act, p);
  }
  return false;
}

}  // namespace

std::int64_t max_trainable_params(const HardwareProfile& profile, PlacementMode mode) {
  profile.check();
  // The activation estimate steps at preset-hidden boundaries, so the
  // feasibility predicate is not monotone in psi; scan down from the hard
  // capacity ceiling instead of bisecting.
  const std::int64_t ceiling =
      (usable_gpu_bytes(profile) + usable_cpu_bytes(profile)) / 4;
  const std::int64_t g = kParamSearchGranularity;
  for (std::int64_t psi = (ceiling / g) * g; psi >= g; psi -= g) {
    if (placement_feasible(psi, mode, profile)) return psi;
  }
  return 0;
}

const std::vector<ModelConfig>& model_presets() {
  static const std::vector<ModelConfig> presets = {
      {"1b", 20, 2048}, {"2b", 40, 2048}, {"3b", 60, 2048}, {"4b", 64, 2304},
      {"5b", 44, 3072}, {"6b", 53, 3072}, {"7b", 63, 3072}, {"8b", 72, 3072},
      {"10b", 50, 4096}, {"11b", 55, 4096}, {"12b", 60, 4096}, {"13b", 65, 4096},
      {"15b", 78, 4096}, {"20b", 25, 8192}, {"25b", 30, 8192}, {"50b", 60, 8192},
      {"60b", 75, 8192}, {"70b", 87, 8192}, {"80b", 100, 8192},
      {"150b", 45, 16384}, {"200b", 60, 16384},
  };
  return presets;
}

ModelConfig resolve_model(const std::string& spec) {
  if (spec.rfind("custom:", 0) == 0) {
    const std::string body = spec.substr(7);
    std::int64_t layers = 0, hidden = 0, vocab = 50257;
    const int n = std::sscanf(body.c_str(), "%lld,%lld,%lld",
                              reinterpret_cast<long long*>(&layers),
                              reinterpret_cast<long long*>(&hidden),
                              reinterpret_cast<long long*>(&vocab));
    if (n < 2 || layers < 0 || hidden <= 0 || vocab <= 0) {
      throw ConfigError("bad custom model spec '" + spec +
                        "', expected custom:<layers>,<hidden>[,<vocab>]");
    }
    ModelConfig cfg{"custom", layers, hidden, vocab};
    return cfg;
  }
  for (const auto& p : model_presets()) {
    if (p.name == spec) return p;
  }
  throw ConfigError("unknown model preset '" + spec + "'");
}

ShardedPlacement ulysses_placement(const ModelConfig& config, std::int64_t bsz,
                                   std::int64_t seq, int chips, WeightPolicy policy,
                                   const HardwareProfile& profile) {
  if (chips < 1) throw DomainError("ulysses_placement: chips must be >= 1");
  if (seq % chips != 0 && seq > chips) {
    // Uneven shards round up; fine for feasibility purposes.
  }
  const std::int64_t psi = param_count(config);
  const std::int64_t local_seq = (seq + chips - 1) / chips;
  const std::int64_t gpu = usable_gpu_bytes(profile);
  const std::int64_t cpu = usable_cpu_bytes(profile);

  ShardedPlacement r;
  if (policy == WeightPolicy::Flow) {
    // Streamed weights; checkpoint activations when the full set does not fit.
    std::int64_t act = activation_bytes(config, bsz, local_seq, /*checkpointing=*/false);
    if (kFlowStreamBufferBytes + act > gpu) {
      act = activation_bytes(config, bsz, local_seq, /*checkpointing=*/true);
      r.checkpointing = true;
    }
    r.gpu_bytes = kFlowStreamBufferBytes + act;
    r.cpu_bytes = 16 * psi;
    r.feasible = r.gpu_bytes <= gpu && r.cpu_bytes <= cpu;
  } else {
    // Resident half-precision weights, optimizer offloaded, no checkpointing.
    const std::int64_t act = activation_bytes(config, bsz, local_seq, /*checkpointing=*/false);
    r.gpu_bytes = 2 * psi + act;
    r.cpu_bytes = 14 * psi;
    r.feasible = r.gpu_bytes <= gpu && r.cpu_bytes <= cpu;
  }
  return r;
}

}  // namespace offsim
