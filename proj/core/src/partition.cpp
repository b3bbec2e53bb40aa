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

#include "offsim/partition.hpp"

#include <cstdio>
#include <sstream>

#include "offsim/errors.hpp"

namespace offsim {

void PartitionPlan::check() const {
  if (buckets.empty()) throw DomainError("plan has no buckets");
  if (bucket_bytes <= 0) throw DomainError("plan bucket_bytes must be positive");
  if (gpu_resident_count < 0 || gpu_resident_count > bucket_count()) {
    throw DomainError("gpu_resident_count out of range");
  }
  std::int64_t cursor = 0;
  for (int i = 0; i < bucket_count(); ++i) {
    const Bucket& b = buckets[i];
    if (b.id != i) throw DomainError("bucket ids must be consecutive");
    if (b.byte_begin != cursor) throw DomainError("bucket ranges must tile the space");
    if (b.byte_end <= b.byte_begin) throw DomainError("bucket must be nonempty");
    if (i + 1 < bucket_count() && b.bytes() != bucket_bytes) {
      throw DomainError("only the trailing bucket may be partial");
    }
    cursor = b.byte_end;
  }
}

PartitionPlan build_buckets(std::span<const std::int64_t> param_sizes,
                            std::int64_t bucket_bytes) {
  if (bucket_bytes < kParamAlignBytes) {
    throw DomainError("bucket_bytes must be at least the 4-byte alignment unit");
  }
  if (param_sizes.empty()) throw DomainError("build_buckets: no parameters");

  std::int64_t total = 0;
  for (std::int64_t s : param_sizes) {
    if (s <= 0) throw DomainError("build_buckets: parameter sizes must be positive");
    total += s;
  }

  // Prefix sums give the declared parameter overlapping each byte offset.
  std::vector<std::int64_t> ends(param_sizes.size());
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < param_sizes.size(); ++i) {
    acc += param_sizes[i];
    ends[i] = acc;
  }

  PartitionPlan plan;
  plan.bucket_bytes = bucket_bytes;
  plan.gpu_resident_count = 0;
  int first_param = 0;
  for (std::int64_t begin = 0; begin < total; begin += bucket_bytes) {
    Bucket b;
    b.id = plan.bucket_count();
    b.byte_begin = begin;
    b.byte_end = std::min(begin + bucket_bytes, total);
    while (ends[first_param] <= begin) ++first_param;
    b.param_begin = first_param;
    int last = first_param;
    while (last + 1 < static_cast<int>(ends.size()) && ends[last] < b.byte_end) ++last;
    b.param_end = last + 1;
    plan.buckets.push_back(b);
  }
  plan.check();
  return plan;
}

MinGpuBuckets min_gpu_buckets(const BucketCosts& costs, int bucket_count) {
  if (bucket_count < 1) throw DomainError("min_gpu_buckets: bucket_count must be >= 1");
  const double lhs = costs.move_grad + costs.step_cpu + costs.move_param;
  const double per_bucket = costs.bwd_per_bucket + costs.step_gpu_per_bucket;
  for (int n = 0; n <= bucket_count; ++n) {
    if (lhs <= static_cast<double>(n) * per_bucket) return {n, false};
  }
  return {bucket_count, true};
}

std::vector<std::int64_t> default_bucket_candidates() {
  const std::int64_t mib = 1024 * 1024;
  return {16 * mib, 32 * mib, 64 * mib, 128 * mib, 256 * mib};
}

std::string PartitionPlan::serialize() const {
  std::ostringstream out;
  out << "# offsim-plan v1\n";
  out << "bucket_bytes " << bucket_bytes << "\n";
  out << "gpu_resident " << gpu_resident_count << "\n";
  out << "buckets " << bucket_count() << "\n";
  char line[128];
  for (const Bucket& b : buckets) {
    std::snprintf(line, sizeof(line), "%d %lld %lld %d %d\n", b.id,
                  static_cast<long long>(b.byte_begin),
                  static_cast<long long>(b.byte_end), b.param_begin, b.param_end);
    out << line;
  }
  return out.str();
}

PartitionPlan PartitionPlan::deserialize(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "# offsim-plan v1") {
    throw ConfigError("plan file: bad header");
  }
  PartitionPlan plan;
  std::string key;
  int count = 0;
  in >> key >> plan.bucket_bytes;
  if (key != "bucket_bytes") throw ConfigError("plan file: expected bucket_bytes");
  in >> key >> plan.gpu_resident_count;
  if (key != "gpu_resident") throw ConfigError("plan file: expected gpu_resident");
  in >> key >> count;
  if (key != "buckets") throw ConfigError("plan file: expected buckets");
  for (int i = 0; i < count; ++i) {
    Bucket b;
    long long begin = 0, end = 0;
    if (!(in >> b.id >> begin >> end >> b.param_begin >> b.param_end)) {
      throw ConfigError("plan file: truncated bucket list");
    }
    b.byte_begin = begin;
    b.byte_end = end;
    plan.buckets.push_back(b);
  }
  plan.check();
  return plan;
}

}  // namespace offsim
