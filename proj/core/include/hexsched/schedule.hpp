/* Copyright 2026 The hexsched Authors
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

#include "hexsched/cluster.hpp"

namespace hexsched {

struct WorkloadSpec {
  int64_t L_tot = 0;        // tokens per sample
  int64_t hidden_dim = 0;   // H
  int64_t head_dim = 0;     // per-head width
  int num_heads = 0;
  int num_layers = 0;
  int dtype_bytes = 2;
  int64_t micro_batch = 1;   // sequences resident per device at once
  int64_t global_batch = 1;  // sequences per optimizer step
  double gamma_act = 2.0;    // non-attention activation bytes multiplier
  // Optional overrides for the resident-memory estimate.
  std::optional<int64_t> param_count; // default: 12 * layers * H^2
  int64_t outer_shards = 1;           // ways the static state is sharded

  int64_t num_microbatches() const { return global_batch / micro_batch; }
  int64_t default_param_count() const {
    return 12 * (int64_t)num_layers * hidden_dim * hidden_dim;
  }
};

WorkloadSpec load_workload(const std::string &json_text);
std::string save_workload(const WorkloadSpec &w);

// A placement of one transformer block over the cluster:
//  - `groups` partitions the devices into K redistribution groups; list order
//    is ring order and the order within a group is rank order.
//  - `group_len[k]` tokens of the sequence owned by group k (sums to L_tot).
//  - `pre_shard[d]` tokens device d holds before head redistribution
//    (sums to group_len over each group).
//  - `heads[d]` attention heads device d computes; each group's heads sum to
//    num_heads, and `head_begin/head_end` tile [0, num_heads) contiguously in
//    rank order within the group.
// Per-device arrays are indexed by device index in the ClusterSpec.
struct Schedule {
  std::vector<std::vector<int>> groups;
  std::vector<int64_t> group_len;
  std::vector<int64_t> pre_shard;
  std::vector<int> heads;
  std::vector<int64_t> head_begin;
  std::vector<int64_t> head_end;

  // Derived: device -> group index. Refresh after editing `groups`.
  std::vector<int> group_of;

  int num_groups() const { return (int)groups.size(); }
  void refresh_group_index(int num_devices);
};

// Recomputes head_begin/head_end from `groups` + `heads` (prefix sums in rank
// order within each group).
void assign_head_ranges(Schedule &sched);

// Checks every structural invariant: exact partition, non-negative multiples
// of `quantum` summing correctly, per-group head coverage, contiguous ranges.
// Returns one message per violated invariant (empty when the schedule is ok).
std::vector<std::string> validate_schedule_report(const ClusterSpec &cluster,
                                                  const WorkloadSpec &workload,
                                                  const Schedule &sched,
                                                  int64_t quantum = 1);
// Throws ValidationError listing the violations instead of returning them.
void validate_schedule(const ClusterSpec &cluster, const WorkloadSpec &workload,
                       const Schedule &sched, int64_t quantum = 1);

std::string save_schedule(const Schedule &sched, const ClusterSpec &cluster);
Schedule load_schedule(const std::string &json_text, const ClusterSpec &cluster);

// KV circulation plan. At step t (0-based, K steps total) a device in ring
// position g attends to tokens owned by group (g - t) mod K; for t >= 1 those
// arrive from the peer device in that group whose head range overlaps ours
// the most (ties to the lowest device index). Step 0 is local, no peer.
struct RingStep {
  int src_group = -1;
  int peer = -1; // device index, -1 when this device holds no heads
};

struct RingPlan {
  std::vector<std::vector<RingStep>> steps; // [t][device]
  int num_steps() const { return (int)steps.size(); }
};

RingPlan build_ring_plan(const Schedule &sched, int num_devices);

// Symmetric baselines. `cp` groups of `hp` consecutive devices each
// (cp * hp must equal the device count); tokens and heads are split evenly
// with largest-remainder rounding.
Schedule make_usp_schedule(const ClusterSpec &cluster, const WorkloadSpec &workload,
                           int cp, int hp, int64_t quantum = 1);
// Pure KV circulation: every device is its own group (cp = n, hp = 1).
Schedule make_ring_schedule(const ClusterSpec &cluster, const WorkloadSpec &workload,
                            int64_t quantum = 1);
// Pure head redistribution: one group spanning all devices (cp = 1, hp = n).
Schedule make_ulysses_schedule(const ClusterSpec &cluster, const WorkloadSpec &workload,
                               int64_t quantum = 1);

// All (cp, hp) factorizations of the device count whose hp divides the head
// count (so heads split evenly), cp descending. Includes (n, 1); includes
// (1, n) only when n divides num_heads.
std::vector<std::pair<int, int>> usp_layouts(int num_devices, int num_heads);

} // namespace hexsched
