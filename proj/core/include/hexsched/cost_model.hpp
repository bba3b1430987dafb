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

#include <string>
#include <vector>

#include "hexsched/cluster.hpp"
#include "hexsched/schedule.hpp"

namespace hexsched {

// Per-phase latency and memory accounting for one transformer block under a
// schedule. Devices/groups/steps are indexed as in the Schedule.
struct CostBreakdown {
  std::vector<double> nonattn_s; // per device
  double nonattn_max_s = 0.0;
  std::vector<double> a2a_s; // per group (singleton groups cost 0)
  double a2a_max_s = 0.0;
  std::vector<double> step_s; // per circulation step
  double steps_total_s = 0.0;
  double block_s = 0.0;

  // Filled by iteration_latency().
  double iter_s = 0.0;
  double tps = 0.0;

  std::vector<double> mem_act_B;   // per device, activation bytes
  std::vector<double> mem_total_B; // static + activation
  std::vector<char> mem_ok;        // per device, total <= capacity
  bool feasible = false;
  double max_mem_frac = 0.0;
};

// Bytes of weights/optimizer state resident on a device: the explicit
// static_mem_B when given, otherwise 16 B per parameter divided over the
// workload's outer sharding degree.
int64_t resolved_static_mem(const WorkloadSpec &workload, const DeviceProfile &dev);

// Roofline latency of the non-attention stack for a shard of s tokens.
double nonattn_latency(const WorkloadSpec &workload, const DeviceProfile &dev,
                       int64_t s_tokens);

// Same, addressed by device index within a schedule.
double nonattn_time(int d, const Schedule &sched, const ClusterSpec &cluster,
                    const WorkloadSpec &workload);

// Head-redistribution latency of group k: 4x the slowest pairwise transfer
// inside the group; 0 for singleton groups.
double a2a_time(int k, const Schedule &sched, const ClusterSpec &cluster,
                const WorkloadSpec &workload);

// Latency of circulation step t: the slowest device's max(compute, receive).
// Step 0 is compute-only. Throws ValidationError for t outside [0, K).
double ring_step_time(int t, const Schedule &sched, const ClusterSpec &cluster,
                      const WorkloadSpec &workload);

// Peak activation bytes of device d under the schedule.
double activation_memory(int d, const Schedule &sched, const ClusterSpec &cluster,
                         const WorkloadSpec &workload);

// Per-device memory verdict: static + activation <= capacity (inclusive).
std::vector<char> feasibility_check(const Schedule &sched, const ClusterSpec &cluster,
                                    const WorkloadSpec &workload);

// One block: nonattn max + head-redistribution max + sum of circulation
// steps, plus the memory feasibility columns.
CostBreakdown block_latency(const ClusterSpec &cluster, const WorkloadSpec &workload,
                            const Schedule &sched);

// block_latency plus whole-iteration figures: iter_s covers all layers and
// microbatches, tps is global batch tokens per second.
CostBreakdown iteration_latency(const ClusterSpec &cluster,
                                const WorkloadSpec &workload,
                                const Schedule &sched);

// Content hash of the canonical schedule serialization; names schedules in
// reports and ties ranking breaks.
std::string schedule_id(const Schedule &sched, const ClusterSpec &cluster);

// Structured JSON report of a breakdown.
std::string report_json(const ClusterSpec &cluster, const WorkloadSpec &workload,
                        const Schedule &sched, const CostBreakdown &bd);

// One-line CSV: schedule_id,T_blk_s,T_iter_s,tps,max_mem_frac,feasible.
std::string breakdown_csv_header();
std::string breakdown_csv_row(const std::string &sched_id, const CostBreakdown &bd);

} // namespace hexsched
