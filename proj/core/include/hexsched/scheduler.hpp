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
#include "hexsched/cost_model.hpp"
#include "hexsched/schedule.hpp"

namespace hexsched {

// Search budgets and granularities for the three-stage planner.
struct SchedulerConfig {
  int M1 = 64;                  // partitions kept after stage 1
  int M2 = 16;                  // group-level plans kept after stage 2
  int I_max = 100;              // accepted-move cap for the descent
  int64_t quantum = 128;        // token granularity of every shard and length
  double agglomeration_ratio = 4.0; // stop merging at this bandwidth gap
  std::vector<double> perturbations = {0.05, 0.10}; // stage-2 nudge fractions
  int64_t move_tokens = 0;      // tokens per descent move; 0 means one quantum
  int move_heads = 1;           // heads per descent move
  int threads = 1;              // parallelism for candidate scoring/refinement

  int64_t resolved_move_tokens() const {
    return move_tokens > 0 ? move_tokens : quantum;
  }
};

// Parses a config JSON object; absent keys keep their defaults. Recognized
// keys: M1, M2, I_max, quantum, agglomeration_ratio, perturbations,
// move_tokens, move_heads, threads.
SchedulerConfig load_scheduler_config(const std::string &json_text);
// Throws ValidationError when a field is out of range (M1/M2/I_max >= 1,
// quantum >= 1, ratio > 1, fractions in (0,1), move_tokens a multiple of the
// quantum when set, move_heads >= 1, threads >= 1).
void validate_scheduler_config(const SchedulerConfig &cfg);
// Canonical JSON snapshot (for run manifests).
std::string scheduler_config_json(const SchedulerConfig &cfg);

// A device partition in canonical form: members ascending within each group,
// groups ordered by smallest member. Group order doubles as ring order.
using Partition = std::vector<std::vector<int>>;

// Group summary used by stage-2 planning.
struct SuperNode {
  std::vector<int> members;
  double agg_compute = 0.0;     // sum of member compute rates
  double agg_mem_bw = 0.0;      // sum of member memory bandwidths
  int64_t mem_cap_min_B = 0;    // weakest member's capacity
  int64_t mem_avail_min_B = 0;  // weakest member's capacity minus static load
  double intra_cost = 0.0;      // mean (alpha + beta) over intra-group links
  double inter_cost = 0.0;      // mean (alpha + beta) over links leaving it
};

// Stage 1: agglomerate devices over the link graph, merging the highest-
// bandwidth edges first, emitting the partition after each distinct bandwidth
// level and stopping when the next level falls below (last merge)/ratio.
// Always adds the all-singletons, one-group, node-aligned, and every even
// mesh factorization of the device order as seeds. Deduplicated, ranked by
// mean intra-group bandwidth (all-singletons ranks last via a sentinel),
// capped at M1.
std::vector<Partition> partition_topology(const ClusterSpec &cluster,
                                          const SchedulerConfig &cfg);

std::vector<SuperNode> abstract_super_nodes(const Partition &partition,
                                            const ClusterSpec &cluster,
                                            const WorkloadSpec &workload);

// A stage-2 candidate: a partition plus per-group token lengths, scored by
// the cost model on the provisional rank assignment.
struct GroupPlan {
  Partition partition;
  std::vector<int64_t> lens;
  Schedule provisional;
  double score = 0.0; // block latency of the provisional assignment
};

// Stage 2 over all retained partitions: three seeds per partition
// (compute-proportional, sqrt-compute, memory-capped) plus pairwise
// perturbations of each; each candidate is scored on its provisional
// assignment, infeasible ones are dropped, and the best M2 by (score,
// serialization) survive across all partitions.
std::vector<GroupPlan> generate_candidates(const ClusterSpec &cluster,
                                           const WorkloadSpec &workload,
                                           const std::vector<Partition> &partitions,
                                           const SchedulerConfig &cfg);

// Proportional rank assignment inside each group: pre-shards follow compute
// in quantum steps, heads follow compute in whole heads, ranges contiguous.
Schedule initialize_assignment(const ClusterSpec &cluster,
                               const WorkloadSpec &workload,
                               const Partition &partition,
                               const std::vector<int64_t> &lens,
                               const SchedulerConfig &cfg);

// Stage 3: first-improvement coordinate descent. Scans ordered device pairs
// within each group (token move, then head move) and ordered pairs across
// ring-adjacent groups (token move only); accepts a move iff the schedule
// stays valid, every device stays within memory, and the block latency
// strictly decreases; restarts the scan after each accepted move; stops when
// a full scan accepts nothing or after I_max accepted moves.
struct RefineResult {
  Schedule schedule;
  double initial_block_s = 0.0;
  double block_s = 0.0;
  int accepted = 0;
  bool feasible = false;
  double worst_deficit_B = 0.0; // when infeasible: largest memory overshoot
  int deficit_device = -1;      // ...and the device it occurs on
};
RefineResult refine(const ClusterSpec &cluster, const WorkloadSpec &workload,
                    const Schedule &start, const SchedulerConfig &cfg);

// One line of the plan trace (CSV columns stage, plan_id, event, cost_s).
// plan_id < 0 renders as an empty cell; counts are carried in cost_s.
struct TraceRow {
  std::string stage;
  int plan_id = -1;
  std::string event;
  double cost_s = 0.0;
};
std::string plan_trace_csv(const std::vector<TraceRow> &rows);

struct PlanResult {
  Schedule schedule;
  CostBreakdown breakdown;
  std::vector<TraceRow> trace;
  int partitions = 0;  // stage-1 survivors
  int candidates = 0;  // stage-2 survivors
  int plans_refined = 0;
  int best_plan_id = -1;
};

// Full pipeline: stage 1 -> stage 2 -> stage 3 over every surviving plan plus
// the ring, ulysses, and USP mesh baselines as mandatory extra starting
// points. Returns the feasible schedule with the lowest block latency (ties:
// lexicographically smallest serialization). Throws InfeasibleError naming
// the tightest device and its deficit in bytes when nothing fits.
PlanResult plan_schedule(const ClusterSpec &cluster, const WorkloadSpec &workload,
                         const SchedulerConfig &cfg);

} // namespace hexsched
