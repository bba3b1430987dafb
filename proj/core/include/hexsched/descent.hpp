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
#include <vector>

#include "hexsched/cluster.hpp"
#include "hexsched/cost_model.hpp"
#include "hexsched/schedule.hpp"

namespace hexsched {

// Incremental block-cost evaluator for the coordinate descent. A candidate
// move touches one or two devices (or two groups), so probing it only
// recomputes the affected terms against cached per-phase aggregates. Probe
// results are bit-identical to rebuilding the schedule and calling
// block_latency: both paths use the same integer formula kernels and the
// aggregates are maxima (order-independent) plus sums re-accumulated in a
// fixed order. Not thread-safe; use one instance per refinement.
class DescentEvaluator {
public:
  struct Probe {
    double block_s = 0.0;
    bool feasible = false;
  };

  DescentEvaluator(const ClusterSpec &cluster, const WorkloadSpec &workload,
                   Schedule initial);

  const Schedule &schedule() const { return sched_; }
  double block_s() const { return block_; }
  bool feasible() const { return feasible_; }
  // Worst memory overshoot in bytes (0 when feasible) and the device it
  // occurs on; used for infeasibility diagnostics.
  double worst_deficit_B(int *device = nullptr) const;

  // tokens must be a positive multiple of the schedule's quantum and at most
  // the donor's pre-shard. a and b share a group.
  Probe probe_token_within(int a, int b, int64_t tokens);
  void commit_token_within(int a, int b, int64_t tokens);

  // Donor a and receiver b sit in ring-adjacent groups; moves tokens between
  // both the devices' pre-shards and their groups' lengths.
  Probe probe_token_cross(int a, int b, int64_t tokens);
  void commit_token_cross(int a, int b, int64_t tokens);

  // Moves heads from a to b within one group, shifting the ranges in between
  // to keep them contiguous.
  Probe probe_head_move(int a, int b, int heads);
  void commit_head_move(int a, int b, int heads);

private:
  // Top-3 (value, id) tracker: the max over a set with up to two ids excluded
  // is always witnessed by one of the three largest entries.
  struct Top3 {
    double v[3];
    int id[3];
    void reset(bool is_min);
    void add(double val, int i, bool is_min);
    double best_excluding(int x, int y, bool is_min) const;
  };

  void rebuild();
  double a2a_term(int d, int j, int64_t s_d, int n_j) const;
  double row_max_fresh(int k, int d, int64_t s_d) const;
  double step_entry(int t, int d, int64_t L_q, int64_t L_kv, int n_d,
                    int peer) const;
  int find_peer(int d, int64_t hb, int64_t he, int src_group,
                const std::vector<int64_t> &begin,
                const std::vector<int64_t> &end) const;

  const ClusterSpec &cluster_;
  const WorkloadSpec &work_;
  Schedule sched_;
  int n_ = 0;
  int K_ = 0;

  std::vector<int64_t> static_mem_;

  // Non-attention roofline per device.
  std::vector<double> nonattn_;
  Top3 nonattn_top_;

  // Head-redistribution state per group: value, per-member row maxima with a
  // top-3 over them, and per-member top-2 terms for O(1) column updates.
  std::vector<double> a2a_;
  Top3 a2a_top_;
  std::vector<Top3> rowmax_top_;   // per group
  std::vector<double> row_max_;    // per device
  std::vector<double> row_top1_v_, row_top2_v_; // per device
  std::vector<int> row_top1_c_, row_top2_c_;

  // Circulation: committed peers, per-entry compute and total cost, per-step
  // top-3, and the step sum.
  std::vector<int> peer_;        // [t * n + d]
  std::vector<double> comp_;     // compute-only cost per entry
  std::vector<double> cost_;     // max(compute, receive)
  std::vector<Top3> step_top_;   // per step
  std::vector<double> step_;     // per step
  double steps_total_ = 0.0;

  // Memory slack cap - (static + act), per device, with per-group minima.
  std::vector<double> slack_;
  std::vector<Top3> slackmin_group_; // per group (min-mode)
  Top3 slackmin_groups_;             // min over groups (min-mode)
  std::vector<double> group_min_slack_;

  // Link uniformity: when every member of group k is reached from d over one
  // identical link profile, a peer change inside k cannot alter d's receive
  // cost. uniform_lp_ holds that profile.
  std::vector<char> uniform_;      // [d * K + k]
  std::vector<LinkProfile> uniform_lp_;
  std::vector<char> group_nonuniform_rx_; // group k has a non-uniform receiver
  // Head moves shift the contiguous ranges of every member between donor and
  // receiver, so a member with a non-uniform inbound link can change its own
  // peers even when its head count is untouched.
  std::vector<char> group_rx_shift_sensitive_;

  double nonattn_max_ = 0.0;
  double a2a_max_ = 0.0;
  double block_ = 0.0;
  bool feasible_ = false;

  // Probe scratch (epoch-stamped overlay over cost_).
  std::vector<double> scratch_val_;
  std::vector<uint32_t> scratch_epoch_;
  uint32_t epoch_ = 0;
  std::vector<int64_t> scratch_begin_, scratch_end_;
};

} // namespace hexsched
