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
#ifndef HEXSCHED_ORACLE_HPP_
#define HEXSCHED_ORACLE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "hexsched/cluster.hpp"
#include "hexsched/cost_model.hpp"
#include "hexsched/schedule.hpp"

namespace hexsched {

// Brute-force enumeration over the quantum-discretized schedule space of a
// tiny cluster. "Optimal" below always means optimal at the configured token
// and head granularity — the same granularity the scheduler searches.
struct OracleConfig {
  int max_devices = 4; // refuse clusters larger than this
  // Token granularity for enumeration. 0 resolves to max(1, L_tot / 8).
  int64_t quantum = 0;
  int head_step = 1; // head counts are enumerated in multiples of this
  // Upper bound on the number of schedules the enumeration may evaluate;
  // the closed-form count is checked against it before any work starts.
  int64_t state_cap = 10000000;

  int64_t resolved_quantum(int64_t L_tot) const {
    return quantum > 0 ? quantum : std::max<int64_t>(1, L_tot / 8);
  }
};

// Parse / validate an oracle configuration from the flat JSON config
// namespace shared with the scheduler (keys: max_devices, quantum,
// head_step, state_cap).
OracleConfig load_oracle_config(const std::string &json_text);
void validate_oracle_config(const OracleConfig &cfg);

struct OracleRow {
  Schedule sched;
  double block_s = 0.0;
};

struct OracleResult {
  Schedule best;
  CostBreakdown breakdown;    // full evaluation of the best schedule
  int64_t evaluated = 0;      // schedules enumerated (all of them valid)
  int64_t feasible_count = 0; // schedules that passed the memory filter
  std::vector<OracleRow> top; // up to 10 best, ascending (block_s, key)
};

// Closed-form size of the enumeration space: for every set partition of the
// devices, (K-1)! ring orders times the number of quantum compositions of
// L_tot over all devices times, per group, the compositions of the head
// count. Saturates at INT64_MAX.
int64_t oracle_state_count(const ClusterSpec &cluster, const WorkloadSpec &workload,
                           const OracleConfig &cfg);

// Enumerate every schedule in the discretized space and return the feasible
// minimum of the block latency (ties broken by lexicographically smallest
// schedule serialization). Groups are canonically ordered by smallest member;
// because the ring direction matters, all (K-1)! cyclic orders are also
// enumerated when K >= 3.
//
// Throws ValidationError when the instance exceeds max_devices or the state
// cap, and InfeasibleError when no schedule passes the memory filter.
OracleResult exhaustive_search(const ClusterSpec &cluster,
                               const WorkloadSpec &workload,
                               const OracleConfig &cfg);

} // namespace hexsched

#endif // HEXSCHED_ORACLE_HPP_
