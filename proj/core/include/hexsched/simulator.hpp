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
#ifndef HEXSCHED_SIMULATOR_HPP_
#define HEXSCHED_SIMULATOR_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "hexsched/cluster.hpp"
#include "hexsched/presets.hpp"
#include "hexsched/schedule.hpp"
#include "hexsched/scheduler.hpp"

namespace hexsched {

// One comparison experiment: evaluate the listed methods on the cluster at
// every context length of the sweep. Everything is analytical — the cost
// model is the measurement.
struct ExperimentSpec {
  ClusterSpec cluster;
  WorkloadSpec work; // L_tot is replaced by each sweep value
  std::vector<int64_t> sweep;
  std::vector<std::string> methods = {"hexiseq", "ring", "ulysses", "usp_best"};
  std::string label;
};

struct ReportRow {
  std::string label;
  int64_t L_tot = 0;
  std::string method;
  bool feasible = false;
  bool has_tps = false; // tps/T_iter_s cells stay empty for infeasible rows
  double tps = 0.0;
  double T_iter_s = 0.0;
  bool has_speedup = false; // only on feasible hexiseq rows with a feasible baseline
  double speedup = 0.0;
  // Relative path the schedule is persisted under; empty when the method
  // produced no schedule at all (an infeasible planner cell).
  std::string schedule_file;
  bool has_schedule = false;
  Schedule sched;
};

struct ComparisonReport {
  std::vector<ReportRow> rows; // sorted by (label, L_tot, method)
};

std::string report_csv_header();
// Full CSV document (header + rows, trailing newline).
std::string report_csv(const ComparisonReport &report);

// Evaluate every (sweep point, method) cell: baselines come from the
// symmetric generators (usp_best picks the highest-throughput feasible
// factorization), hexiseq from the hierarchical planner. Per-cell
// infeasibility is recorded in the row, never fatal. The speedup column of a
// hexiseq row compares it against the strongest feasible baseline at the
// same context length.
ComparisonReport run_comparison(const ExperimentSpec &spec, const SchedulerConfig &cfg);

// FLOP-equivalent pair: baselines run on the homogeneous cluster, hexiseq on
// the heterogeneous one, single context length, one row per method. The
// hexiseq speedup cell is the throughput ratio against the strongest
// homogeneous baseline. Warns when aggregate FLOPs differ by more than 5%.
// Static memory is sharded over each side's own device count.
ComparisonReport run_flop_equivalent(const ClusterSpec &het, const ClusterSpec &homo,
                                     const WorkloadSpec &work,
                                     const SchedulerConfig &cfg,
                                     const std::string &label = "flop_eq");

struct BenchRow {
  int devices = 0;
  double wall_seconds = 0.0;
};

// Wall-clock the planner itself on synthetic mixed clusters of the given
// sizes (ascending). This is the one genuinely measured quantity here.
std::vector<BenchRow> bench_scheduler_runtime(const std::vector<int> &sizes,
                                              const DeviceTable &table,
                                              const SchedulerConfig &cfg);
std::string bench_csv(const std::vector<BenchRow> &rows);

} // namespace hexsched

#endif // HEXSCHED_SIMULATOR_HPP_
