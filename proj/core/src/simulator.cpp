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
#include "hexsched/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "hexsched/cost_model.hpp"
#include "hexsched/errors.hpp"
#include "hexsched/log.hpp"
#include "hexsched/util.hpp"

namespace hexsched {

namespace {

const std::set<std::string> kKnownMethods = {"hexiseq", "ring", "ulysses",
                                             "usp_best"};

struct CellResult {
  bool has_schedule = false;
  Schedule sched;
  bool feasible = false;
  double tps = 0.0;
  double T_iter_s = 0.0;
};

CellResult eval_cell(const ClusterSpec &cluster, const WorkloadSpec &work,
                     Schedule s) {
  CellResult r;
  CostBreakdown bd = iteration_latency(cluster, work, s);
  r.has_schedule = true;
  r.sched = std::move(s);
  r.feasible = bd.feasible;
  r.tps = bd.tps;
  r.T_iter_s = bd.iter_s;
  return r;
}

CellResult run_method(const std::string &method, const ClusterSpec &cluster,
                      const WorkloadSpec &work, const SchedulerConfig &cfg) {
  if (method == "ring") {
    return eval_cell(cluster, work, make_ring_schedule(cluster, work, cfg.quantum));
  }
  if (method == "ulysses") {
    return eval_cell(cluster, work,
                     make_ulysses_schedule(cluster, work, cfg.quantum));
  }
  if (method == "usp_best") {
    // Highest-throughput feasible factorization; when none is feasible the
    // highest-throughput one overall stands in (and is reported infeasible).
    CellResult best;
    bool any = false;
    for (auto [cp, hp] : usp_layouts(cluster.num_devices(), work.num_heads)) {
      CellResult r = eval_cell(
          cluster, work, make_usp_schedule(cluster, work, cp, hp, cfg.quantum));
      if (!any || (r.feasible && !best.feasible) ||
          (r.feasible == best.feasible && r.tps > best.tps)) {
        best = std::move(r);
        any = true;
      }
    }
    return best; // usp_layouts always contains (n, 1)
  }
  if (method == "hexiseq") {
    try {
      PlanResult pr = plan_schedule(cluster, work, cfg);
      CellResult r;
      r.has_schedule = true;
      r.sched = std::move(pr.schedule);
      r.feasible = pr.breakdown.feasible;
      r.tps = pr.breakdown.tps;
      r.T_iter_s = pr.breakdown.iter_s;
      return r;
    } catch (const InfeasibleError &e) {
      log_info(std::string("simulator: planner cell infeasible: ") + e.what());
      return {}; // recorded per-cell, never fatal
    }
  }
  throw ValidationError("simulator: unknown method '" + method + "'");
}

ReportRow make_row(const std::string &label, int64_t L_tot,
                   const std::string &method, CellResult r) {
  ReportRow row;
  row.label = label;
  row.L_tot = L_tot;
  row.method = method;
  row.feasible = r.has_schedule && r.feasible;
  if (row.feasible) {
    row.has_tps = true;
    row.tps = r.tps;
    row.T_iter_s = r.T_iter_s;
  }
  if (r.has_schedule) {
    row.has_schedule = true;
    row.sched = std::move(r.sched);
    row.schedule_file = "schedules/" + label + "_L" + std::to_string(L_tot) +
                        "_" + method + ".json";
  }
  return row;
}

// Fill the speedup cell of each feasible hexiseq row in [begin, end) from the
// strongest feasible baseline in the same span.
void fill_speedups(std::vector<ReportRow>::iterator begin,
                   std::vector<ReportRow>::iterator end) {
  double best_baseline = 0.0;
  for (auto it = begin; it != end; ++it) {
    if (it->method != "hexiseq" && it->feasible && it->tps > best_baseline) {
      best_baseline = it->tps;
    }
  }
  if (best_baseline <= 0.0) {
    return; // no feasible baseline: speedup undefined
  }
  for (auto it = begin; it != end; ++it) {
    if (it->method == "hexiseq" && it->feasible) {
      it->has_speedup = true;
      it->speedup = it->tps / best_baseline;
    }
  }
}

} // namespace

std::string report_csv_header() {
  return "label,L_tot,method,feasible,tps,T_iter_s,speedup_vs_best_baseline,"
         "schedule_file\n";
}

std::string report_csv(const ComparisonReport &report) {
  std::string out = report_csv_header();
  for (const ReportRow &r : report.rows) {
    out += r.label;
    out += ',';
    out += std::to_string(r.L_tot);
    out += ',';
    out += r.method;
    out += ',';
    out += r.feasible ? "true" : "false";
    out += ',';
    if (r.has_tps) {
      out += format_double(r.tps);
    }
    out += ',';
    if (r.has_tps) {
      out += format_double(r.T_iter_s);
    }
    out += ',';
    if (r.has_speedup) {
      out += format_double(r.speedup);
    }
    out += ',';
    out += r.schedule_file;
    out += '\n';
  }
  return out;
}

ComparisonReport run_comparison(const ExperimentSpec &spec,
                                const SchedulerConfig &cfg) {
  validate_scheduler_config(cfg);
  if (spec.sweep.empty()) {
    throw ValidationError("experiment: sweep must be non-empty");
  }
  std::vector<int64_t> sweep = spec.sweep;
  std::sort(sweep.begin(), sweep.end());
  sweep.erase(std::unique(sweep.begin(), sweep.end()), sweep.end());
  for (int64_t L : sweep) {
    if (L < 1 || L % cfg.quantum != 0) {
      throw ValidationError(
          "experiment: sweep values must be positive multiples of the quantum");
    }
  }
  if (spec.methods.empty()) {
    throw ValidationError("experiment: methods must be non-empty");
  }
  std::vector<std::string> methods = spec.methods;
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
  for (const std::string &m : methods) {
    if (!kKnownMethods.count(m)) {
      throw ValidationError("experiment: unknown method '" + m + "'");
    }
  }

  ComparisonReport rep;
  for (int64_t L : sweep) {
    WorkloadSpec w = spec.work;
    w.L_tot = L;
    size_t first = rep.rows.size();
    for (const std::string &m : methods) {
      rep.rows.push_back(make_row(spec.label, L, m, run_method(m, spec.cluster, w, cfg)));
    }
    fill_speedups(rep.rows.begin() + (std::ptrdiff_t)first, rep.rows.end());
  }
  return rep; // single label, L ascending, methods sorted: already ordered
}

ComparisonReport run_flop_equivalent(const ClusterSpec &het,
                                     const ClusterSpec &homo,
                                     const WorkloadSpec &work,
                                     const SchedulerConfig &cfg,
                                     const std::string &label) {
  validate_scheduler_config(cfg);
  if (work.L_tot < 1 || work.L_tot % cfg.quantum != 0) {
    throw ValidationError(
        "experiment: L_tot must be a positive multiple of the quantum");
  }
  double flops_het = 0.0, flops_homo = 0.0;
  for (const DeviceProfile &d : het.devices) {
    flops_het += d.compute_flops;
  }
  for (const DeviceProfile &d : homo.devices) {
    flops_homo += d.compute_flops;
  }
  double gap = std::abs(flops_het - flops_homo) / flops_homo;
  if (gap > 0.05) {
    log_warn("flop_equivalent: aggregate FLOPs differ by " +
             format_double(gap * 100.0) + "%");
  }

  WorkloadSpec w_het = work;
  w_het.outer_shards = het.num_devices();
  WorkloadSpec w_homo = work;
  w_homo.outer_shards = homo.num_devices();

  ComparisonReport rep;
  for (const std::string &m : {std::string("hexiseq"), std::string("ring"),
                               std::string("ulysses"), std::string("usp_best")}) {
    const ClusterSpec &c = m == "hexiseq" ? het : homo;
    const WorkloadSpec &w = m == "hexiseq" ? w_het : w_homo;
    rep.rows.push_back(make_row(label, work.L_tot, m, run_method(m, c, w, cfg)));
  }
  fill_speedups(rep.rows.begin(), rep.rows.end());
  return rep;
}

std::vector<BenchRow> bench_scheduler_runtime(const std::vector<int> &sizes,
                                              const DeviceTable &table,
                                              const SchedulerConfig &cfg) {
  if (sizes.empty()) {
    throw ValidationError("bench: sizes must be non-empty");
  }
  if (!std::is_sorted(sizes.begin(), sizes.end())) {
    throw ValidationError("bench: sizes must be ascending");
  }
  std::vector<BenchRow> rows;
  rows.reserve(sizes.size());
  for (int n : sizes) {
    ClusterSpec cluster = synth_cluster(n, table);
    WorkloadSpec work = make_workload("13b");
    work.L_tot = 131072;
    work.outer_shards = n;
    auto t0 = std::chrono::steady_clock::now();
    plan_schedule(cluster, work, cfg);
    auto t1 = std::chrono::steady_clock::now();
    rows.push_back({n, std::chrono::duration<double>(t1 - t0).count()});
    log_info("bench: " + std::to_string(n) + " devices planned in " +
             format_double(rows.back().wall_seconds) + " s");
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow> &rows) {
  std::string out = "devices,wall_seconds\n";
  for (const BenchRow &r : rows) {
    out += std::to_string(r.devices);
    out += ',';
    out += format_double(r.wall_seconds);
    out += '\n';
  }
  return out;
}

} // namespace hexsched
