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
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hexsched/presets.hpp"
#include "hexsched/simulator.hpp"
#include "test_helpers.hpp"

using namespace hexsched;
using namespace hexsched::testing;

namespace {

const ReportRow *find_row(const ComparisonReport &r, int64_t L,
                          const std::string &method) {
  for (const ReportRow &row : r.rows) {
    if (row.L_tot == L && row.method == method) return &row;
  }
  return nullptr;
}

} // namespace

TEST_CASE("comparison report covers the full sweep-by-method grid") {
  ExperimentSpec spec;
  spec.cluster = two_node_cluster({6e14, 6e14, 3e14, 3e14}, 3e11, 25e9);
  spec.work = mk_workload(8192, 2048, 16, 128, 2, 8);
  spec.sweep = {4096, 8192, 16384};
  spec.label = "grid";
  SchedulerConfig cfg;
  cfg.quantum = 512;

  ComparisonReport rep = run_comparison(spec, cfg);
  CHECK(rep.rows.size() == 12); // 3 sweep points x 4 methods

  for (int64_t L : spec.sweep) {
    double best_baseline_tps = 0.0;
    for (const char *m : {"ring", "ulysses", "usp_best"}) {
      const ReportRow *row = find_row(rep, L, m);
      REQUIRE(row != nullptr);
      CHECK(row->label == "grid");
      if (row->feasible) {
        CHECK(row->has_tps);
        CHECK(row->tps > 0.0);
        CHECK(row->T_iter_s > 0.0);
        best_baseline_tps = std::max(best_baseline_tps, row->tps);
      }
      CHECK(!row->has_speedup); // speedup is a planner-row column
    }
    const ReportRow *hex = find_row(rep, L, "hexiseq");
    REQUIRE(hex != nullptr);
    REQUIRE(hex->feasible);
    REQUIRE(hex->has_speedup);
    CHECK(hex->speedup == doctest::Approx(hex->tps / best_baseline_tps)
                              .epsilon(1e-12));
    CHECK(hex->speedup >= 1.0); // planner refines every baseline start
    CHECK(hex->has_schedule);
    CHECK(!hex->schedule_file.empty());
  }

  SUBCASE("rows arrive sorted by (label, L_tot, method)") {
    for (size_t i = 1; i < rep.rows.size(); ++i) {
      const ReportRow &a = rep.rows[i - 1];
      const ReportRow &b = rep.rows[i];
      bool ordered = a.L_tot < b.L_tot ||
                     (a.L_tot == b.L_tot && a.method <= b.method);
      CHECK(ordered);
    }
  }

  SUBCASE("CSV document shape") {
    CHECK(report_csv_header() ==
          "label,L_tot,method,feasible,tps,T_iter_s,"
          "speedup_vs_best_baseline,schedule_file\n");
    std::string csv = report_csv(rep);
    CHECK(csv.rfind(report_csv_header(), 0) == 0);
    CHECK(csv.back() == '\n');
    size_t lines = 0;
    std::istringstream in(csv);
    for (std::string line; std::getline(in, line);) ++lines;
    CHECK(lines == 13); // header + 12 rows
  }
}

TEST_CASE("homogeneous clusters yield speedup exactly one") {
  // With identical devices the planner can only tie the best symmetric
  // baseline, so the speedup column must sit at 1 up to float noise.
  ExperimentSpec spec;
  spec.cluster = flat_cluster({3e14, 3e14, 3e14, 3e14});
  spec.work = mk_workload(8192, 1024, 8, 128, 2, 8);
  spec.sweep = {8192};
  spec.label = "homo";
  SchedulerConfig cfg;
  cfg.quantum = 512;
  ComparisonReport rep = run_comparison(spec, cfg);
  const ReportRow *hex = find_row(rep, 8192, "hexiseq");
  REQUIRE(hex != nullptr);
  REQUIRE(hex->has_speedup);
  CHECK(hex->speedup == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("infeasible cells are recorded, not fatal") {
  ExperimentSpec spec;
  spec.cluster = flat_cluster({3e14, 3e14});
  for (auto &d : spec.cluster.devices) d.mem_cap_B = 2200000000;
  spec.cluster.expand_links();
  // Static residency is 2 GB. At 64K context every layout blows the 2.2 GB
  // cap; shorter contexts fit.
  spec.work = mk_workload(8192, 1024, 8, 128, 2, 8);
  spec.sweep = {8192, 65536};
  spec.label = "tight";
  SchedulerConfig cfg;
  cfg.quantum = 512;
  ComparisonReport rep = run_comparison(spec, cfg);
  CHECK(rep.rows.size() == 8);
  const ReportRow *short_ring = find_row(rep, 8192, "ring");
  REQUIRE(short_ring != nullptr);
  CHECK(short_ring->feasible);
  const ReportRow *long_ring = find_row(rep, 65536, "ring");
  REQUIRE(long_ring != nullptr);
  CHECK(!long_ring->feasible);
  CHECK(!long_ring->has_tps);
  SUBCASE("infeasible cells render empty tps cells in the CSV") {
    std::string csv = report_csv(rep);
    CHECK(csv.find("tight,65536,ring,false,,,,") != std::string::npos);
  }
}

TEST_CASE("flop-equivalent pairs compare across clusters") {
  DeviceTable table = default_device_table();
  SUBCASE("a cluster paired with itself is a ratio of exactly one") {
    ClusterSpec c = flat_cluster({3e14, 3e14, 3e14, 3e14});
    WorkloadSpec w = mk_workload(8192, 1024, 8, 128, 2, 8);
    SchedulerConfig cfg;
    cfg.quantum = 512;
    ComparisonReport rep = run_flop_equivalent(c, c, w, cfg, "self");
    const ReportRow *hex = find_row(rep, 8192, "hexiseq");
    REQUIRE(hex != nullptr);
    REQUIRE(hex->has_speedup);
    CHECK(hex->speedup == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.rows.size() == 4); // one row per method at one context length
    for (const ReportRow &row : rep.rows) CHECK(row.label == "self");
  }
  SUBCASE("preset pair carries both clusters") {
    Scenario sc = make_preset("sim4", table);
    REQUIRE(sc.flop_equivalent);
    CHECK(!sc.homo_cluster.devices.empty());
    CHECK(sc.cluster.num_devices() > 0);
  }
}

TEST_CASE("scheduler runtime bench produces one row per size") {
  DeviceTable table = default_device_table();
  SchedulerConfig cfg;
  cfg.quantum = 512;
  SUBCASE("synthetic clusters cycle generations node by node") {
    ClusterSpec c = synth_cluster(16, table);
    CHECK(c.num_devices() == 16);
    CHECK(c.devices[0].node == 0);
    CHECK(c.devices[15].node == 1);
    // Two nodes of eight devices from different generations.
    CHECK(c.devices[0].compute_flops != c.devices[8].compute_flops);
  }
  std::vector<BenchRow> rows = bench_scheduler_runtime({4, 8}, table, cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].devices == 4);
  CHECK(rows[1].devices == 8);
  CHECK(rows[0].wall_seconds > 0.0);
  CHECK(rows[1].wall_seconds > 0.0);
  std::string csv = bench_csv(rows);
  CHECK(csv.rfind("devices,wall_seconds\n", 0) == 0);
  CHECK(csv.back() == '\n');
}
