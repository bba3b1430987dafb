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
//
// Microbenchmarks for the hot paths: cost-model evaluation, candidate
// generation, coordinate descent, and the full planning pipeline.

#include <benchmark/benchmark.h>

#include "hexsched/cost_model.hpp"
#include "hexsched/log.hpp"
#include "hexsched/presets.hpp"
#include "hexsched/schedule.hpp"
#include "hexsched/scheduler.hpp"

namespace {

using namespace hexsched;

struct Fixture {
  ClusterSpec cluster;
  WorkloadSpec work;
  SchedulerConfig cfg;

  explicit Fixture(int devices, int64_t L) {
    set_log_level(LogLevel::kQuiet);
    cluster = synth_cluster(devices, default_device_table());
    work = make_workload("13b");
    work.L_tot = L;
    work.outer_shards = devices;
    cfg.quantum = 512;
  }
};

void BM_IterationLatency(benchmark::State &state) {
  Fixture f((int)state.range(0), 65536);
  Schedule sched = make_ring_schedule(f.cluster, f.work, f.cfg.quantum);
  for (auto _ : state) {
    benchmark::DoNotOptimize(iteration_latency(f.cluster, f.work, sched));
  }
}
BENCHMARK(BM_IterationLatency)->Arg(8)->Arg(32);

void BM_GenerateCandidates(benchmark::State &state) {
  Fixture f((int)state.range(0), 65536);
  std::vector<Partition> parts = partition_topology(f.cluster, f.cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        generate_candidates(f.cluster, f.work, parts, f.cfg));
  }
}
BENCHMARK(BM_GenerateCandidates)->Arg(8)->Arg(32);

void BM_Refine(benchmark::State &state) {
  Fixture f((int)state.range(0), 65536);
  // A deliberately symmetric start leaves the descent real work to do on the
  // mixed-generation cluster.
  Schedule start = make_usp_schedule(f.cluster, f.work,
                                     (int)state.range(0) / 4, 4, f.cfg.quantum);
  for (auto _ : state) {
    benchmark::DoNotOptimize(refine(f.cluster, f.work, start, f.cfg));
  }
}
BENCHMARK(BM_Refine)->Arg(8)->Arg(32);

void BM_PlanSchedule(benchmark::State &state) {
  Fixture f((int)state.range(0), 65536);
  for (auto _ : state) {
    benchmark::DoNotOptimize(plan_schedule(f.cluster, f.work, f.cfg));
  }
}
BENCHMARK(BM_PlanSchedule)->Arg(8)->Arg(16)->Arg(32);

} // namespace

BENCHMARK_MAIN();
