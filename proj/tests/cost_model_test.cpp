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

#include <random>

#include "hexsched/cost_model.hpp"
#include "hexsched/errors.hpp"
#include "hexsched/model_kernels.hpp"
#include "test_helpers.hpp"

using namespace hexsched;
using namespace hexsched::testing;

namespace {

// The worked two-device example reused across several cases: one group,
// c = 1e14 FLOP/s, b = 1e12 B/s, 400 GB/s intra link with alpha 1e-5,
// L_tot = 4096 split evenly, 8 heads of width 128 split evenly.
struct WorkedExample {
  ClusterSpec cluster;
  WorkloadSpec work;
  Schedule sched;
  WorkedExample() {
    cluster = flat_cluster({1e14, 1e14}, 1e12, 80000000000, 4e11);
    cluster.intra_node_link = LinkDefault{4e11, 1e-5};
    cluster.expand_links();
    work = mk_workload(4096, 1024, 8, 128, 2, 8);
    work.global_batch = 8;
    sched.groups = {{0, 1}};
    sched.group_len = {4096};
    sched.pre_shard = {2048, 2048};
    sched.heads = {4, 4};
    sched.refresh_group_index(2);
    assign_head_ranges(sched);
  }
};

} // namespace

TEST_CASE("non-attention roofline") {
  ClusterSpec c = flat_cluster({1e14}, 1e12);
  WorkloadSpec w = mk_workload(4096, 1024, 8);
  SUBCASE("compute-bound") {
    // F = 72*1024*1024^2 = 7.7309411328e10 FLOPs, V = 8.388608e7 B.
    CHECK(nonattn_latency(w, c.devices[0], 1024) ==
          doctest::Approx(7.7309411328e-4).epsilon(1e-9));
  }
  SUBCASE("zero tokens cost nothing") {
    CHECK(nonattn_latency(w, c.devices[0], 0) == 0.0);
  }
  SUBCASE("memory-bound when bandwidth collapses") {
    ClusterSpec slow = flat_cluster({1e14}, 1e10);
    CHECK(nonattn_latency(w, slow.devices[0], 1024) ==
          doctest::Approx(8.388608e-3).epsilon(1e-9));
  }
}

TEST_CASE("head-redistribution latency") {
  WorkedExample ex;
  SUBCASE("worked value") {
    // V = 3*2048*512*2 = 6,291,456 B; T = 4*(1e-5 + V*2.5e-12).
    CHECK(a2a_time(0, ex.sched, ex.cluster, ex.work) ==
          doctest::Approx(1.0291456e-4).epsilon(1e-9));
  }
  SUBCASE("singleton group costs zero") {
    ClusterSpec c = flat_cluster({1e14, 1e14});
    WorkloadSpec w = mk_workload(4096, 1024, 4);
    Schedule s;
    s.groups = {{0}, {1}};
    s.group_len = {2048, 2048};
    s.pre_shard = {2048, 2048};
    s.heads = {4, 4};
    s.refresh_group_index(2);
    assign_head_ranges(s);
    CHECK(a2a_time(0, s, c, w) == 0.0);
    CHECK(a2a_time(1, s, c, w) == 0.0);
  }
  SUBCASE("idle partner degenerates to pure latency") {
    // The second device holds no tokens and no heads, so both directions
    // carry zero bytes and only the 4x startup latency remains.
    ClusterSpec c = ex.cluster;
    WorkloadSpec w = ex.work;
    Schedule s = ex.sched;
    s.pre_shard = {4096, 0};
    s.heads = {8, 0};
    assign_head_ranges(s);
    REQUIRE(validate_schedule_report(c, w, s).empty());
    CHECK(a2a_time(0, s, c, w) == doctest::Approx(4e-5).epsilon(1e-12));
  }
}

TEST_CASE("circulation step latency") {
  SUBCASE("local step is compute-only") {
    WorkedExample ex;
    // 16*4096*4096*512 / 1e14.
    CHECK(ring_step_time(0, ex.sched, ex.cluster, ex.work) ==
          doctest::Approx(1.37438953472e-3).epsilon(1e-9));
    CHECK_THROWS_AS(ring_step_time(1, ex.sched, ex.cluster, ex.work),
                    ValidationError);
  }
  SUBCASE("overlapped transfer stays hidden under compute") {
    // Two singleton groups, 4 heads each (so n*dh = 512), 25 GB/s link with
    // alpha 1e-5: Msg = 16,777,216 B -> comm 6.8108864e-4 s, compute
    // 1.37438953472e-3 s; the step takes the max.
    ClusterSpec c = two_node_cluster({1e14, 1e14}, 4e11, 25e9);
    c.inter_node_link = LinkDefault{25e9, 1e-5};
    c.expand_links();
    WorkloadSpec w = mk_workload(8192, 1024, 4);
    Schedule s;
    s.groups = {{0}, {1}};
    s.group_len = {4096, 4096};
    s.pre_shard = {4096, 4096};
    s.heads = {4, 4};
    s.refresh_group_index(2);
    assign_head_ranges(s);
    double comm = 1e-5 + 16777216.0 * 4e-11;
    CHECK(comm == doctest::Approx(6.8108864e-4).epsilon(1e-12));
    CHECK(ring_step_time(1, s, c, w) ==
          doctest::Approx(1.37438953472e-3).epsilon(1e-9));
  }
}

TEST_CASE("block latency worked example") {
  WorkedExample ex;
  CostBreakdown bd = block_latency(ex.cluster, ex.work, ex.sched);
  CHECK(bd.nonattn_max_s == doctest::Approx(1.54618822656e-3).epsilon(1e-9));
  CHECK(bd.a2a_max_s == doctest::Approx(1.0291456e-4).epsilon(1e-9));
  CHECK(bd.steps_total_s == doctest::Approx(1.37438953472e-3).epsilon(1e-9));
  CHECK(bd.block_s == doctest::Approx(3.02349232128e-3).epsilon(1e-9));
  CHECK(bd.feasible);
  // The block is the sum of its three phase maxima, so it bounds each one.
  CHECK(bd.block_s >= bd.nonattn_max_s);
  CHECK(bd.block_s >= bd.a2a_max_s);
  CHECK(bd.block_s >= bd.steps_total_s);
}

TEST_CASE("single device block has no communication terms") {
  ClusterSpec c = flat_cluster({1e14}, 1e12);
  WorkloadSpec w = mk_workload(4096, 1024, 8);
  Schedule s = make_ring_schedule(c, w);
  CostBreakdown bd = block_latency(c, w, s);
  CHECK(bd.a2a_max_s == 0.0);
  REQUIRE(bd.step_s.size() == 1);
  CHECK(bd.block_s ==
        doctest::Approx(bd.nonattn_max_s + bd.step_s[0]).epsilon(1e-12));
}

TEST_CASE("iteration latency and throughput") {
  WorkedExample ex;
  CostBreakdown bd = iteration_latency(ex.cluster, ex.work, ex.sched);
  // 2 layers x 8 microbatches.
  CHECK(bd.iter_s == doctest::Approx(4.837587714048e-2).epsilon(1e-9));
  CHECK(bd.tps ==
        doctest::Approx(8.0 * 4096.0 / 4.837587714048e-2).epsilon(1e-9));
  SUBCASE("single layer, single microbatch is the identity") {
    WorkloadSpec w1 = ex.work;
    w1.num_layers = 1;
    w1.global_batch = 1;
    CostBreakdown one = iteration_latency(ex.cluster, w1, ex.sched);
    CHECK(one.iter_s == doctest::Approx(one.block_s).epsilon(1e-12));
  }
  SUBCASE("doubling layers doubles the iteration exactly") {
    WorkloadSpec w2 = ex.work;
    w2.num_layers *= 2;
    CostBreakdown twice = iteration_latency(ex.cluster, w2, ex.sched);
    CHECK(twice.iter_s == doctest::Approx(2.0 * bd.iter_s).epsilon(1e-12));
    CHECK(twice.tps == doctest::Approx(0.5 * bd.tps).epsilon(1e-12));
  }
}

TEST_CASE("activation memory") {
  SUBCASE("worked value") {
    // gamma*s*H = 33,554,432; 2*L_G*n*dh = 16,777,216; x B*P = 2.
    CHECK(act_mem_B(1, 2, 2.0, 4096, 4096, 8192, 8, 128) == 100663296.0);
  }
  SUBCASE("idle device holds nothing") {
    CHECK(act_mem_B(1, 2, 2.0, 0, 4096, 8192, 0, 128) == 0.0);
  }
  SUBCASE("linearity in the head count") {
    double base = act_mem_B(1, 2, 2.0, 4096, 4096, 8192, 4, 128);
    double more = act_mem_B(1, 2, 2.0, 4096, 4096, 8192, 8, 128);
    // four extra heads: B*P * 2 * L_G * 4 * dh
    CHECK(more - base == 1 * 2 * (2.0 * 8192 * 4 * 128));
  }
}

TEST_CASE("feasibility boundary is inclusive") {
  WorkloadSpec w = mk_workload(4096, 1024, 8);
  w.param_count = 0;
  ClusterSpec c = flat_cluster({1e14, 1e14}, 1e12, 1);
  Schedule s = make_ulysses_schedule(c, w);
  double act = activation_memory(0, s, c, w);
  int64_t static_mem = 1000000000;
  for (auto &d : c.devices) d.static_mem_B = static_mem;
  SUBCASE("capacity exactly equal") {
    for (auto &d : c.devices) d.mem_cap_B = static_mem + (int64_t)act;
    auto ok = feasibility_check(s, c, w);
    CHECK(ok == std::vector<char>{1, 1});
  }
  SUBCASE("one byte short") {
    for (auto &d : c.devices) d.mem_cap_B = static_mem + (int64_t)act - 1;
    auto ok = feasibility_check(s, c, w);
    CHECK(ok == std::vector<char>{0, 0});
  }
  SUBCASE("worked margin: 100 MB of activations in an 80 GB card") {
    for (auto &d : c.devices) d.mem_cap_B = 80000000000;
    CHECK(100663296.0 + 1e9 < 8e10);
    auto ok = feasibility_check(s, c, w);
    CHECK(ok == std::vector<char>{1, 1});
  }
}

TEST_CASE("resolved static memory") {
  WorkloadSpec w = mk_workload(4096, 1024, 8);
  w.param_count = 1000000000;
  w.outer_shards = 4;
  ClusterSpec c = flat_cluster({1e14});
  SUBCASE("derived from parameters over outer shards") {
    CHECK(resolved_static_mem(w, c.devices[0]) == 16LL * 1000000000 / 4);
  }
  SUBCASE("explicit override wins") {
    c.devices[0].static_mem_B = 123;
    CHECK(resolved_static_mem(w, c.devices[0]) == 123);
  }
}

TEST_CASE("attention FLOP conservation over random schedules") {
  // Every schedule computes each (query group, key group) tile exactly once
  // across its circulation, so per-device attention FLOPs must add up to the
  // monolithic total 16*B*L_tot^2*N_heads*dh, exactly, in integer arithmetic.
  std::mt19937_64 rng(2026);
  for (int it = 0; it < 300; ++it) {
    int n = std::uniform_int_distribution<int>(2, 8)(rng);
    int64_t L = 256 * std::uniform_int_distribution<int64_t>(1, 32)(rng);
    int heads = std::uniform_int_distribution<int>(1, 4)(rng) * 4;
    std::vector<double> computes(n);
    for (auto &x : computes)
      x = std::uniform_real_distribution<double>(1e14, 9e14)(rng);
    ClusterSpec c = flat_cluster(computes);
    WorkloadSpec w = mk_workload(L, 1024, heads);
    Schedule s = random_schedule(rng, n, L, heads);
    REQUIRE(validate_schedule_report(c, w, s).empty());

    RingPlan plan = build_ring_plan(s, n);
    int128 total = 0;
    for (int d = 0; d < n; ++d) {
      int64_t Lq = s.group_len[s.group_of[d]];
      for (int t = 0; t < plan.num_steps(); ++t) {
        int src = plan.steps[t][d].src_group;
        total += attn_flops_int(1, Lq, s.group_len[src], s.heads[d],
                                w.head_dim);
      }
    }
    int128 expect = (int128)16 * L * L * heads * w.head_dim;
    CHECK((total == expect));
  }
}

TEST_CASE("schedule id and reports") {
  WorkedExample ex;
  CostBreakdown bd = iteration_latency(ex.cluster, ex.work, ex.sched);
  std::string id = schedule_id(ex.sched, ex.cluster);
  CHECK(id.size() == 16); // fnv1a hex digest
  CHECK(id == schedule_id(ex.sched, ex.cluster));
  std::string row = breakdown_csv_row(id, bd);
  CHECK(row.rfind(id + ",", 0) == 0);
  CHECK(breakdown_csv_header() ==
        "schedule_id,T_blk_s,T_iter_s,tps,max_mem_frac,feasible");
  std::string rep = report_json(ex.cluster, ex.work, ex.sched, bd);
  CHECK(rep.find("\"T_blk_s\"") != std::string::npos);
  CHECK(rep.back() == '\n');
}
