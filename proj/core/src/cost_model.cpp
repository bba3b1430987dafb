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
#include "hexsched/cost_model.hpp"

#include <algorithm>

#include "hexsched/model_kernels.hpp"
#include "hexsched/util.hpp"
#include "json_util.hpp"

namespace hexsched {

int64_t resolved_static_mem(const WorkloadSpec &workload, const DeviceProfile &dev) {
  if (dev.static_mem_B) {
    return *dev.static_mem_B;
  }
  int64_t params = workload.param_count ? *workload.param_count
                                        : workload.default_param_count();
  return 16 * params / workload.outer_shards;
}

double nonattn_latency(const WorkloadSpec &workload, const DeviceProfile &dev,
                       int64_t s_tokens) {
  double flop_time =
      nonattn_flops(workload.micro_batch, s_tokens, workload.hidden_dim) /
      dev.compute_flops;
  double mem_time =
      (double)nonattn_bytes(workload.micro_batch, s_tokens, workload.hidden_dim,
                            workload.dtype_bytes) /
      dev.mem_bw_Bps;
  return std::max(flop_time, mem_time);
}

namespace {

// Ensures the derived group index is present (schedules straight from a
// parser or generator always have it; hand-built ones in tests may not).
const std::vector<int> &group_index(const Schedule &sched, int num_devices,
                                    std::vector<int> &scratch) {
  if ((int)sched.group_of.size() == num_devices) {
    return sched.group_of;
  }
  Schedule tmp;
  tmp.groups = sched.groups;
  tmp.refresh_group_index(num_devices);
  scratch = std::move(tmp.group_of);
  return scratch;
}

double a2a_group_time(const ClusterSpec &cluster, const WorkloadSpec &workload,
                      const Schedule &sched, int k) {
  const std::vector<int> &group = sched.groups[k];
  if (group.size() <= 1) {
    return 0.0; // max over an empty peer set
  }
  const int64_t B = workload.micro_batch;
  const int64_t dh = workload.head_dim;
  const int64_t P = workload.dtype_bytes;
  double worst = 0.0;
  for (int d : group) {
    for (int j : group) {
      if (j == d) {
        continue;
      }
      int64_t vol = a2a_volume_B(B, sched.pre_shard[d], sched.heads[j], dh, P);
      worst = std::max(worst, link_time(cluster.link(d, j), vol));
    }
  }
  return 4.0 * worst;
}

double ring_step_cost(const ClusterSpec &cluster, const WorkloadSpec &workload,
                      const Schedule &sched, const RingPlan &plan,
                      const std::vector<int> &grp_of, int t) {
  const int64_t B = workload.micro_batch;
  const int64_t dh = workload.head_dim;
  const int64_t P = workload.dtype_bytes;
  double step = 0.0;
  for (int d = 0; d < cluster.num_devices(); ++d) {
    const RingStep &st = plan.steps[t][d];
    int64_t L_q = sched.group_len[grp_of[d]];
    int64_t L_kv = sched.group_len[st.src_group];
    double comp = attn_flops(B, L_q, L_kv, sched.heads[d], dh) /
                  cluster.devices[d].compute_flops;
    double cost = comp;
    if (t > 0 && st.peer >= 0) {
      int64_t msg = ring_msg_B(B, L_kv, sched.heads[d], dh, P);
      cost = std::max(comp, link_time(cluster.link(st.peer, d), msg));
    }
    step = std::max(step, cost);
  }
  return step;
}

} // namespace

double nonattn_time(int d, const Schedule &sched, const ClusterSpec &cluster,
                    const WorkloadSpec &workload) {
  if (d < 0 || d >= cluster.num_devices()) {
    throw ValidationError("cost: unknown device index");
  }
  return nonattn_latency(workload, cluster.devices[d], sched.pre_shard[d]);
}

double a2a_time(int k, const Schedule &sched, const ClusterSpec &cluster,
                const WorkloadSpec &workload) {
  if (k < 0 || k >= sched.num_groups()) {
    throw ValidationError("cost: invalid group index");
  }
  return a2a_group_time(cluster, workload, sched, k);
}

double ring_step_time(int t, const Schedule &sched, const ClusterSpec &cluster,
                      const WorkloadSpec &workload) {
  if (t < 0 || t >= sched.num_groups()) {
    throw ValidationError("cost: ring step index outside [0, K)");
  }
  std::vector<int> scratch;
  const std::vector<int> &grp_of = group_index(sched, cluster.num_devices(), scratch);
  RingPlan plan = build_ring_plan(sched, cluster.num_devices());
  return ring_step_cost(cluster, workload, sched, plan, grp_of, t);
}

double activation_memory(int d, const Schedule &sched, const ClusterSpec &cluster,
                         const WorkloadSpec &workload) {
  if (d < 0 || d >= cluster.num_devices()) {
    throw ValidationError("cost: unknown device index");
  }
  std::vector<int> scratch;
  const std::vector<int> &grp_of = group_index(sched, cluster.num_devices(), scratch);
  int64_t L_grp = sched.group_len[grp_of[d]];
  return act_mem_B(workload.micro_batch, workload.dtype_bytes, workload.gamma_act,
                   sched.pre_shard[d], workload.hidden_dim, L_grp, sched.heads[d],
                   workload.head_dim);
}

std::vector<char> feasibility_check(const Schedule &sched, const ClusterSpec &cluster,
                                    const WorkloadSpec &workload) {
  const int n = cluster.num_devices();
  std::vector<char> ok(n, 1);
  for (int d = 0; d < n; ++d) {
    double total = (double)resolved_static_mem(workload, cluster.devices[d]) +
                   activation_memory(d, sched, cluster, workload);
    if (total > (double)cluster.devices[d].mem_cap_B) {
      ok[d] = 0;
    }
  }
  return ok;
}

CostBreakdown block_latency(const ClusterSpec &cluster, const WorkloadSpec &workload,
                            const Schedule &sched) {
  const int n = cluster.num_devices();
  const int K = sched.num_groups();
  const int64_t B = workload.micro_batch;
  const int64_t H = workload.hidden_dim;
  const int64_t dh = workload.head_dim;
  const int64_t P = workload.dtype_bytes;

  std::vector<int> scratch;
  const std::vector<int> &grp_of = group_index(sched, n, scratch);

  CostBreakdown bd;
  bd.nonattn_s.assign(n, 0.0);
  for (int d = 0; d < n; ++d) {
    bd.nonattn_s[d] = nonattn_latency(workload, cluster.devices[d], sched.pre_shard[d]);
    bd.nonattn_max_s = std::max(bd.nonattn_max_s, bd.nonattn_s[d]);
  }

  bd.a2a_s.assign(K, 0.0);
  for (int k = 0; k < K; ++k) {
    bd.a2a_s[k] = a2a_group_time(cluster, workload, sched, k);
    bd.a2a_max_s = std::max(bd.a2a_max_s, bd.a2a_s[k]);
  }

  RingPlan plan = build_ring_plan(sched, n);
  bd.step_s.assign(K, 0.0);
  for (int t = 0; t < K; ++t) {
    bd.step_s[t] = ring_step_cost(cluster, workload, sched, plan, grp_of, t);
    bd.steps_total_s += bd.step_s[t];
  }

  bd.block_s = bd.nonattn_max_s + bd.a2a_max_s + bd.steps_total_s;

  bd.mem_act_B.assign(n, 0.0);
  bd.mem_total_B.assign(n, 0.0);
  bd.mem_ok.assign(n, 1);
  bd.feasible = true;
  for (int d = 0; d < n; ++d) {
    int64_t L_grp = sched.group_len[grp_of[d]];
    bd.mem_act_B[d] = act_mem_B(B, P, workload.gamma_act, sched.pre_shard[d], H,
                                L_grp, sched.heads[d], dh);
    double total =
        (double)resolved_static_mem(workload, cluster.devices[d]) + bd.mem_act_B[d];
    bd.mem_total_B[d] = total;
    double frac = total / (double)cluster.devices[d].mem_cap_B;
    bd.max_mem_frac = std::max(bd.max_mem_frac, frac);
    if (total > (double)cluster.devices[d].mem_cap_B) {
      bd.mem_ok[d] = 0;
      bd.feasible = false;
    }
  }
  return bd;
}

CostBreakdown iteration_latency(const ClusterSpec &cluster,
                                const WorkloadSpec &workload,
                                const Schedule &sched) {
  CostBreakdown bd = block_latency(cluster, workload, sched);
  bd.iter_s = (double)workload.num_layers * (double)workload.num_microbatches() *
              bd.block_s;
  bd.tps = (bd.iter_s > 0.0)
               ? (double)(workload.global_batch * workload.L_tot) / bd.iter_s
               : 0.0;
  return bd;
}

std::string schedule_id(const Schedule &sched, const ClusterSpec &cluster) {
  return fnv1a_hex(save_schedule(sched, cluster));
}

std::string report_json(const ClusterSpec &cluster, const WorkloadSpec &workload,
                        const Schedule &sched, const CostBreakdown &bd) {
  (void)workload;
  json j;
  j["schedule_id"] = schedule_id(sched, cluster);
  j["T_blk_s"] = bd.block_s;
  j["T_iter_s"] = bd.iter_s;
  j["tps"] = bd.tps;

  json nonattn;
  json per_dev = json::object();
  for (int d = 0; d < cluster.num_devices(); ++d) {
    per_dev[cluster.devices[d].id] = bd.nonattn_s[d];
  }
  nonattn["per_device_s"] = std::move(per_dev);
  nonattn["max_s"] = bd.nonattn_max_s;
  j["nonattn"] = std::move(nonattn);

  json a2a;
  a2a["per_group_s"] = bd.a2a_s;
  a2a["max_s"] = bd.a2a_max_s;
  j["a2a"] = std::move(a2a);

  json steps;
  steps["per_step_s"] = bd.step_s;
  steps["total_s"] = bd.steps_total_s;
  j["ring_steps"] = std::move(steps);

  json mem;
  json mem_dev = json::object();
  for (int d = 0; d < cluster.num_devices(); ++d) {
    json m;
    m["act_B"] = bd.mem_act_B[d];
    m["total_B"] = bd.mem_total_B[d];
    m["cap_B"] = cluster.devices[d].mem_cap_B;
    m["ok"] = (bool)bd.mem_ok[d];
    mem_dev[cluster.devices[d].id] = std::move(m);
  }
  mem["per_device"] = std::move(mem_dev);
  mem["max_frac"] = bd.max_mem_frac;
  mem["feasible"] = bd.feasible;
  j["memory"] = std::move(mem);

  return j.dump(2) + "\n";
}

std::string breakdown_csv_header() {
  return "schedule_id,T_blk_s,T_iter_s,tps,max_mem_frac,feasible";
}

std::string breakdown_csv_row(const std::string &sched_id, const CostBreakdown &bd) {
  std::string row = sched_id;
  row += ',';
  row += format_double(bd.block_s);
  row += ',';
  row += format_double(bd.iter_s);
  row += ',';
  row += format_double(bd.tps);
  row += ',';
  row += format_double(bd.max_mem_frac);
  row += ',';
  row += bd.feasible ? "true" : "false";
  return row;
}

} // namespace hexsched
