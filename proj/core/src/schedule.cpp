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
#include "hexsched/schedule.hpp"

#include <algorithm>
#include <numeric>

#include "hexsched/apportion.hpp"
#include "hexsched/log.hpp"
#include "json_util.hpp"

namespace hexsched {

WorkloadSpec load_workload(const std::string &json_text) {
  const std::string what = "workload";
  json j = parse_json(json_text, what);
  if (!j.is_object()) {
    throw ParseError(what + ": top level must be an object");
  }
  WorkloadSpec w;
  w.L_tot = get_int(j, "L_tot", what);
  w.hidden_dim = get_int(j, "hidden_dim", what);
  w.head_dim = get_int(j, "head_dim", what);
  w.num_heads = (int)get_int(j, "num_heads", what);
  w.num_layers = (int)get_int(j, "num_layers", what);
  w.dtype_bytes = (int)get_int(j, "dtype_bytes", what);
  if (auto v = opt_int(j, "micro_batch", what)) {
    w.micro_batch = *v;
  }
  if (auto v = opt_int(j, "global_batch", what)) {
    w.global_batch = *v;
  }
  if (auto v = opt_double(j, "gamma_act", what)) {
    w.gamma_act = *v;
  }
  w.param_count = opt_int(j, "param_count", what);
  if (auto v = opt_int(j, "outer_shards", what)) {
    w.outer_shards = *v;
  }

  if (w.L_tot <= 0 || w.hidden_dim <= 0 || w.head_dim <= 0 || w.num_heads <= 0 ||
      w.num_layers <= 0 || w.dtype_bytes <= 0 || w.micro_batch <= 0 ||
      w.global_batch <= 0 || w.outer_shards <= 0) {
    throw ValidationError(what + ": all size fields must be positive");
  }
  if (w.gamma_act < 0.0) {
    throw ValidationError(what + ": gamma_act must be non-negative");
  }
  if (w.param_count && *w.param_count <= 0) {
    throw ValidationError(what + ": param_count must be positive");
  }
  if (w.global_batch % w.micro_batch != 0) {
    throw ValidationError(what + ": global_batch must be a multiple of micro_batch");
  }
  if (w.hidden_dim != (int64_t)w.num_heads * w.head_dim) {
    log_warn("workload: hidden_dim != num_heads * head_dim");
  }
  return w;
}

std::string save_workload(const WorkloadSpec &w) {
  json j;
  j["L_tot"] = w.L_tot;
  j["hidden_dim"] = w.hidden_dim;
  j["head_dim"] = w.head_dim;
  j["num_heads"] = w.num_heads;
  j["num_layers"] = w.num_layers;
  j["dtype_bytes"] = w.dtype_bytes;
  j["micro_batch"] = w.micro_batch;
  j["global_batch"] = w.global_batch;
  j["gamma_act"] = w.gamma_act;
  if (w.param_count) {
    j["param_count"] = *w.param_count;
  }
  j["outer_shards"] = w.outer_shards;
  return j.dump(2) + "\n";
}

void Schedule::refresh_group_index(int num_devices) {
  group_of.assign(num_devices, -1);
  for (int k = 0; k < (int)groups.size(); ++k) {
    for (int d : groups[k]) {
      if (d >= 0 && d < num_devices) {
        group_of[d] = k;
      }
    }
  }
}

void assign_head_ranges(Schedule &sched) {
  size_t n = sched.heads.size();
  sched.head_begin.assign(n, 0);
  sched.head_end.assign(n, 0);
  for (const std::vector<int> &group : sched.groups) {
    int64_t running = 0;
    for (int d : group) {
      sched.head_begin[d] = running;
      running += sched.heads[d];
      sched.head_end[d] = running;
    }
  }
}

std::vector<std::string> validate_schedule_report(const ClusterSpec &cluster,
                                                  const WorkloadSpec &workload,
                                                  const Schedule &sched,
                                                  int64_t quantum) {
  const int n = cluster.num_devices();
  std::vector<std::string> bad;
  if (quantum <= 0) {
    bad.push_back("quantum must be positive");
    return bad;
  }
  if (sched.groups.empty()) {
    bad.push_back("no groups");
    return bad;
  }
  if (sched.group_len.size() != sched.groups.size()) {
    bad.push_back("group_len size does not match groups");
    return bad;
  }
  if ((int)sched.pre_shard.size() != n || (int)sched.heads.size() != n ||
      (int)sched.head_begin.size() != n || (int)sched.head_end.size() != n) {
    bad.push_back("per-device arrays must cover every device");
    return bad;
  }

  // Exact partition of the device set.
  std::vector<char> seen(n, 0);
  for (const std::vector<int> &group : sched.groups) {
    if (group.empty()) {
      bad.push_back("empty group");
    }
    for (int d : group) {
      if (d < 0 || d >= n) {
        bad.push_back("device index out of range");
        return bad;
      }
      if (seen[d]) {
        bad.push_back("device '" + cluster.devices[d].id +
                      "' appears in more than one group");
      }
      seen[d] = 1;
    }
  }
  for (int d = 0; d < n; ++d) {
    if (!seen[d]) {
      bad.push_back("device '" + cluster.devices[d].id +
                    "' is not assigned to any group");
    }
  }

  int64_t len_sum = 0;
  for (size_t k = 0; k < sched.groups.size(); ++k) {
    int64_t L = sched.group_len[k];
    if (L < 0) {
      bad.push_back("negative group_len");
    }
    if (quantum > 0 && L % quantum != 0) {
      bad.push_back("group_len not a multiple of the quantum");
    }
    len_sum += L;

    int64_t shard_sum = 0;
    int head_sum = 0;
    int64_t running = 0;
    bool contiguous = true;
    for (int d : sched.groups[k]) {
      if (sched.pre_shard[d] < 0) {
        bad.push_back("negative pre_shard for device '" +
                      cluster.devices[d].id + "'");
      }
      if (sched.pre_shard[d] % quantum != 0) {
        bad.push_back("pre_shard not a multiple of the quantum");
      }
      shard_sum += sched.pre_shard[d];
      if (sched.heads[d] < 0) {
        bad.push_back("negative head count for device '" +
                      cluster.devices[d].id + "'");
      }
      head_sum += sched.heads[d];
      if (sched.head_begin[d] != running ||
          sched.head_end[d] != running + sched.heads[d]) {
        contiguous = false;
      }
      running = sched.head_end[d];
    }
    if (!contiguous) {
      bad.push_back("head ranges not contiguous in rank order");
    }
    if (shard_sum != L) {
      bad.push_back("pre_shard does not sum to group_len");
    }
    if (head_sum != workload.num_heads) {
      bad.push_back("group head counts do not sum to num_heads");
    }
    if (contiguous && running != workload.num_heads) {
      bad.push_back("head ranges do not cover all heads");
    }
  }
  if (len_sum != workload.L_tot) {
    bad.push_back("group_len does not sum to L_tot");
  }
  return bad;
}

void validate_schedule(const ClusterSpec &cluster, const WorkloadSpec &workload,
                       const Schedule &sched, int64_t quantum) {
  std::vector<std::string> bad =
      validate_schedule_report(cluster, workload, sched, quantum);
  if (bad.empty()) {
    return;
  }
  std::string msg = "schedule: " + bad[0];
  for (size_t i = 1; i < bad.size(); ++i) {
    msg += "; " + bad[i];
  }
  throw ValidationError(msg);
}

std::string save_schedule(const Schedule &sched, const ClusterSpec &cluster) {
  json j;
  json groups = json::array();
  for (const std::vector<int> &group : sched.groups) {
    json g = json::array();
    for (int d : group) {
      g.push_back(cluster.devices[d].id);
    }
    groups.push_back(std::move(g));
  }
  j["groups"] = std::move(groups);
  j["group_len"] = sched.group_len;

  json pre = json::object();
  json heads = json::object();
  json ranges = json::object();
  for (const std::vector<int> &group : sched.groups) {
    for (int d : group) {
      const std::string &id = cluster.devices[d].id;
      pre[id] = sched.pre_shard[d];
      heads[id] = sched.heads[d];
      ranges[id] = json::array({sched.head_begin[d], sched.head_end[d]});
    }
  }
  j["pre_shard"] = std::move(pre);
  j["heads"] = std::move(heads);
  j["head_range"] = std::move(ranges);
  return j.dump(2) + "\n";
}

Schedule load_schedule(const std::string &json_text, const ClusterSpec &cluster) {
  const std::string what = "schedule";
  json j = parse_json(json_text, what);
  if (!j.is_object()) {
    throw ParseError(what + ": top level must be an object");
  }
  const int n = cluster.num_devices();

  Schedule s;
  const json &groups = require_field(j, "groups", what);
  if (!groups.is_array()) {
    throw ParseError(what + ": 'groups' must be an array of arrays");
  }
  for (const json &gj : groups) {
    if (!gj.is_array()) {
      throw ParseError(what + ": 'groups' must be an array of arrays");
    }
    std::vector<int> group;
    for (const json &idj : gj) {
      if (!idj.is_string()) {
        throw ParseError(what + ": group members must be device ids");
      }
      group.push_back(cluster.index_of(idj.get<std::string>()));
    }
    s.groups.push_back(std::move(group));
  }

  const json &lens = require_field(j, "group_len", what);
  if (!lens.is_array()) {
    throw ParseError(what + ": 'group_len' must be an array");
  }
  for (const json &lj : lens) {
    if (!lj.is_number()) {
      throw ParseError(what + ": 'group_len' entries must be numbers");
    }
    s.group_len.push_back(lj.get<int64_t>());
  }

  auto read_map = [&](const char *key) {
    const json &m = require_field(j, key, what);
    if (!m.is_object()) {
      throw ParseError(what + ": '" + std::string(key) + "' must be an object");
    }
    return &m;
  };
  const json *pre = read_map("pre_shard");
  const json *heads = read_map("heads");
  const json *ranges = read_map("head_range");

  s.pre_shard.assign(n, 0);
  s.heads.assign(n, 0);
  s.head_begin.assign(n, 0);
  s.head_end.assign(n, 0);
  std::vector<char> present(n, 0);
  for (const std::vector<int> &group : s.groups) {
    for (int d : group) {
      present[d] = 1;
    }
  }
  auto expect_known = [&](const std::string &id) {
    int d = cluster.index_of(id);
    if (!present[d]) {
      throw ValidationError(what + ": device '" + id + "' not listed in groups");
    }
    return d;
  };
  for (auto it = pre->begin(); it != pre->end(); ++it) {
    s.pre_shard[expect_known(it.key())] = it.value().get<int64_t>();
  }
  for (auto it = heads->begin(); it != heads->end(); ++it) {
    s.heads[expect_known(it.key())] = it.value().get<int>();
  }
  for (auto it = ranges->begin(); it != ranges->end(); ++it) {
    int d = expect_known(it.key());
    const json &r = it.value();
    if (!r.is_array() || r.size() != 2) {
      throw ParseError(what + ": head_range entries must be [begin, end)");
    }
    s.head_begin[d] = r[0].get<int64_t>();
    s.head_end[d] = r[1].get<int64_t>();
  }
  for (const std::vector<int> &group : s.groups) {
    for (int d : group) {
      const std::string &id = cluster.devices[d].id;
      if (!pre->contains(id) || !heads->contains(id) || !ranges->contains(id)) {
        throw ValidationError(what + ": device '" + id +
                              "' missing from pre_shard/heads/head_range");
      }
    }
  }

  s.refresh_group_index(n);
  return s;
}

RingPlan build_ring_plan(const Schedule &sched, int num_devices) {
  const int K = sched.num_groups();
  RingPlan plan;
  plan.steps.assign(K, std::vector<RingStep>(num_devices));
  for (int t = 0; t < K; ++t) {
    for (int k = 0; k < K; ++k) {
      int src = (k - t + K) % K;
      for (int d : sched.groups[k]) {
        RingStep &st = plan.steps[t][d];
        st.src_group = src;
        st.peer = -1;
        if (t == 0 || sched.heads[d] == 0) {
          continue; // local step, or no heads -> nothing to receive
        }
        int64_t best_overlap = -1;
        for (int u : sched.groups[src]) {
          int64_t lo = std::max(sched.head_begin[d], sched.head_begin[u]);
          int64_t hi = std::min(sched.head_end[d], sched.head_end[u]);
          int64_t overlap = hi - lo;
          if (overlap > best_overlap) {
            best_overlap = overlap;
            st.peer = u;
          }
        }
      }
    }
  }
  return plan;
}

namespace {

Schedule make_even_schedule(const ClusterSpec &cluster, const WorkloadSpec &workload,
                            int cp, int hp, int64_t quantum) {
  const int n = cluster.num_devices();
  if (cp <= 0 || hp <= 0 || cp * hp != n) {
    throw ValidationError("schedule: layout " + std::to_string(cp) + "x" +
                          std::to_string(hp) + " does not cover " +
                          std::to_string(n) + " devices");
  }
  Schedule s;
  s.groups.resize(cp);
  for (int k = 0; k < cp; ++k) {
    s.groups[k].resize(hp);
    for (int r = 0; r < hp; ++r) {
      s.groups[k][r] = k * hp + r;
    }
  }
  std::vector<double> group_w(cp, 1.0);
  s.group_len = apportion_quantized(workload.L_tot, group_w, quantum);

  s.pre_shard.assign(n, 0);
  s.heads.assign(n, 0);
  std::vector<double> rank_w(hp, 1.0);
  for (int k = 0; k < cp; ++k) {
    std::vector<int64_t> shards = apportion_quantized(s.group_len[k], rank_w, quantum);
    std::vector<int64_t> heads = apportion(workload.num_heads, rank_w);
    for (int r = 0; r < hp; ++r) {
      s.pre_shard[s.groups[k][r]] = shards[r];
      s.heads[s.groups[k][r]] = (int)heads[r];
    }
  }
  assign_head_ranges(s);
  s.refresh_group_index(n);
  return s;
}

} // namespace

Schedule make_usp_schedule(const ClusterSpec &cluster, const WorkloadSpec &workload,
                           int cp, int hp, int64_t quantum) {
  return make_even_schedule(cluster, workload, cp, hp, quantum);
}

Schedule make_ring_schedule(const ClusterSpec &cluster, const WorkloadSpec &workload,
                            int64_t quantum) {
  return make_even_schedule(cluster, workload, cluster.num_devices(), 1, quantum);
}

Schedule make_ulysses_schedule(const ClusterSpec &cluster, const WorkloadSpec &workload,
                               int64_t quantum) {
  return make_even_schedule(cluster, workload, 1, cluster.num_devices(), quantum);
}

std::vector<std::pair<int, int>> usp_layouts(int num_devices, int num_heads) {
  std::vector<std::pair<int, int>> out;
  for (int cp = num_devices; cp >= 1; --cp) {
    if (num_devices % cp != 0) {
      continue;
    }
    int hp = num_devices / cp;
    if (num_heads % hp != 0) {
      continue; // heads would not split evenly across the group
    }
    out.emplace_back(cp, hp);
  }
  return out;
}

} // namespace hexsched
