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
#include "hexsched/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>

#include "hexsched/apportion.hpp"
#include "hexsched/descent.hpp"
#include "hexsched/log.hpp"
#include "hexsched/util.hpp"
#include "json_util.hpp"

namespace hexsched {

SchedulerConfig load_scheduler_config(const std::string &json_text) {
  const std::string what = "config";
  json j = parse_json(json_text, what);
  if (!j.is_object()) {
    throw ParseError(what + ": top level must be an object");
  }
  // One flat config namespace serves every command; keys owned by the
  // oracle (max_devices, head_step, state_cap) and the scenario presets
  // (device_table) are not errors here.
  static const std::set<std::string> known = {
      "M1",           "M2",          "I_max",      "quantum",
      "agglomeration_ratio", "perturbations", "move_tokens", "move_heads",
      "threads",      "max_devices", "head_step",  "state_cap",
      "device_table"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) {
      log_warn(what + ": unknown key '" + it.key() + "' ignored");
    }
  }
  SchedulerConfig c;
  if (auto v = opt_int(j, "M1", what)) {
    c.M1 = (int)*v;
  }
  if (auto v = opt_int(j, "M2", what)) {
    c.M2 = (int)*v;
  }
  if (auto v = opt_int(j, "I_max", what)) {
    c.I_max = (int)*v;
  }
  if (auto v = opt_int(j, "quantum", what)) {
    c.quantum = *v;
  }
  if (auto v = opt_double(j, "agglomeration_ratio", what)) {
    c.agglomeration_ratio = *v;
  }
  if (j.contains("perturbations")) {
    const json &p = j["perturbations"];
    if (!p.is_array()) {
      throw ParseError(what + ": 'perturbations' must be an array of fractions");
    }
    c.perturbations.clear();
    for (const json &e : p) {
      if (!e.is_number()) {
        throw ParseError(what + ": 'perturbations' must be an array of fractions");
      }
      c.perturbations.push_back(e.get<double>());
    }
  }
  if (auto v = opt_int(j, "move_tokens", what)) {
    c.move_tokens = *v;
  }
  if (auto v = opt_int(j, "move_heads", what)) {
    c.move_heads = (int)*v;
  }
  if (auto v = opt_int(j, "threads", what)) {
    c.threads = (int)*v;
  }
  validate_scheduler_config(c);
  return c;
}

void validate_scheduler_config(const SchedulerConfig &cfg) {
  const std::string what = "config";
  if (cfg.M1 < 1 || cfg.M2 < 1 || cfg.I_max < 1) {
    throw ValidationError(what + ": M1, M2 and I_max must each be >= 1");
  }
  if (cfg.quantum < 1) {
    throw ValidationError(what + ": quantum must be >= 1");
  }
  if (!(cfg.agglomeration_ratio > 1.0)) {
    throw ValidationError(what + ": agglomeration_ratio must be > 1");
  }
  for (double f : cfg.perturbations) {
    if (!(f > 0.0) || !(f < 1.0)) {
      throw ValidationError(what + ": perturbations must lie in (0, 1)");
    }
  }
  if (cfg.move_tokens < 0 ||
      (cfg.move_tokens > 0 && cfg.move_tokens % cfg.quantum != 0)) {
    throw ValidationError(what +
                          ": move_tokens must be a positive multiple of the "
                          "quantum (or 0 for one quantum)");
  }
  if (cfg.move_heads < 1) {
    throw ValidationError(what + ": move_heads must be >= 1");
  }
  if (cfg.threads < 1) {
    throw ValidationError(what + ": threads must be >= 1");
  }
}

std::string scheduler_config_json(const SchedulerConfig &cfg) {
  json j;
  j["M1"] = cfg.M1;
  j["M2"] = cfg.M2;
  j["I_max"] = cfg.I_max;
  j["quantum"] = cfg.quantum;
  j["agglomeration_ratio"] = cfg.agglomeration_ratio;
  j["perturbations"] = cfg.perturbations;
  j["move_tokens"] = cfg.move_tokens;
  j["move_heads"] = cfg.move_heads;
  j["threads"] = cfg.threads;
  return j.dump(2) + "\n";
}

namespace {

Partition canonical_partition(std::vector<std::vector<int>> groups) {
  for (std::vector<int> &g : groups) {
    std::sort(g.begin(), g.end());
  }
  std::sort(groups.begin(), groups.end(),
            [](const std::vector<int> &a, const std::vector<int> &b) {
              return a.front() < b.front();
            });
  return groups;
}

std::string partition_key(const Partition &p) {
  std::string s;
  for (const std::vector<int> &g : p) {
    for (int d : g) {
      s += std::to_string(d);
      s += ',';
    }
    s += ';';
  }
  return s;
}

// Undirected pair bandwidth: the faster direction of the two.
double pair_bandwidth(const ClusterSpec &cluster, int u, int v) {
  return std::max(1.0 / cluster.link(u, v).beta_s_per_B,
                  1.0 / cluster.link(v, u).beta_s_per_B);
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    for (int i = 0; i < n; ++i) {
      parent[i] = i;
    }
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) {
      return false;
    }
    if (a > b) {
      std::swap(a, b); // keep the smallest index as the root
    }
    parent[b] = a;
    return true;
  }
};

Partition components_of(UnionFind &uf, int n) {
  std::map<int, std::vector<int>> comps;
  for (int d = 0; d < n; ++d) {
    comps[uf.find(d)].push_back(d);
  }
  std::vector<std::vector<int>> groups;
  groups.reserve(comps.size());
  for (auto &kv : comps) {
    groups.push_back(std::move(kv.second));
  }
  return canonical_partition(std::move(groups));
}

} // namespace

std::vector<Partition> partition_topology(const ClusterSpec &cluster,
                                          const SchedulerConfig &cfg) {
  const int n = cluster.num_devices();
  if (n == 0) {
    throw ValidationError("cluster: empty");
  }

  struct Edge {
    double bw;
    int u, v;
  };
  std::vector<Edge> edges;
  edges.reserve((size_t)n * (n - 1) / 2);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      edges.push_back({pair_bandwidth(cluster, u, v), u, v});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge &a, const Edge &b) {
    if (a.bw != b.bw) {
      return a.bw > b.bw;
    }
    if (a.u != b.u) {
      return a.u < b.u;
    }
    return a.v < b.v;
  });

  // Agglomerate level by level (a level = one distinct bandwidth value),
  // snapshotting the partition after each level; stop once the next level is
  // more than `agglomeration_ratio` below the last level that merged.
  std::vector<Partition> collected;
  UnionFind uf(n);
  double last_merge_bw = 0.0;
  bool have_merge = false;
  size_t i = 0;
  while (i < edges.size()) {
    double level = edges[i].bw;
    if (have_merge && level < last_merge_bw / cfg.agglomeration_ratio) {
      break;
    }
    bool merged = false;
    while (i < edges.size() && edges[i].bw == level) {
      merged = uf.unite(edges[i].u, edges[i].v) || merged;
      ++i;
    }
    if (merged) {
      have_merge = true;
      last_merge_bw = level;
    }
    collected.push_back(components_of(uf, n));
  }

  // Seeds: all-singletons, one group of all, node-aligned, and every even
  // factorization of the device order into equal contiguous groups.
  {
    std::vector<std::vector<int>> singles(n);
    for (int d = 0; d < n; ++d) {
      singles[d] = {d};
    }
    collected.push_back(canonical_partition(std::move(singles)));

    std::vector<int> everyone(n);
    for (int d = 0; d < n; ++d) {
      everyone[d] = d;
    }
    collected.push_back({everyone});

    std::map<int, std::vector<int>> by_node;
    for (int d = 0; d < n; ++d) {
      by_node[cluster.devices[d].node].push_back(d);
    }
    std::vector<std::vector<int>> node_groups;
    for (auto &kv : by_node) {
      node_groups.push_back(std::move(kv.second));
    }
    collected.push_back(canonical_partition(std::move(node_groups)));

    for (int groups = 1; groups <= n; ++groups) {
      if (n % groups != 0) {
        continue;
      }
      int size = n / groups;
      std::vector<std::vector<int>> mesh(groups);
      for (int k = 0; k < groups; ++k) {
        for (int r = 0; r < size; ++r) {
          mesh[k].push_back(k * size + r);
        }
      }
      collected.push_back(canonical_partition(std::move(mesh)));
    }
  }

  // Deduplicate, rank by mean intra-group bandwidth (descending; the
  // all-singletons partition has no intra edges and ranks below everything),
  // break ties toward the lexicographically smaller partition.
  struct Ranked {
    double mean_bw;
    std::string key;
    Partition partition;
  };
  std::vector<Ranked> ranked;
  std::set<std::string> seen;
  for (Partition &p : collected) {
    std::string key = partition_key(p);
    if (!seen.insert(key).second) {
      continue;
    }
    double sum = 0.0;
    int64_t pairs = 0;
    for (const std::vector<int> &g : p) {
      for (size_t a = 0; a < g.size(); ++a) {
        for (size_t b = a + 1; b < g.size(); ++b) {
          sum += pair_bandwidth(cluster, g[a], g[b]);
          ++pairs;
        }
      }
    }
    double mean = pairs > 0 ? sum / (double)pairs : -1.0;
    ranked.push_back({mean, std::move(key), std::move(p)});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked &a, const Ranked &b) {
    if (a.mean_bw != b.mean_bw) {
      return a.mean_bw > b.mean_bw;
    }
    return a.key < b.key;
  });
  if ((int)ranked.size() > cfg.M1) {
    ranked.resize(cfg.M1);
  }

  std::vector<Partition> out;
  out.reserve(ranked.size());
  for (Ranked &r : ranked) {
    out.push_back(std::move(r.partition));
  }
  return out;
}

std::vector<SuperNode> abstract_super_nodes(const Partition &partition,
                                            const ClusterSpec &cluster,
                                            const WorkloadSpec &workload) {
  std::vector<char> member_of(cluster.num_devices(), -1);
  for (size_t k = 0; k < partition.size(); ++k) {
    if (partition[k].empty()) {
      throw ValidationError("partition: empty group");
    }
    for (int d : partition[k]) {
      member_of[d] = (char)k;
    }
  }

  auto edge_cost = [&](int u, int v) {
    const LinkProfile &f = cluster.link(u, v);
    const LinkProfile &r = cluster.link(v, u);
    return ((f.alpha_s + f.beta_s_per_B) + (r.alpha_s + r.beta_s_per_B)) / 2.0;
  };

  std::vector<SuperNode> out;
  out.reserve(partition.size());
  for (size_t k = 0; k < partition.size(); ++k) {
    const std::vector<int> &g = partition[k];
    SuperNode sn;
    sn.members = g;
    sn.mem_cap_min_B = std::numeric_limits<int64_t>::max();
    sn.mem_avail_min_B = std::numeric_limits<int64_t>::max();
    for (int d : g) {
      const DeviceProfile &dev = cluster.devices[d];
      sn.agg_compute += dev.compute_flops;
      sn.agg_mem_bw += dev.mem_bw_Bps;
      sn.mem_cap_min_B = std::min(sn.mem_cap_min_B, dev.mem_cap_B);
      sn.mem_avail_min_B =
          std::min(sn.mem_avail_min_B,
                   dev.mem_cap_B - resolved_static_mem(workload, dev));
    }
    double intra_sum = 0.0;
    int64_t intra_pairs = 0;
    for (size_t a = 0; a < g.size(); ++a) {
      for (size_t b = a + 1; b < g.size(); ++b) {
        intra_sum += edge_cost(g[a], g[b]);
        ++intra_pairs;
      }
    }
    sn.intra_cost = intra_pairs > 0 ? intra_sum / (double)intra_pairs : 0.0;
    double inter_sum = 0.0;
    int64_t inter_pairs = 0;
    for (int d : g) {
      for (int o = 0; o < cluster.num_devices(); ++o) {
        if (member_of[o] != (char)k) {
          inter_sum += edge_cost(d, o);
          ++inter_pairs;
        }
      }
    }
    sn.inter_cost = inter_pairs > 0 ? inter_sum / (double)inter_pairs : 0.0;
    out.push_back(std::move(sn));
  }
  return out;
}

Schedule initialize_assignment(const ClusterSpec &cluster,
                               const WorkloadSpec &workload,
                               const Partition &partition,
                               const std::vector<int64_t> &lens,
                               const SchedulerConfig &cfg) {
  const int n = cluster.num_devices();
  Schedule s;
  s.groups = partition;
  s.group_len = lens;
  s.pre_shard.assign(n, 0);
  s.heads.assign(n, 0);
  for (size_t k = 0; k < partition.size(); ++k) {
    const std::vector<int> &g = partition[k];
    std::vector<double> w(g.size());
    for (size_t r = 0; r < g.size(); ++r) {
      w[r] = cluster.devices[g[r]].compute_flops;
    }
    std::vector<int64_t> shards = apportion_quantized(lens[k], w, cfg.quantum);
    std::vector<int64_t> heads = apportion(workload.num_heads, w);
    for (size_t r = 0; r < g.size(); ++r) {
      s.pre_shard[g[r]] = shards[r];
      s.heads[g[r]] = (int)heads[r];
    }
  }
  assign_head_ranges(s);
  s.refresh_group_index(n);
  return s;
}

namespace {

// Memory-capped seed: clip each group's length to the largest quantum-aligned
// value whose provisional activation estimate (shares proportional to member
// compute) fits the tightest member, then push the clipped-off tokens onto
// the still-unclipped groups. Returns nothing when every group is clipped and
// tokens remain.
std::optional<std::vector<int64_t>> capped_seed(
    const std::vector<int64_t> &seed, const std::vector<SuperNode> &supernodes,
    const ClusterSpec &cluster, const WorkloadSpec &workload, int64_t quantum) {
  const int K = (int)supernodes.size();
  const double per_token =
      (double)workload.micro_batch * workload.dtype_bytes *
      (workload.gamma_act * (double)workload.hidden_dim +
       2.0 * (double)workload.num_heads * workload.head_dim);

  std::vector<int64_t> cap(K, 0);
  for (int k = 0; k < K; ++k) {
    const SuperNode &sn = supernodes[k];
    // For member d at share c_d/C_k of both tokens and heads, activation is
    // per_token * L_k * c_d / C_k; invert against the member's free memory.
    double limit = (double)workload.L_tot;
    for (int d : sn.members) {
      const DeviceProfile &dev = cluster.devices[d];
      double avail =
          std::max(0.0, (double)(dev.mem_cap_B - resolved_static_mem(workload, dev)));
      double share = dev.compute_flops / sn.agg_compute;
      limit = std::min(limit, avail / (per_token * share));
    }
    cap[k] = (int64_t)std::floor(limit / (double)quantum) * quantum;
  }

  std::vector<int64_t> lens = seed;
  std::vector<char> clipped(K, 0);
  for (;;) {
    int64_t excess = 0;
    for (int k = 0; k < K; ++k) {
      if (!clipped[k] && lens[k] > cap[k]) {
        excess += lens[k] - cap[k];
        lens[k] = cap[k];
        clipped[k] = 1;
      }
    }
    if (excess == 0) {
      return lens;
    }
    std::vector<int> open;
    std::vector<double> w;
    for (int k = 0; k < K; ++k) {
      if (!clipped[k]) {
        open.push_back(k);
        w.push_back(supernodes[k].agg_compute);
      }
    }
    if (open.empty()) {
      return std::nullopt; // nothing can absorb the overflow
    }
    std::vector<int64_t> add = apportion_quantized(excess, w, quantum);
    for (size_t i = 0; i < open.size(); ++i) {
      lens[open[i]] += add[i];
    }
  }
}

} // namespace

std::vector<GroupPlan> generate_candidates(const ClusterSpec &cluster,
                                           const WorkloadSpec &workload,
                                           const std::vector<Partition> &partitions,
                                           const SchedulerConfig &cfg) {
  struct Raw {
    const Partition *partition;
    std::vector<int64_t> lens;
  };
  std::vector<Raw> raw;

  for (const Partition &p : partitions) {
    std::vector<SuperNode> sn = abstract_super_nodes(p, cluster, workload);
    const int K = (int)sn.size();
    std::vector<double> w(K), w_sqrt(K);
    for (int k = 0; k < K; ++k) {
      w[k] = sn[k].agg_compute;
      w_sqrt[k] = std::sqrt(sn[k].agg_compute);
    }

    std::vector<std::vector<int64_t>> seeds;
    seeds.push_back(apportion_quantized(workload.L_tot, w, cfg.quantum));
    seeds.push_back(apportion_quantized(workload.L_tot, w_sqrt, cfg.quantum));
    if (auto capped = capped_seed(seeds[0], sn, cluster, workload, cfg.quantum)) {
      seeds.push_back(std::move(*capped));
    }

    std::set<std::string> local;
    auto push = [&](std::vector<int64_t> lens) {
      std::string key;
      for (int64_t v : lens) {
        key += std::to_string(v);
        key += ',';
      }
      if (local.insert(key).second) {
        raw.push_back({&p, std::move(lens)});
      }
    };

    size_t num_seeds = seeds.size();
    for (size_t si = 0; si < num_seeds; ++si) {
      push(seeds[si]);
      if (K < 2) {
        continue;
      }
      for (double frac : cfg.perturbations) {
        int64_t delta =
            (int64_t)std::llround(frac * (double)workload.L_tot /
                                  (double)cfg.quantum) *
            cfg.quantum;
        if (delta <= 0) {
          continue;
        }
        for (int from = 0; from < K; ++from) {
          if (seeds[si][from] < delta) {
            continue; // donor would go negative
          }
          for (int to = 0; to < K; ++to) {
            if (to == from) {
              continue;
            }
            std::vector<int64_t> lens = seeds[si];
            lens[from] -= delta;
            lens[to] += delta;
            push(std::move(lens));
          }
        }
      }
    }
  }

  // Score every candidate on its provisional assignment; drop infeasible.
  struct Scored {
    bool keep = false;
    double score = 0.0;
    std::string key;
    Schedule sched;
  };
  std::vector<Scored> scored(raw.size());
  parallel_for((int64_t)raw.size(), cfg.threads, [&](int64_t i) {
    Schedule s = initialize_assignment(cluster, workload, *raw[i].partition,
                                       raw[i].lens, cfg);
    CostBreakdown bd = block_latency(cluster, workload, s);
    if (!bd.feasible) {
      return;
    }
    scored[i].keep = true;
    scored[i].score = bd.block_s;
    scored[i].key = save_schedule(s, cluster);
    scored[i].sched = std::move(s);
  });

  std::vector<size_t> order;
  for (size_t i = 0; i < scored.size(); ++i) {
    if (scored[i].keep) {
      order.push_back(i);
    }
  }
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (scored[a].score != scored[b].score) {
      return scored[a].score < scored[b].score;
    }
    return scored[a].key < scored[b].key;
  });
  if ((int)order.size() > cfg.M2) {
    order.resize(cfg.M2);
  }

  std::vector<GroupPlan> out;
  out.reserve(order.size());
  for (size_t i : order) {
    GroupPlan plan;
    plan.partition = *raw[i].partition;
    plan.lens = raw[i].lens;
    plan.provisional = std::move(scored[i].sched);
    plan.score = scored[i].score;
    out.push_back(std::move(plan));
  }
  return out;
}

RefineResult refine(const ClusterSpec &cluster, const WorkloadSpec &workload,
                    const Schedule &start, const SchedulerConfig &cfg) {
  DescentEvaluator ev(cluster, workload, start);
  const int64_t d_tok = cfg.resolved_move_tokens();
  const int d_head = cfg.move_heads;
  const int K = start.num_groups();

  RefineResult r;
  r.initial_block_s = ev.block_s();

  int accepted = 0;
  bool improved = true;
  while (improved && accepted < cfg.I_max) {
    improved = false;
    const Schedule &s = ev.schedule();
    const double cur = ev.block_s();

    // Within-group moves: tokens first, then a head, per ordered pair.
    for (int k = 0; k < K && !improved; ++k) {
      const std::vector<int> &g = s.groups[k];
      for (size_t ia = 0; ia < g.size() && !improved; ++ia) {
        for (size_t ib = 0; ib < g.size() && !improved; ++ib) {
          if (ia == ib) {
            continue;
          }
          int a = g[ia], b = g[ib];
          if (s.pre_shard[a] >= d_tok) {
            DescentEvaluator::Probe p = ev.probe_token_within(a, b, d_tok);
            if (p.feasible && p.block_s < cur) {
              ev.commit_token_within(a, b, d_tok);
              improved = true;
              continue;
            }
          }
          if (s.heads[a] >= d_head) {
            DescentEvaluator::Probe p = ev.probe_head_move(a, b, d_head);
            if (p.feasible && p.block_s < cur) {
              ev.commit_head_move(a, b, d_head);
              improved = true;
            }
          }
        }
      }
    }

    // Token moves across ring-adjacent group pairs, both directions.
    if (!improved && K > 1) {
      for (int k = 0; k < K && !improved; ++k) {
        if (K == 2 && k == 1) {
          break; // the (1, 0) edge is the same as (0, 1)
        }
        int kn = (k + 1) % K;
        for (int pass = 0; pass < 2 && !improved; ++pass) {
          const std::vector<int> &ga = pass == 0 ? s.groups[k] : s.groups[kn];
          const std::vector<int> &gb = pass == 0 ? s.groups[kn] : s.groups[k];
          for (size_t ia = 0; ia < ga.size() && !improved; ++ia) {
            int a = ga[ia];
            if (s.pre_shard[a] < d_tok) {
              continue;
            }
            for (size_t ib = 0; ib < gb.size() && !improved; ++ib) {
              int b = gb[ib];
              DescentEvaluator::Probe p = ev.probe_token_cross(a, b, d_tok);
              if (p.feasible && p.block_s < cur) {
                ev.commit_token_cross(a, b, d_tok);
                improved = true;
              }
            }
          }
        }
      }
    }

    if (improved) {
      ++accepted;
    }
  }

  r.accepted = accepted;
  r.block_s = ev.block_s();
  r.feasible = ev.feasible();
  r.worst_deficit_B = ev.worst_deficit_B(&r.deficit_device);
  r.schedule = ev.schedule();
  return r;
}

std::string plan_trace_csv(const std::vector<TraceRow> &rows) {
  std::string out = "stage,plan_id,event,cost_s\n";
  for (const TraceRow &r : rows) {
    out += r.stage;
    out += ',';
    if (r.plan_id >= 0) {
      out += std::to_string(r.plan_id);
    }
    out += ',';
    out += r.event;
    out += ',';
    out += format_double(r.cost_s);
    out += '\n';
  }
  return out;
}

PlanResult plan_schedule(const ClusterSpec &cluster, const WorkloadSpec &workload,
                         const SchedulerConfig &cfg) {
  validate_scheduler_config(cfg);
  if (workload.L_tot % cfg.quantum != 0) {
    throw ValidationError(
        "workload: L_tot must be a multiple of the scheduler quantum");
  }

  std::vector<Partition> partitions = partition_topology(cluster, cfg);
  std::vector<GroupPlan> plans =
      generate_candidates(cluster, workload, partitions, cfg);

  // Starting points: every surviving plan, then the baseline layouts. The
  // baselines are mandatory so the final schedule can never lose to them.
  std::vector<Schedule> starts;
  std::set<std::string> seen;
  auto push = [&](Schedule s) {
    std::string key = save_schedule(s, cluster);
    if (seen.insert(key).second) {
      starts.push_back(std::move(s));
    }
  };
  for (GroupPlan &plan : plans) {
    push(std::move(plan.provisional));
  }
  push(make_ring_schedule(cluster, workload, cfg.quantum));
  push(make_ulysses_schedule(cluster, workload, cfg.quantum));
  for (auto [cp, hp] : usp_layouts(cluster.num_devices(), workload.num_heads)) {
    push(make_usp_schedule(cluster, workload, cp, hp, cfg.quantum));
  }

  std::vector<RefineResult> refined(starts.size());
  parallel_for((int64_t)starts.size(), cfg.threads, [&](int64_t i) {
    refined[i] = refine(cluster, workload, starts[i], cfg);
  });

  PlanResult result;
  result.partitions = (int)partitions.size();
  result.candidates = (int)plans.size();
  result.plans_refined = (int)starts.size();
  result.trace.push_back({"stage1", -1, "partitions", (double)partitions.size()});
  result.trace.push_back({"stage2", -1, "candidates", (double)plans.size()});
  for (size_t i = 0; i < refined.size(); ++i) {
    result.trace.push_back({"stage3", (int)i, "initial", refined[i].initial_block_s});
    result.trace.push_back({"stage3", (int)i, "final", refined[i].block_s});
    result.trace.push_back(
        {"stage3", (int)i, "accepted_moves", (double)refined[i].accepted});
  }

  int best = -1;
  std::string best_key;
  for (size_t i = 0; i < refined.size(); ++i) {
    if (!refined[i].feasible) {
      continue;
    }
    std::string key = save_schedule(refined[i].schedule, cluster);
    if (best < 0 || refined[i].block_s < refined[best].block_s ||
        (refined[i].block_s == refined[best].block_s && key < best_key)) {
      best = (int)i;
      best_key = std::move(key);
    }
  }
  if (best < 0) {
    // Report the closest miss: the plan with the smallest worst overshoot.
    size_t tightest = 0;
    for (size_t i = 1; i < refined.size(); ++i) {
      if (refined[i].worst_deficit_B < refined[tightest].worst_deficit_B) {
        tightest = i;
      }
    }
    const RefineResult &t = refined[tightest];
    std::string dev_id = t.deficit_device >= 0
                             ? cluster.devices[t.deficit_device].id
                             : std::string("?");
    throw InfeasibleError(
        "infeasible: no candidate schedule fits device memory; tightest is "
        "device '" +
        dev_id + "' over capacity by " +
        std::to_string((long long)std::llround(t.worst_deficit_B)) + " B");
  }

  result.trace.push_back({"stage3", best, "selected", refined[best].block_s});
  result.best_plan_id = best;
  result.schedule = refined[best].schedule;
  result.breakdown = iteration_latency(cluster, workload, result.schedule);
  return result;
}

} // namespace hexsched
