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
#include "hexsched/descent.hpp"

#include <algorithm>
#include <limits>

#include "hexsched/model_kernels.hpp"

namespace hexsched {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kNoId = -9; // sentinel id, never collides with indices or -1
} // namespace

void DescentEvaluator::Top3::reset(bool is_min) {
  double s = is_min ? kInf : -kInf;
  v[0] = v[1] = v[2] = s;
  id[0] = id[1] = id[2] = kNoId;
}

void DescentEvaluator::Top3::add(double val, int i, bool is_min) {
  auto better = [&](double x, double y) { return is_min ? x < y : x > y; };
  if (better(val, v[0])) {
    v[2] = v[1]; id[2] = id[1];
    v[1] = v[0]; id[1] = id[0];
    v[0] = val; id[0] = i;
  } else if (better(val, v[1])) {
    v[2] = v[1]; id[2] = id[1];
    v[1] = val; id[1] = i;
  } else if (better(val, v[2])) {
    v[2] = val; id[2] = i;
  }
}

double DescentEvaluator::Top3::best_excluding(int x, int y, bool is_min) const {
  for (int j = 0; j < 3; ++j) {
    if (id[j] != x && id[j] != y) {
      return v[j];
    }
  }
  return is_min ? kInf : -kInf;
}

DescentEvaluator::DescentEvaluator(const ClusterSpec &cluster,
                                   const WorkloadSpec &workload, Schedule initial)
    : cluster_(cluster), work_(workload), sched_(std::move(initial)) {
  n_ = cluster_.num_devices();
  K_ = sched_.num_groups();
  sched_.refresh_group_index(n_);
  scratch_val_.assign((size_t)K_ * n_, 0.0);
  scratch_epoch_.assign((size_t)K_ * n_, 0);
  scratch_begin_.assign(n_, 0);
  scratch_end_.assign(n_, 0);
  rebuild();
}

double DescentEvaluator::a2a_term(int d, int j, int64_t s_d, int n_j) const {
  int64_t vol = a2a_volume_B(work_.micro_batch, s_d, n_j, work_.head_dim,
                             work_.dtype_bytes);
  return link_time(cluster_.link(d, j), vol);
}

double DescentEvaluator::row_max_fresh(int k, int d, int64_t s_d) const {
  double best = -kInf;
  for (int j : sched_.groups[k]) {
    if (j == d) {
      continue;
    }
    best = std::max(best, a2a_term(d, j, s_d, sched_.heads[j]));
  }
  return best;
}

double DescentEvaluator::step_entry(int t, int d, int64_t L_q, int64_t L_kv,
                                    int n_d, int peer) const {
  double comp = attn_flops(work_.micro_batch, L_q, L_kv, n_d, work_.head_dim) /
                cluster_.devices[d].compute_flops;
  if (t == 0 || peer < 0) {
    return comp;
  }
  int64_t msg = ring_msg_B(work_.micro_batch, L_kv, n_d, work_.head_dim,
                           work_.dtype_bytes);
  return std::max(comp, link_time(cluster_.link(peer, d), msg));
}

int DescentEvaluator::find_peer(int d, int64_t hb, int64_t he, int src_group,
                                const std::vector<int64_t> &begin,
                                const std::vector<int64_t> &end) const {
  (void)d;
  int peer = -1;
  int64_t best_overlap = -1;
  for (int u : sched_.groups[src_group]) {
    int64_t lo = std::max(hb, begin[u]);
    int64_t hi = std::min(he, end[u]);
    int64_t overlap = hi - lo;
    if (overlap > best_overlap) {
      best_overlap = overlap;
      peer = u;
    }
  }
  return peer;
}

void DescentEvaluator::rebuild() {
  const int64_t B = work_.micro_batch;
  const int64_t H = work_.hidden_dim;
  const int64_t dh = work_.head_dim;
  const int64_t P = work_.dtype_bytes;

  sched_.refresh_group_index(n_);

  static_mem_.assign(n_, 0);
  for (int d = 0; d < n_; ++d) {
    static_mem_[d] = resolved_static_mem(work_, cluster_.devices[d]);
  }

  nonattn_.assign(n_, 0.0);
  nonattn_top_.reset(false);
  nonattn_max_ = 0.0;
  for (int d = 0; d < n_; ++d) {
    nonattn_[d] = nonattn_latency(work_, cluster_.devices[d], sched_.pre_shard[d]);
    nonattn_top_.add(nonattn_[d], d, false);
    nonattn_max_ = std::max(nonattn_max_, nonattn_[d]);
  }

  a2a_.assign(K_, 0.0);
  a2a_top_.reset(false);
  rowmax_top_.assign(K_, Top3{});
  row_max_.assign(n_, -kInf);
  row_top1_v_.assign(n_, -kInf);
  row_top2_v_.assign(n_, -kInf);
  row_top1_c_.assign(n_, kNoId);
  row_top2_c_.assign(n_, kNoId);
  a2a_max_ = 0.0;
  for (int k = 0; k < K_; ++k) {
    rowmax_top_[k].reset(false);
    const std::vector<int> &group = sched_.groups[k];
    if (group.size() > 1) {
      double worst = -kInf;
      for (int d : group) {
        double t1 = -kInf, t2 = -kInf;
        int c1 = kNoId, c2 = kNoId;
        for (int j : group) {
          if (j == d) {
            continue;
          }
          double term = a2a_term(d, j, sched_.pre_shard[d], sched_.heads[j]);
          if (term > t1) {
            t2 = t1; c2 = c1;
            t1 = term; c1 = j;
          } else if (term > t2) {
            t2 = term; c2 = j;
          }
        }
        row_max_[d] = t1;
        row_top1_v_[d] = t1; row_top1_c_[d] = c1;
        row_top2_v_[d] = t2; row_top2_c_[d] = c2;
        rowmax_top_[k].add(t1, d, false);
        worst = std::max(worst, t1);
      }
      a2a_[k] = 4.0 * worst;
    }
    a2a_top_.add(a2a_[k], k, false);
    a2a_max_ = std::max(a2a_max_, a2a_[k]);
  }

  peer_.assign((size_t)K_ * n_, -1);
  comp_.assign((size_t)K_ * n_, 0.0);
  cost_.assign((size_t)K_ * n_, 0.0);
  step_top_.assign(K_, Top3{});
  step_.assign(K_, 0.0);
  steps_total_ = 0.0;
  for (int t = 0; t < K_; ++t) {
    step_top_[t].reset(false);
    double stepmax = 0.0;
    for (int k = 0; k < K_; ++k) {
      int src = (k - t + K_) % K_;
      for (int d : sched_.groups[k]) {
        size_t idx = (size_t)t * n_ + d;
        int peer = -1;
        if (t > 0 && sched_.heads[d] > 0) {
          peer = find_peer(d, sched_.head_begin[d], sched_.head_end[d], src,
                           sched_.head_begin, sched_.head_end);
        }
        peer_[idx] = peer;
        int64_t L_q = sched_.group_len[k];
        int64_t L_kv = sched_.group_len[src];
        comp_[idx] = attn_flops(B, L_q, L_kv, sched_.heads[d], dh) /
                     cluster_.devices[d].compute_flops;
        cost_[idx] = step_entry(t, d, L_q, L_kv, sched_.heads[d], peer);
        step_top_[t].add(cost_[idx], d, false);
        stepmax = std::max(stepmax, cost_[idx]);
      }
    }
    step_[t] = stepmax;
    steps_total_ += stepmax;
  }

  slack_.assign(n_, 0.0);
  slackmin_group_.assign(K_, Top3{});
  slackmin_groups_.reset(true);
  group_min_slack_.assign(K_, kInf);
  feasible_ = true;
  for (int k = 0; k < K_; ++k) {
    slackmin_group_[k].reset(true);
    for (int d : sched_.groups[k]) {
      double act = act_mem_B(B, P, work_.gamma_act, sched_.pre_shard[d], H,
                             sched_.group_len[k], sched_.heads[d], dh);
      double total = (double)static_mem_[d] + act;
      slack_[d] = (double)cluster_.devices[d].mem_cap_B - total;
      slackmin_group_[k].add(slack_[d], d, true);
      group_min_slack_[k] = std::min(group_min_slack_[k], slack_[d]);
      if (total > (double)cluster_.devices[d].mem_cap_B) {
        feasible_ = false;
      }
    }
    slackmin_groups_.add(group_min_slack_[k], k, true);
  }

  // Link uniformity toward each group, for peer-independent receive costs.
  uniform_.assign((size_t)n_ * K_, 1);
  uniform_lp_.assign((size_t)n_ * K_, LinkProfile{});
  group_nonuniform_rx_.assign(K_, 0);
  group_rx_shift_sensitive_.assign(K_, 0);
  for (int d = 0; d < n_; ++d) {
    for (int k = 0; k < K_; ++k) {
      bool first = true;
      bool uniform = true;
      LinkProfile lp{};
      for (int u : sched_.groups[k]) {
        if (u == d) {
          continue;
        }
        const LinkProfile &cur = cluster_.link(u, d);
        if (first) {
          lp = cur;
          first = false;
        } else if (cur.alpha_s != lp.alpha_s ||
                   cur.beta_s_per_B != lp.beta_s_per_B) {
          uniform = false;
          break;
        }
      }
      size_t idx = (size_t)d * K_ + k;
      uniform_[idx] = uniform ? 1 : 0;
      uniform_lp_[idx] = lp;
      if (!uniform && sched_.group_of[d] != k) {
        // d receives from group k with peer-dependent cost: k's head moves
        // can change d's entry, and any head move in d's own group shifts
        // d's range and with it d's peer inside k.
        group_nonuniform_rx_[k] = 1;
        group_rx_shift_sensitive_[sched_.group_of[d]] = 1;
      }
    }
  }

  block_ = nonattn_max_ + a2a_max_ + steps_total_;
}

double DescentEvaluator::worst_deficit_B(int *device) const {
  double worst = 0.0;
  int who = -1;
  for (int d = 0; d < n_; ++d) {
    if (-slack_[d] > worst) {
      worst = -slack_[d];
      who = d;
    }
  }
  if (device) {
    *device = who;
  }
  return worst;
}

DescentEvaluator::Probe DescentEvaluator::probe_token_within(int a, int b,
                                                             int64_t tokens) {
  const int k = sched_.group_of[a];
  const int64_t B = work_.micro_batch;
  const int64_t H = work_.hidden_dim;
  const int64_t dh = work_.head_dim;
  const int64_t P = work_.dtype_bytes;
  const int64_t sa = sched_.pre_shard[a] - tokens;
  const int64_t sb = sched_.pre_shard[b] + tokens;

  double va = nonattn_latency(work_, cluster_.devices[a], sa);
  double vb = nonattn_latency(work_, cluster_.devices[b], sb);
  double nonattn_max =
      std::max({nonattn_top_.best_excluding(a, b, false), va, vb});

  double row_a = row_max_fresh(k, a, sa);
  double row_b = row_max_fresh(k, b, sb);
  double worst = std::max({rowmax_top_[k].best_excluding(a, b, false), row_a, row_b});
  double a2a_k = 4.0 * worst;
  double a2a_max = std::max(a2a_top_.best_excluding(k, -1, false), a2a_k);

  int64_t L = sched_.group_len[k];
  double act_a = act_mem_B(B, P, work_.gamma_act, sa, H, L, sched_.heads[a], dh);
  double act_b = act_mem_B(B, P, work_.gamma_act, sb, H, L, sched_.heads[b], dh);
  double sl_a = (double)cluster_.devices[a].mem_cap_B -
                ((double)static_mem_[a] + act_a);
  double sl_b = (double)cluster_.devices[b].mem_cap_B -
                ((double)static_mem_[b] + act_b);
  double rest = std::min(slackmin_group_[k].best_excluding(a, b, true),
                         slackmin_groups_.best_excluding(k, -1, true));

  Probe p;
  p.block_s = nonattn_max + a2a_max + steps_total_;
  p.feasible = sl_a >= 0.0 && sl_b >= 0.0 && rest >= 0.0;
  return p;
}

void DescentEvaluator::commit_token_within(int a, int b, int64_t tokens) {
  sched_.pre_shard[a] -= tokens;
  sched_.pre_shard[b] += tokens;
  rebuild();
}

DescentEvaluator::Probe DescentEvaluator::probe_token_cross(int a, int b,
                                                            int64_t tokens) {
  const int ka = sched_.group_of[a];
  const int kb = sched_.group_of[b];
  const int64_t B = work_.micro_batch;
  const int64_t H = work_.hidden_dim;
  const int64_t dh = work_.head_dim;
  const int64_t P = work_.dtype_bytes;
  const int64_t sa = sched_.pre_shard[a] - tokens;
  const int64_t sb = sched_.pre_shard[b] + tokens;
  const int64_t La = sched_.group_len[ka] - tokens;
  const int64_t Lb = sched_.group_len[kb] + tokens;

  auto newlen = [&](int g) -> int64_t {
    if (g == ka) {
      return La;
    }
    if (g == kb) {
      return Lb;
    }
    return sched_.group_len[g];
  };

  double va = nonattn_latency(work_, cluster_.devices[a], sa);
  double vb = nonattn_latency(work_, cluster_.devices[b], sb);
  double nonattn_max =
      std::max({nonattn_top_.best_excluding(a, b, false), va, vb});

  double a2a_ka = 0.0;
  if (sched_.groups[ka].size() > 1) {
    double row_a = row_max_fresh(ka, a, sa);
    a2a_ka = 4.0 * std::max(rowmax_top_[ka].best_excluding(a, -1, false), row_a);
  }
  double a2a_kb = 0.0;
  if (sched_.groups[kb].size() > 1) {
    double row_b = row_max_fresh(kb, b, sb);
    a2a_kb = 4.0 * std::max(rowmax_top_[kb].best_excluding(b, -1, false), row_b);
  }
  double a2a_max =
      std::max({a2a_top_.best_excluding(ka, kb, false), a2a_ka, a2a_kb});

  // Circulation overlay: lengths of ka/kb changed, peers and head counts did
  // not. Affected entries: every step of ka/kb members (L_q), plus the one
  // step per other device whose source group is ka or kb (L_kv).
  ++epoch_;
  auto stamp = [&](int t, int d, double val) {
    size_t idx = (size_t)t * n_ + d;
    scratch_val_[idx] = val;
    scratch_epoch_[idx] = epoch_;
  };
  for (int gk : {ka, kb}) {
    for (int d : sched_.groups[gk]) {
      int64_t sd_new = (d == a) ? sa : (d == b) ? sb : sched_.pre_shard[d];
      (void)sd_new; // pre-shards do not enter circulation costs
      for (int t = 0; t < K_; ++t) {
        int src = (gk - t + K_) % K_;
        stamp(t, d,
              step_entry(t, d, newlen(gk), newlen(src), sched_.heads[d],
                         peer_[(size_t)t * n_ + d]));
      }
    }
  }
  for (int g = 0; g < K_; ++g) {
    if (g == ka || g == kb) {
      continue;
    }
    for (int src : {ka, kb}) {
      int t = (g - src + K_) % K_;
      if (t == 0) {
        continue;
      }
      for (int d : sched_.groups[g]) {
        stamp(t, d,
              step_entry(t, d, sched_.group_len[g], newlen(src), sched_.heads[d],
                         peer_[(size_t)t * n_ + d]));
      }
    }
  }
  double steps_sum = 0.0;
  for (int t = 0; t < K_; ++t) {
    double stepmax = 0.0;
    for (int d = 0; d < n_; ++d) {
      size_t idx = (size_t)t * n_ + d;
      double val = (scratch_epoch_[idx] == epoch_) ? scratch_val_[idx] : cost_[idx];
      stepmax = std::max(stepmax, val);
    }
    steps_sum += stepmax;
  }

  // Memory: both groups' members see a new group length.
  double min_changed = kInf;
  bool ok = true;
  for (int gk : {ka, kb}) {
    int64_t L = newlen(gk);
    for (int d : sched_.groups[gk]) {
      int64_t sd_new = (d == a) ? sa : (d == b) ? sb : sched_.pre_shard[d];
      double act = act_mem_B(B, P, work_.gamma_act, sd_new, H, L,
                             sched_.heads[d], dh);
      double total = (double)static_mem_[d] + act;
      double sl = (double)cluster_.devices[d].mem_cap_B - total;
      min_changed = std::min(min_changed, sl);
      if (total > (double)cluster_.devices[d].mem_cap_B) {
        ok = false;
      }
    }
  }
  double rest = slackmin_groups_.best_excluding(ka, kb, true);

  Probe p;
  p.block_s = nonattn_max + a2a_max + steps_sum;
  p.feasible = ok && rest >= 0.0 && min_changed >= 0.0;
  return p;
}

void DescentEvaluator::commit_token_cross(int a, int b, int64_t tokens) {
  int ka = sched_.group_of[a];
  int kb = sched_.group_of[b];
  sched_.pre_shard[a] -= tokens;
  sched_.pre_shard[b] += tokens;
  sched_.group_len[ka] -= tokens;
  sched_.group_len[kb] += tokens;
  rebuild();
}

DescentEvaluator::Probe DescentEvaluator::probe_head_move(int a, int b, int heads) {
  const int g = sched_.group_of[a];
  const int64_t B = work_.micro_batch;
  const int64_t H = work_.hidden_dim;
  const int64_t dh = work_.head_dim;
  const int64_t P = work_.dtype_bytes;
  const int na = sched_.heads[a] - heads;
  const int nb = sched_.heads[b] + heads;

  auto row_cached_excl = [&](int d, int x, int y) -> double {
    if (row_top1_c_[d] != x && row_top1_c_[d] != y) {
      return row_top1_v_[d];
    }
    if (row_top2_c_[d] != x && row_top2_c_[d] != y) {
      return row_top2_v_[d];
    }
    double best = -kInf;
    for (int j : sched_.groups[g]) {
      if (j == d || j == x || j == y) {
        continue;
      }
      best = std::max(best, a2a_term(d, j, sched_.pre_shard[d], sched_.heads[j]));
    }
    return best;
  };

  double worst = -kInf;
  for (int d : sched_.groups[g]) {
    double row;
    if (d == a) {
      row = std::max(row_cached_excl(a, b, -1),
                     a2a_term(a, b, sched_.pre_shard[a], nb));
    } else if (d == b) {
      row = std::max(row_cached_excl(b, a, -1),
                     a2a_term(b, a, sched_.pre_shard[b], na));
    } else {
      row = std::max({row_cached_excl(d, a, b),
                      a2a_term(d, a, sched_.pre_shard[d], na),
                      a2a_term(d, b, sched_.pre_shard[d], nb)});
    }
    worst = std::max(worst, row);
  }
  double a2a_g = 4.0 * worst;
  double a2a_max = std::max(a2a_top_.best_excluding(g, -1, false), a2a_g);

  // New contiguous ranges for group g.
  {
    int64_t running = 0;
    for (int d : sched_.groups[g]) {
      int nd = (d == a) ? na : (d == b) ? nb : sched_.heads[d];
      scratch_begin_[d] = running;
      running += nd;
      scratch_end_[d] = running;
    }
  }

  auto entry_for = [&](int d, int t, int nd) -> double {
    int src = (g - t + K_) % K_;
    int64_t L_q = sched_.group_len[g];
    int64_t L_kv = sched_.group_len[src];
    double comp = attn_flops(B, L_q, L_kv, nd, dh) /
                  cluster_.devices[d].compute_flops;
    if (t == 0 || nd == 0) {
      return comp;
    }
    int64_t msg = ring_msg_B(B, L_kv, nd, dh, P);
    size_t uidx = (size_t)d * K_ + src;
    if (uniform_[uidx]) {
      return std::max(comp, link_time(uniform_lp_[uidx], msg));
    }
    int peer = find_peer(d, scratch_begin_[d], scratch_end_[d], src,
                         sched_.head_begin, sched_.head_end);
    return std::max(comp, link_time(cluster_.link(peer, d), msg));
  };

  double steps_sum = 0.0;
  if (!group_nonuniform_rx_[g] && !group_rx_shift_sensitive_[g]) {
    // Receive costs are peer-independent on both sides: only rows a, b move.
    for (int t = 0; t < K_; ++t) {
      double ea = entry_for(a, t, na);
      double eb = entry_for(b, t, nb);
      double stepmax =
          std::max({step_top_[t].best_excluding(a, b, false), ea, eb});
      steps_sum += stepmax;
    }
  } else {
    ++epoch_;
    auto stamp = [&](int t, int d, double val) {
      size_t idx = (size_t)t * n_ + d;
      scratch_val_[idx] = val;
      scratch_epoch_[idx] = epoch_;
    };
    for (int t = 0; t < K_; ++t) {
      stamp(t, a, entry_for(a, t, na));
      stamp(t, b, entry_for(b, t, nb));
    }
    // Remaining members of g whose ranges shifted and whose inbound links
    // are peer-dependent re-resolve their peers in the source group.
    for (int c : sched_.groups[g]) {
      if (c == a || c == b || sched_.heads[c] == 0) {
        continue;
      }
      for (int t = 1; t < K_; ++t) {
        int src = (g - t + K_) % K_;
        if (uniform_[(size_t)c * K_ + src]) {
          continue;
        }
        stamp(t, c, entry_for(c, t, sched_.heads[c]));
      }
    }
    // Devices in other groups re-resolve their peer inside g when their
    // links into g differ.
    for (int og = 0; og < K_; ++og) {
      if (og == g) {
        continue;
      }
      int t = (og - g + K_) % K_;
      for (int d : sched_.groups[og]) {
        size_t uidx = (size_t)d * K_ + g;
        if (uniform_[uidx] || sched_.heads[d] == 0) {
          continue;
        }
        int peer = find_peer(d, sched_.head_begin[d], sched_.head_end[d], g,
                             scratch_begin_, scratch_end_);
        int64_t msg = ring_msg_B(B, sched_.group_len[g], sched_.heads[d], dh, P);
        size_t idx = (size_t)t * n_ + d;
        stamp(t, d,
              std::max(comp_[idx], link_time(cluster_.link(peer, d), msg)));
      }
    }
    for (int t = 0; t < K_; ++t) {
      double stepmax = 0.0;
      for (int d = 0; d < n_; ++d) {
        size_t idx = (size_t)t * n_ + d;
        double val =
            (scratch_epoch_[idx] == epoch_) ? scratch_val_[idx] : cost_[idx];
        stepmax = std::max(stepmax, val);
      }
      steps_sum += stepmax;
    }
  }

  int64_t L = sched_.group_len[g];
  double act_a = act_mem_B(B, P, work_.gamma_act, sched_.pre_shard[a], H, L, na, dh);
  double act_b = act_mem_B(B, P, work_.gamma_act, sched_.pre_shard[b], H, L, nb, dh);
  double sl_a = (double)cluster_.devices[a].mem_cap_B -
                ((double)static_mem_[a] + act_a);
  double sl_b = (double)cluster_.devices[b].mem_cap_B -
                ((double)static_mem_[b] + act_b);
  double rest = std::min(slackmin_group_[g].best_excluding(a, b, true),
                         slackmin_groups_.best_excluding(g, -1, true));

  Probe p;
  p.block_s = nonattn_max_ + a2a_max + steps_sum;
  p.feasible = sl_a >= 0.0 && sl_b >= 0.0 && rest >= 0.0;
  return p;
}

void DescentEvaluator::commit_head_move(int a, int b, int heads) {
  sched_.heads[a] -= heads;
  sched_.heads[b] += heads;
  assign_head_ranges(sched_);
  rebuild();
}

} // namespace hexsched
