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
#include "hexsched/presets.hpp"

#include <algorithm>
#include <cctype>

#include "hexsched/errors.hpp"
#include "json_util.hpp"

namespace hexsched {

DeviceTable default_device_table() {
  // Dense nameplate FLOP/s, HBM bandwidth, memory capacity, and the per-node
  // interconnect each generation ships with.
  return {
      {"A100", {312e12, 2.0e12, 80000000000LL, 300e9}},
      {"A800", {312e12, 2.0e12, 80000000000LL, 200e9}},
      {"H100", {989e12, 3.35e12, 80000000000LL, 450e9}},
      {"L40S", {181e12, 864e9, 48000000000LL, 32e9}},
  };
}

DeviceTable device_table_from_config(const std::string &json_text) {
  DeviceTable table = default_device_table();
  const std::string what = "config.device_table";
  json j = parse_json(json_text, "config");
  if (!j.is_object() || !j.contains("device_table")) {
    return table;
  }
  const json &dt = j.at("device_table");
  if (!dt.is_object()) {
    throw ParseError(what + " must be an object");
  }
  for (auto it = dt.begin(); it != dt.end(); ++it) {
    const json &e = it.value();
    if (!e.is_object()) {
      throw ParseError(what + "." + it.key() + " must be an object");
    }
    for (auto f = e.begin(); f != e.end(); ++f) {
      if (f.key() != "compute_flops" && f.key() != "mem_bw_Bps" &&
          f.key() != "mem_cap_B" && f.key() != "intra_bw_Bps") {
        throw ParseError(what + "." + it.key() + ": unknown field '" + f.key() +
                         "'");
      }
    }
    bool is_new = !table.count(it.key());
    DeviceTypeSpec &t = table[it.key()];
    if (is_new && (!e.contains("compute_flops") || !e.contains("mem_bw_Bps") ||
                   !e.contains("mem_cap_B") || !e.contains("intra_bw_Bps"))) {
      throw ParseError(what + "." + it.key() +
                       ": new device types must set all four fields");
    }
    if (auto v = opt_double(e, "compute_flops", what)) {
      t.compute_flops = *v;
    }
    if (auto v = opt_double(e, "mem_bw_Bps", what)) {
      t.mem_bw_Bps = *v;
    }
    if (auto v = opt_int(e, "mem_cap_B", what)) {
      t.mem_cap_B = *v;
    }
    if (auto v = opt_double(e, "intra_bw_Bps", what)) {
      t.intra_bw_Bps = *v;
    }
    if (t.compute_flops <= 0.0 || t.mem_bw_Bps <= 0.0 || t.mem_cap_B <= 0 ||
        t.intra_bw_Bps <= 0.0) {
      throw ValidationError(what + "." + it.key() + ": fields must be positive");
    }
  }
  return table;
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return (char)std::tolower(c); });
  return s;
}

const DeviceTypeSpec &type_of(const DeviceTable &table, const std::string &name) {
  auto it = table.find(name);
  if (it == table.end()) {
    throw ValidationError("preset: device type '" + name +
                          "' missing from the device table");
  }
  return it->second;
}

// Lay out `count` devices of each type into nodes of `node_size`, each type
// starting on a fresh node, then wire intra-node links at the type's own
// bandwidth while everything else uses the inter-node default.
ClusterSpec build_cluster(const std::vector<std::pair<std::string, int>> &mix,
                          const DeviceTable &table, double inter_bw_Bps,
                          int node_size = 8) {
  ClusterSpec c;
  c.inter_node_link = LinkDefault{inter_bw_Bps, std::nullopt};

  std::map<std::string, int> counter;
  std::vector<double> node_bw; // intra bandwidth per node
  int next_node = 0;
  for (const auto &[type, count] : mix) {
    const DeviceTypeSpec &t = type_of(table, type);
    for (int i = 0; i < count; ++i) {
      DeviceProfile d;
      d.id = lower(type) + "-" + std::to_string(counter[type]++);
      d.node = next_node + i / node_size;
      d.compute_flops = t.compute_flops;
      d.mem_bw_Bps = t.mem_bw_Bps;
      d.mem_cap_B = t.mem_cap_B;
      c.devices.push_back(std::move(d));
      if ((int)node_bw.size() <= c.devices.back().node) {
        node_bw.push_back(t.intra_bw_Bps);
      }
    }
    next_node += (count + node_size - 1) / node_size;
  }

  for (size_t a = 0; a < c.devices.size(); ++a) {
    for (size_t b = a + 1; b < c.devices.size(); ++b) {
      if (c.devices[a].node == c.devices[b].node) {
        c.link_overrides.push_back(
            {c.devices[a].id, c.devices[b].id, node_bw[c.devices[a].node],
             std::nullopt});
      }
    }
  }
  c.expand_links();
  return c;
}

const std::vector<int64_t> kSimSweep = {16384, 32768, 65536, 131072, 262144};

} // namespace

WorkloadSpec make_workload(const std::string &size) {
  WorkloadSpec w;
  w.L_tot = 65536;
  w.dtype_bytes = 2;
  w.micro_batch = 1;
  w.global_batch = 8;
  w.gamma_act = 2.0;
  if (size == "7b") {
    w.hidden_dim = 4096;
    w.num_heads = 32;
    w.head_dim = 128;
    w.num_layers = 32;
    w.param_count = 7000000000LL;
  } else if (size == "13b") {
    w.hidden_dim = 5120;
    w.num_heads = 40;
    w.head_dim = 128;
    w.num_layers = 40;
    w.param_count = 13000000000LL;
  } else if (size == "70b") {
    w.hidden_dim = 8192;
    w.num_heads = 64;
    w.head_dim = 128;
    w.num_layers = 80;
    w.param_count = 70000000000LL;
  } else {
    throw ValidationError("preset: unknown workload size '" + size +
                          "' (expected 7b, 13b or 70b)");
  }
  return w;
}

std::vector<std::string> preset_names() {
  return {"case_study", "sim1", "sim2", "sim3", "sim4", "sim5"};
}

Scenario make_preset(const std::string &name, const DeviceTable &table) {
  Scenario s;
  s.label = name;
  if (name == "case_study") {
    s.cluster = build_cluster({{"H100", 2}, {"A100", 2}, {"A800", 4}}, table, 25e9);
    s.work = make_workload("7b");
    s.sweep = kSimSweep;
  } else if (name == "sim1") {
    s.cluster =
        build_cluster({{"H100", 8}, {"A100", 8}, {"A800", 16}}, table, 200e9);
    s.work = make_workload("13b");
    s.sweep = kSimSweep;
  } else if (name == "sim2") {
    s.cluster = build_cluster(
        {{"H100", 16}, {"A100", 16}, {"A800", 16}, {"L40S", 16}}, table, 200e9);
    s.work = make_workload("13b");
    s.sweep = kSimSweep;
  } else if (name == "sim3") {
    s.cluster = build_cluster(
        {{"H100", 16}, {"A100", 16}, {"A800", 48}, {"L40S", 48}}, table, 200e9);
    s.work = make_workload("70b");
    s.sweep = kSimSweep;
  } else if (name == "sim4") {
    s.flop_equivalent = true;
    s.cluster = build_cluster({{"H100", 48}, {"A100", 8}}, table, 200e9);
    s.homo_cluster = build_cluster({{"A100", 152}}, table, 200e9);
    s.work = make_workload("13b");
    s.work.L_tot = 262144;
    s.sweep = {262144};
  } else if (name == "sim5") {
    s.flop_equivalent = true;
    s.cluster =
        build_cluster({{"H100", 52}, {"A100", 4}, {"A800", 8}}, table, 200e9);
    s.homo_cluster = build_cluster({{"A100", 168}}, table, 200e9);
    s.work = make_workload("13b");
    s.work.L_tot = 131072;
    s.sweep = {131072};
  } else {
    throw ValidationError("preset: unknown scenario '" + name + "'");
  }
  s.work.outer_shards = s.cluster.num_devices();
  return s;
}

ClusterSpec synth_cluster(int num_devices, const DeviceTable &table) {
  if (num_devices < 1) {
    throw ValidationError("synth_cluster: device count must be >= 1");
  }
  static const char *kCycle[4] = {"H100", "A100", "A800", "L40S"};
  std::vector<std::pair<std::string, int>> mix;
  int left = num_devices;
  for (int node = 0; left > 0; ++node) {
    int take = std::min(8, left);
    mix.emplace_back(kCycle[node % 4], take);
    left -= take;
  }
  return build_cluster(mix, table, 200e9);
}

} // namespace hexsched
