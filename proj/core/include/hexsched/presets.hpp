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
#ifndef HEXSCHED_PRESETS_HPP_
#define HEXSCHED_PRESETS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hexsched/cluster.hpp"
#include "hexsched/schedule.hpp"

namespace hexsched {

// Nameplate numbers for the accelerator generations the built-in scenarios
// use. All of them can be overridden through the "device_table" object of a
// config file, since absolute throughput always depends on these constants.
struct DeviceTypeSpec {
  double compute_flops = 0.0;
  double mem_bw_Bps = 0.0;
  int64_t mem_cap_B = 0;
  double intra_bw_Bps = 0.0; // link bandwidth between devices of one node
};

using DeviceTable = std::map<std::string, DeviceTypeSpec>;

DeviceTable default_device_table();

// Merge the optional "device_table" object of a config document over the
// defaults. Entries may override a subset of a known type's fields or define
// entirely new types (new types must set every field).
DeviceTable device_table_from_config(const std::string &json_text);

// A named experiment scenario: a cluster, a workload shape, and the context
// lengths it is normally swept over. FLOP-equivalent scenarios additionally
// carry the homogeneous twin cluster.
struct Scenario {
  std::string label;
  ClusterSpec cluster;
  WorkloadSpec work;
  std::vector<int64_t> sweep;
  bool flop_equivalent = false;
  ClusterSpec homo_cluster; // only set when flop_equivalent
};

// case_study: the 8-GPU three-node mixed cluster (2 H100 + 2 A100 + 4 A800,
//             25 GB/s between nodes) with a 7B model.
// sim1/sim2/sim3: 32/64/128-GPU mixed-generation clusters on a 200 GB/s
//             fabric with 13B/13B/70B models.
// sim4/sim5: FLOP-comparable heterogeneous-vs-A100-only pairs with a 13B
//             model at 256K / 128K context.
std::vector<std::string> preset_names();
Scenario make_preset(const std::string &name, const DeviceTable &table);

// Standard decoder-only shapes: "7b", "13b", "70b". L_tot defaults to 65536
// and outer_shards to 1; scenarios override both.
WorkloadSpec make_workload(const std::string &size);

// Synthetic mixed cluster for runtime benchmarks: nodes of eight devices,
// generations cycling H100 / A100 / A800 / L40S node by node, 200 GB/s
// between nodes.
ClusterSpec synth_cluster(int num_devices, const DeviceTable &table);

} // namespace hexsched

#endif // HEXSCHED_PRESETS_HPP_
