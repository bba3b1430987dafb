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
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hexsched {

// Latency defaults applied when a link spec omits alpha_s.
inline constexpr double kDefaultIntraAlphaS = 5e-6;
inline constexpr double kDefaultInterAlphaS = 2e-5;

struct DeviceProfile {
  std::string id;
  int node = 0;                          // host node index
  double compute_flops = 0.0;            // sustained FLOP/s
  double mem_bw_Bps = 0.0;               // HBM bandwidth, B/s
  int64_t mem_cap_B = 0;                  // device memory capacity, bytes
  std::optional<int64_t> static_mem_B;    // resident weights/optimizer bytes
};

// Point-to-point cost parameters: transfer of V bytes costs alpha + beta*V.
struct LinkProfile {
  double alpha_s = 0.0;
  double beta_s_per_B = 0.0;
};

struct LinkDefault {
  double bandwidth_Bps = 0.0;
  std::optional<double> alpha_s;
};

// Per-pair override; `a`/`b` are device ids, unordered.
struct LinkOverride {
  std::string a;
  std::string b;
  double bandwidth_Bps = 0.0;
  std::optional<double> alpha_s;
};

struct ClusterSpec {
  std::vector<DeviceProfile> devices;
  std::optional<LinkDefault> intra_node_link;
  std::optional<LinkDefault> inter_node_link;
  std::vector<LinkOverride> link_overrides;

  // Derived by expand_links(): full pairwise matrix and the id lookup.
  std::vector<LinkProfile> links; // row-major, num_devices^2; diagonal unused
  std::map<std::string, int> id_to_index;

  int num_devices() const { return (int)devices.size(); }

  const LinkProfile &link(int a, int b) const {
    return links[(size_t)a * devices.size() + (size_t)b];
  }

  int index_of(const std::string &id) const;

  // Validates the spec and materializes the pairwise link matrix: explicit
  // overrides win, otherwise the intra/inter default for the node relation.
  // Every pair must end up with exactly one profile.
  void expand_links();
};

// Parses a cluster document (JSON text). Throws ParseError / ValidationError.
ClusterSpec load_cluster(const std::string &json_text);

// Canonical serialization; load(save(c)) is byte-identical to save(c).
std::string save_cluster(const ClusterSpec &spec);

} // namespace hexsched
