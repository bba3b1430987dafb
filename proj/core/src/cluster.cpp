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
#include "hexsched/cluster.hpp"

#include <algorithm>
#include <set>

#include "hexsched/log.hpp"
#include "json_util.hpp"

namespace hexsched {

int ClusterSpec::index_of(const std::string &id) const {
  auto it = id_to_index.find(id);
  if (it == id_to_index.end()) {
    throw ValidationError("cluster: unknown device id '" + id + "'");
  }
  return it->second;
}

void ClusterSpec::expand_links() {
  const std::string what = "cluster";
  const int n = num_devices();
  if (n == 0) {
    throw ValidationError(what + ": device list is empty");
  }

  id_to_index.clear();
  for (int i = 0; i < n; ++i) {
    const DeviceProfile &d = devices[i];
    if (d.id.empty()) {
      throw ValidationError(what + ": device id must be non-empty");
    }
    if (!id_to_index.emplace(d.id, i).second) {
      throw ValidationError(what + ": duplicate device id '" + d.id + "'");
    }
    if (d.node < 0) {
      throw ValidationError(what + ": device '" + d.id + "' has negative node");
    }
    if (d.compute_flops <= 0.0 || d.mem_bw_Bps <= 0.0 || d.mem_cap_B <= 0) {
      throw ValidationError(what + ": device '" + d.id +
                            "' capabilities must be positive");
    }
    // static_mem_B may exceed mem_cap_B; that is a feasibility problem for
    // the scheduler to report, not a malformed document.
    if (d.static_mem_B && *d.static_mem_B < 0) {
      throw ValidationError(what + ": device '" + d.id +
                            "' static_mem_B must be non-negative");
    }
  }

  auto check_default = [&](const std::optional<LinkDefault> &ld, const char *name) {
    if (ld && ld->bandwidth_Bps <= 0.0) {
      throw ValidationError(what + ": " + name + " bandwidth must be positive");
    }
    if (ld && ld->alpha_s && *ld->alpha_s < 0.0) {
      throw ValidationError(what + ": " + name + " alpha_s must be non-negative");
    }
  };
  check_default(intra_node_link, "intra_node_link");
  check_default(inter_node_link, "inter_node_link");
  if (intra_node_link && inter_node_link &&
      intra_node_link->bandwidth_Bps < inter_node_link->bandwidth_Bps) {
    log_warn("cluster: intra-node bandwidth below inter-node bandwidth");
  }

  links.assign((size_t)n * n, LinkProfile{});
  std::vector<char> overridden((size_t)n * n, 0);

  std::set<std::pair<int, int>> seen_pairs;
  for (const LinkOverride &ov : link_overrides) {
    int a = index_of(ov.a);
    int b = index_of(ov.b);
    if (a == b) {
      throw ValidationError(what + ": link override connects '" + ov.a +
                            "' to itself");
    }
    if (ov.bandwidth_Bps <= 0.0) {
      throw ValidationError(what + ": link override bandwidth must be positive");
    }
    std::pair<int, int> key{std::min(a, b), std::max(a, b)};
    if (!seen_pairs.insert(key).second) {
      throw ValidationError(what + ": duplicate link override for pair '" +
                            ov.a + "','" + ov.b + "'");
    }
    bool same_node = devices[a].node == devices[b].node;
    LinkProfile p;
    p.beta_s_per_B = 1.0 / ov.bandwidth_Bps;
    if (ov.alpha_s) {
      p.alpha_s = *ov.alpha_s;
    } else {
      const std::optional<LinkDefault> &def =
          same_node ? intra_node_link : inter_node_link;
      p.alpha_s = (def && def->alpha_s)
                      ? *def->alpha_s
                      : (same_node ? kDefaultIntraAlphaS : kDefaultInterAlphaS);
    }
    links[(size_t)a * n + b] = p;
    links[(size_t)b * n + a] = p;
    overridden[(size_t)a * n + b] = 1;
    overridden[(size_t)b * n + a] = 1;
  }

  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (overridden[(size_t)a * n + b]) {
        continue;
      }
      bool same_node = devices[a].node == devices[b].node;
      const std::optional<LinkDefault> &def =
          same_node ? intra_node_link : inter_node_link;
      if (!def) {
        throw ValidationError(
            what + ": no link between '" + devices[a].id + "' and '" +
            devices[b].id + "' (missing " +
            (same_node ? "intra_node_link" : "inter_node_link") +
            " default and no override)");
      }
      LinkProfile p;
      p.beta_s_per_B = 1.0 / def->bandwidth_Bps;
      p.alpha_s = def->alpha_s ? *def->alpha_s
                               : (same_node ? kDefaultIntraAlphaS
                                            : kDefaultInterAlphaS);
      links[(size_t)a * n + b] = p;
      links[(size_t)b * n + a] = p;
    }
  }
}

namespace {

LinkDefault parse_link_default(const json &j, const std::string &what) {
  if (!j.is_object()) {
    throw ParseError(what + " must be an object");
  }
  LinkDefault ld;
  ld.bandwidth_Bps = get_double(j, "bandwidth_Bps", what);
  ld.alpha_s = opt_double(j, "alpha_s", what);
  return ld;
}

} // namespace

ClusterSpec load_cluster(const std::string &json_text) {
  const std::string what = "cluster";
  json j = parse_json(json_text, what);
  if (!j.is_object()) {
    throw ParseError(what + ": top level must be an object");
  }

  ClusterSpec spec;
  const json &devs = require_field(j, "devices", what);
  if (!devs.is_array()) {
    throw ParseError(what + ": 'devices' must be an array");
  }
  for (const json &dj : devs) {
    if (!dj.is_object()) {
      throw ParseError(what + ": device entries must be objects");
    }
    DeviceProfile d;
    d.id = get_string(dj, "id", what);
    d.node = (int)get_int(dj, "node", what);
    d.compute_flops = get_double(dj, "compute_flops", what);
    d.mem_bw_Bps = get_double(dj, "mem_bw_Bps", what);
    d.mem_cap_B = get_int(dj, "mem_cap_B", what);
    d.static_mem_B = opt_int(dj, "static_mem_B", what);
    spec.devices.push_back(std::move(d));
  }

  if (j.contains("intra_node_link") && !j.at("intra_node_link").is_null()) {
    spec.intra_node_link =
        parse_link_default(j.at("intra_node_link"), what + ".intra_node_link");
  }
  if (j.contains("inter_node_link") && !j.at("inter_node_link").is_null()) {
    spec.inter_node_link =
        parse_link_default(j.at("inter_node_link"), what + ".inter_node_link");
  }
  if (j.contains("links") && !j.at("links").is_null()) {
    const json &ls = j.at("links");
    if (!ls.is_array()) {
      throw ParseError(what + ": 'links' must be an array");
    }
    for (const json &lj : ls) {
      LinkOverride ov;
      ov.a = get_string(lj, "a", what + ".links");
      ov.b = get_string(lj, "b", what + ".links");
      ov.bandwidth_Bps = get_double(lj, "bandwidth_Bps", what + ".links");
      ov.alpha_s = opt_double(lj, "alpha_s", what + ".links");
      spec.link_overrides.push_back(std::move(ov));
    }
  }

  spec.expand_links();
  return spec;
}

std::string save_cluster(const ClusterSpec &spec) {
  json j;
  json devs = json::array();
  for (const DeviceProfile &d : spec.devices) {
    json dj;
    dj["id"] = d.id;
    dj["node"] = d.node;
    dj["compute_flops"] = d.compute_flops;
    dj["mem_bw_Bps"] = d.mem_bw_Bps;
    dj["mem_cap_B"] = d.mem_cap_B;
    if (d.static_mem_B) {
      dj["static_mem_B"] = *d.static_mem_B;
    }
    devs.push_back(std::move(dj));
  }
  j["devices"] = std::move(devs);

  auto dump_default = [](const LinkDefault &ld) {
    json out;
    out["bandwidth_Bps"] = ld.bandwidth_Bps;
    if (ld.alpha_s) {
      out["alpha_s"] = *ld.alpha_s;
    }
    return out;
  };
  if (spec.intra_node_link) {
    j["intra_node_link"] = dump_default(*spec.intra_node_link);
  }
  if (spec.inter_node_link) {
    j["inter_node_link"] = dump_default(*spec.inter_node_link);
  }

  if (!spec.link_overrides.empty()) {
    // Canonical form: endpoints ordered within a pair, pairs sorted.
    std::vector<LinkOverride> ovs = spec.link_overrides;
    for (LinkOverride &ov : ovs) {
      if (ov.b < ov.a) {
        std::swap(ov.a, ov.b);
      }
    }
    std::sort(ovs.begin(), ovs.end(), [](const LinkOverride &x, const LinkOverride &y) {
      return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    json ls = json::array();
    for (const LinkOverride &ov : ovs) {
      json lj;
      lj["a"] = ov.a;
      lj["b"] = ov.b;
      lj["bandwidth_Bps"] = ov.bandwidth_Bps;
      if (ov.alpha_s) {
        lj["alpha_s"] = *ov.alpha_s;
      }
      ls.push_back(std::move(lj));
    }
    j["links"] = std::move(ls);
  }

  return j.dump(2) + "\n";
}

} // namespace hexsched
