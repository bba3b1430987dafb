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

#include "hexsched/cluster.hpp"
#include "hexsched/errors.hpp"
#include "test_helpers.hpp"

using namespace hexsched;
using namespace hexsched::testing;

TEST_CASE("link expansion: intra default beta") {
  // Two devices on one node with a 450 GB/s link cost 1/4.5e11 s per byte.
  ClusterSpec c;
  c.devices.push_back(mk_device("h0", 0, 989e12, 3.35e12, 80000000000));
  c.devices.push_back(mk_device("h1", 0, 989e12, 3.35e12, 80000000000));
  c.intra_node_link = LinkDefault{450e9, {}};
  c.expand_links();
  CHECK(c.link(0, 1).beta_s_per_B == doctest::Approx(1.0 / 4.5e11).epsilon(1e-12));
  CHECK(c.link(0, 1).alpha_s == kDefaultIntraAlphaS);
}

TEST_CASE("link expansion: singleton cluster has no links") {
  ClusterSpec c;
  c.devices.push_back(mk_device("solo", 0, 1e14, 1e12, 8e10));
  c.expand_links(); // no link defaults required when there are no pairs
  CHECK(c.num_devices() == 1);
}

TEST_CASE("link expansion: cross-node default") {
  // Two nodes, inter default 25 GB/s -> every cross pair gets beta 4e-11.
  ClusterSpec c = two_node_cluster({1e14, 1e14, 1e14, 1e14}, 3e11, 25e9);
  CHECK(c.link(0, 2).beta_s_per_B == doctest::Approx(4e-11).epsilon(1e-12));
  CHECK(c.link(1, 3).beta_s_per_B == doctest::Approx(4e-11).epsilon(1e-12));
  CHECK(c.link(0, 2).alpha_s == kDefaultInterAlphaS);
  // Intra pairs keep the intra default.
  CHECK(c.link(0, 1).beta_s_per_B == doctest::Approx(1.0 / 3e11).epsilon(1e-12));
}

TEST_CASE("link expansion: per-pair override wins") {
  ClusterSpec c;
  c.devices.push_back(mk_device("a0", 0, 1e14, 1e12, 8e10));
  c.devices.push_back(mk_device("a1", 1, 1e14, 1e12, 8e10));
  c.inter_node_link = LinkDefault{25e9, {}};
  c.link_overrides.push_back({"a0", "a1", 200e9, {}});
  c.expand_links();
  CHECK(c.link(0, 1).beta_s_per_B == doctest::Approx(5e-12).epsilon(1e-12));
  // Overrides are symmetric.
  CHECK(c.link(1, 0).beta_s_per_B == doctest::Approx(5e-12).epsilon(1e-12));
}

TEST_CASE("cluster validation failures") {
  SUBCASE("self link") {
    ClusterSpec c = flat_cluster({1e14, 1e14});
    c.link_overrides.push_back({"d0", "d0", 1e11, {}});
    CHECK_THROWS_AS(c.expand_links(), ValidationError);
  }
  SUBCASE("duplicate pair override") {
    ClusterSpec c = flat_cluster({1e14, 1e14});
    c.link_overrides.push_back({"d0", "d1", 1e11, {}});
    c.link_overrides.push_back({"d1", "d0", 2e11, {}});
    CHECK_THROWS_AS(c.expand_links(), ValidationError);
  }
  SUBCASE("unknown device in override") {
    ClusterSpec c = flat_cluster({1e14, 1e14});
    c.link_overrides.push_back({"d0", "nope", 1e11, {}});
    CHECK_THROWS_AS(c.expand_links(), ValidationError);
  }
  SUBCASE("non-positive compute") {
    ClusterSpec c;
    c.devices.push_back(mk_device("bad", 0, 0.0, 1e12, 8e10));
    CHECK_THROWS_AS(c.expand_links(), ValidationError);
  }
  SUBCASE("duplicate device id") {
    ClusterSpec c;
    c.devices.push_back(mk_device("x", 0, 1e14, 1e12, 8e10));
    c.devices.push_back(mk_device("x", 0, 1e14, 1e12, 8e10));
    c.intra_node_link = LinkDefault{3e11, {}};
    CHECK_THROWS_AS(c.expand_links(), ValidationError);
  }
  SUBCASE("missing link default for a pair") {
    ClusterSpec c;
    c.devices.push_back(mk_device("a", 0, 1e14, 1e12, 8e10));
    c.devices.push_back(mk_device("b", 1, 1e14, 1e12, 8e10));
    // No inter_node_link and no override: the cross pair is unspecified.
    CHECK_THROWS_AS(c.expand_links(), ValidationError);
  }
}

TEST_CASE("cluster JSON round-trip is byte-stable") {
  ClusterSpec c = two_node_cluster({613e12, 587e12, 317e12, 289e12}, 3e11, 25e9);
  c.devices[1].static_mem_B = 12000000000;
  c.link_overrides.push_back({"d0", "d1", 4.5e11, 1e-6});
  c.expand_links();
  std::string text = save_cluster(c);
  ClusterSpec back = load_cluster(text);
  CHECK(save_cluster(back) == text);
  CHECK(back.num_devices() == 4);
  CHECK(back.devices[1].static_mem_B.value() == 12000000000);
  CHECK(back.link(0, 1).alpha_s == doctest::Approx(1e-6));
}

TEST_CASE("load_cluster rejects malformed documents") {
  CHECK_THROWS_AS(load_cluster("not json"), ParseError);
  CHECK_THROWS_AS(load_cluster("{}"), ParseError); // missing 'devices'
  CHECK_THROWS_AS(load_cluster(R"({"devices": []})"), ValidationError);
}
