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
#include <vector>

namespace hexsched {

// Largest-remainder split of `total` indivisible units proportionally to
// `weights`: floor the exact shares, then hand out the remaining units one by
// one in order of decreasing fractional part, ties going to the lowest index.
// A non-positive weight sum degrades to an equal split. The result always
// sums to `total` exactly, which is what the conservation invariants rely on.
std::vector<int64_t> apportion(int64_t total, const std::vector<double> &weights);

// Same split expressed in multiples of `quantum` tokens. `total` must be a
// multiple of `quantum`.
std::vector<int64_t> apportion_quantized(int64_t total,
                                         const std::vector<double> &weights,
                                         int64_t quantum);

} // namespace hexsched
