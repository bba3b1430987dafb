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
#include "hexsched/apportion.hpp"

#include <algorithm>
#include <cmath>

#include "hexsched/errors.hpp"

namespace hexsched {

std::vector<int64_t> apportion(int64_t total, const std::vector<double> &weights) {
  const size_t n = weights.size();
  if (n == 0) {
    throw ValidationError("apportion: empty weight vector");
  }
  if (total < 0) {
    throw ValidationError("apportion: negative total");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w)) {
      throw ValidationError("apportion: weights must be finite and non-negative");
    }
    sum += w;
  }

  std::vector<int64_t> out(n, 0);
  std::vector<double> frac(n, 0.0);
  int64_t assigned = 0;
  for (size_t i = 0; i < n; ++i) {
    double share = (sum > 0.0) ? (double)total * (weights[i] / sum)
                               : (double)total / (double)n;
    double fl = std::floor(share);
    // Guard against float drift pushing a floor above the remaining budget.
    int64_t lo = std::min<int64_t>((int64_t)fl, total - assigned);
    out[i] = lo;
    frac[i] = share - (double)lo;
    assigned += lo;
  }

  // Hand out the leftover units by decreasing fractional part, lowest index
  // first on ties. stable_sort keeps the tie rule deterministic.
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) {
    order[i] = i;
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return frac[a] > frac[b]; });
  int64_t left = total - assigned;
  for (size_t k = 0; left > 0; k = (k + 1) % n) {
    out[order[k]] += 1;
    --left;
  }
  return out;
}

std::vector<int64_t> apportion_quantized(int64_t total,
                                         const std::vector<double> &weights,
                                         int64_t quantum) {
  if (quantum <= 0) {
    throw ValidationError("apportion: quantum must be positive");
  }
  if (total % quantum != 0) {
    throw ValidationError("apportion: total is not a multiple of the quantum");
  }
  std::vector<int64_t> units = apportion(total / quantum, weights);
  for (int64_t &u : units) {
    u *= quantum;
  }
  return units;
}

} // namespace hexsched
