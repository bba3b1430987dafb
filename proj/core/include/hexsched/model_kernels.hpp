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

// Formula kernels shared by every cost evaluator. FLOP and byte counts are
// exact integer products (128-bit where they can exceed 63 bits) converted to
// double once at the end, so independent evaluation paths agree bitwise.

#include <cstdint>

#include "hexsched/cluster.hpp"

namespace hexsched {

using int128 = __int128;

// Forward+backward FLOPs of the non-attention stack (QKV/out projections,
// MLP, norms) for a shard of s tokens: 72 * B * s * H^2.
inline double nonattn_flops(int64_t B, int64_t s, int64_t H) {
  return (double)((int128)72 * B * s * H * H);
}

// HBM traffic of the same shard: 40 * B * s * H * dtype_bytes.
inline int64_t nonattn_bytes(int64_t B, int64_t s, int64_t H, int64_t P) {
  return 40 * B * s * H * P;
}

// Bytes device d sends to device j during head redistribution: Q, K and V
// slices of d's pre-shard restricted to j's heads.
inline int64_t a2a_volume_B(int64_t B, int64_t s_d, int64_t n_j, int64_t dh,
                            int64_t P) {
  return 3 * B * s_d * n_j * dh * P;
}

// Bytes received per circulation step: K and V for the source group's tokens
// restricted to our heads, forward and backward (factor 4 = 2 tensors x 2
// passes).
inline int64_t ring_msg_B(int64_t B, int64_t L_src, int64_t n_d, int64_t dh,
                          int64_t P) {
  return 4 * B * L_src * n_d * dh * P;
}

// Attention FLOPs for L_q query tokens against L_kv key/value tokens over
// n_d heads: 16 * B * L_q * L_kv * n_d * dh (forward + backward).
inline int128 attn_flops_int(int64_t B, int64_t L_q, int64_t L_kv, int64_t n_d,
                             int64_t dh) {
  return (int128)16 * B * L_q * L_kv * n_d * dh;
}

inline double attn_flops(int64_t B, int64_t L_q, int64_t L_kv, int64_t n_d,
                         int64_t dh) {
  return (double)attn_flops_int(B, L_q, L_kv, n_d, dh);
}

// alpha-beta transfer time.
inline double link_time(const LinkProfile &lp, int64_t bytes) {
  return lp.alpha_s + lp.beta_s_per_B * (double)bytes;
}

// Peak activation bytes: gamma_act * s * H for the non-attention stack plus
// K/V for the whole group sequence over local heads.
inline double act_mem_B(int64_t B, int64_t P, double gamma, int64_t s, int64_t H,
                        int64_t L_grp, int64_t n_d, int64_t dh) {
  double nonattn = gamma * (double)(s * H);
  double attn = 2.0 * (double)(L_grp * n_d * dh);
  return (double)(B * P) * (nonattn + attn);
}

} // namespace hexsched
