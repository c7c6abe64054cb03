// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

// Compiled with -mavx2. Nothing here may run before cpu_has_avx2() is checked.

#include "portcheck/kernels.hpp"

#include <immintrin.h>

namespace portcheck::kernels {
namespace {

// Each __m256i holds eight consecutive rows. A lane mask for "bit k of the
// row is set" is obtained by shifting bit k into the sign position and
// arithmetic-shifting it back across the lane.
inline __m256i lane_bit_mask(__m256i rows, unsigned k) {
  const __m128i up = _mm_cvtsi32_si128(static_cast<int>(31 - k));
  return _mm256_srai_epi32(_mm256_sll_epi32(rows, up), 31);
}

inline unsigned groups(unsigned n) { return (n + 7) / 8; }

void compose_avx2(const BitRows& a, const BitRows& b, BitRows& out,
                  unsigned n) {
  BitRows result;
  const unsigned g = groups(n);
  for (unsigned grp = 0; grp < g; ++grp) {
    const __m256i va = _mm256_load_si256(
        reinterpret_cast<const __m256i*>(a.row.data() + 8 * grp));
    __m256i acc = _mm256_setzero_si256();
    for (unsigned j = 0; j < n; ++j) {
      const __m256i bj = _mm256_set1_epi32(static_cast<int>(b.row[j]));
      acc = _mm256_or_si256(acc, _mm256_and_si256(lane_bit_mask(va, j), bj));
    }
    _mm256_store_si256(reinterpret_cast<__m256i*>(result.row.data() + 8 * grp),
                       acc);
  }
  out = result;
}

void closure_avx2(BitRows& a, unsigned n) {
  const unsigned g = groups(n);
  for (unsigned k = 0; k < n; ++k) {
    const __m256i via = _mm256_set1_epi32(static_cast<int>(a.row[k]));
    for (unsigned grp = 0; grp < g; ++grp) {
      auto* p = reinterpret_cast<__m256i*>(a.row.data() + 8 * grp);
      const __m256i va = _mm256_load_si256(p);
      _mm256_store_si256(
          p, _mm256_or_si256(va, _mm256_and_si256(lane_bit_mask(va, k), via)));
    }
  }
}

void transpose_avx2(const BitRows& a, BitRows& out, unsigned n) {
  BitRows result;
  const unsigned g = groups(n);
  for (unsigned grp = 0; grp < g; ++grp) {
    const __m256i va = _mm256_load_si256(
        reinterpret_cast<const __m256i*>(a.row.data() + 8 * grp));
    for (unsigned j = 0; j < n; ++j) {
      const __m128i up = _mm_cvtsi32_si128(static_cast<int>(31 - j));
      const int sign_bits = _mm256_movemask_ps(
          _mm256_castsi256_ps(_mm256_sll_epi32(va, up)));
      result.row[j] |= static_cast<std::uint32_t>(sign_bits) << (8 * grp);
    }
  }
  out = result;
}

constexpr KernelTable kAvx2{"avx2", compose_avx2, closure_avx2,
                            transpose_avx2};

}  // namespace

const KernelTable* avx2_kernels() { return &kAvx2; }

}  // namespace portcheck::kernels
