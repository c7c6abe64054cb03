// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#include "portcheck/kernels.hpp"

#include <bit>

namespace portcheck::kernels {
namespace {

void compose_scalar(const BitRows& a, const BitRows& b, BitRows& out,
                    unsigned n) {
  BitRows result;
  for (unsigned i = 0; i < n; ++i) {
    std::uint32_t acc = 0;
    for (std::uint32_t bits = a.row[i]; bits != 0; bits &= bits - 1) {
      acc |= b.row[std::countr_zero(bits)];
    }
    result.row[i] = acc;
  }
  out = result;
}

void closure_scalar(BitRows& a, unsigned n) {
  for (unsigned k = 0; k < n; ++k) {
    const std::uint32_t via = a.row[k];
    const std::uint32_t kbit = 1u << k;
    for (unsigned i = 0; i < n; ++i) {
      if (a.row[i] & kbit) a.row[i] |= via;
    }
  }
}

void transpose_scalar(const BitRows& a, BitRows& out, unsigned n) {
  BitRows result;
  for (unsigned i = 0; i < n; ++i) {
    for (std::uint32_t bits = a.row[i]; bits != 0; bits &= bits - 1) {
      result.row[std::countr_zero(bits)] |= 1u << i;
    }
  }
  out = result;
}

constexpr KernelTable kScalar{"scalar", compose_scalar, closure_scalar,
                              transpose_scalar};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace portcheck::kernels
