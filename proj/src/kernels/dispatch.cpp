// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "portcheck/kernels.hpp"

namespace portcheck::kernels {

#ifndef PORTCHECK_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

const KernelTable* best_available() {
  if (const char* forced = std::getenv("PORTCHECK_KERNELS")) {
    if (std::string_view(forced) == "scalar") return &scalar_kernels();
  }
  if (avx2_kernels() != nullptr && cpu_has_avx2()) return avx2_kernels();
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> table{best_available()};
  return table;
}

}  // namespace

const KernelTable& active_kernels() {
  return *slot().load(std::memory_order_relaxed);
}

bool select_kernels(std::string_view name) {
  if (name == "scalar") {
    slot().store(&scalar_kernels());
    return true;
  }
  if (name == "avx2" && avx2_kernels() != nullptr && cpu_has_avx2()) {
    slot().store(avx2_kernels());
    return true;
  }
  return false;
}

}  // namespace portcheck::kernels
