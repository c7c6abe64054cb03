// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PORTCHECK_KERNELS_HPP_
#define PORTCHECK_KERNELS_HPP_

#include <array>
#include <cstdint>
#include <string_view>

namespace portcheck::kernels {

/// Largest universe a bit-matrix relation can describe.
inline constexpr unsigned kMaxDim = 32;

/// Square bit matrix: bit j of row i is set iff (i, j) is in the relation.
/// Rows and bit positions at or beyond the active dimension are always zero.
struct alignas(32) BitRows {
  std::array<std::uint32_t, kMaxDim> row{};

  bool operator==(const BitRows&) const = default;
};

/// One implementation of the relation-algebra inner loops.
///
/// Every entry must produce bit-identical results to the scalar table; the
/// equivalence is enforced by the kernel test suite.
struct KernelTable {
  std::string_view name;
  /// out = a ; b (sequential composition).
  void (*compose)(const BitRows& a, const BitRows& b, BitRows& out, unsigned n);
  /// In-place transitive closure (Warshall).
  void (*closure)(BitRows& a, unsigned n);
  /// out = a^-1.
  void (*transpose)(const BitRows& a, BitRows& out, unsigned n);
};

const KernelTable& scalar_kernels();

/// AVX2 variant, or nullptr when the build carries no AVX2 code.
const KernelTable* avx2_kernels();

/// True when the running CPU can execute the AVX2 table.
bool cpu_has_avx2();

/// Table used by the relation layer. Chosen once at first use: the best
/// table the CPU supports, unless PORTCHECK_KERNELS=scalar is set.
const KernelTable& active_kernels();

/// Forces a table by name ("scalar" or "avx2"). Returns false if the
/// requested table is unavailable on this build or CPU.
bool select_kernels(std::string_view name);

}  // namespace portcheck::kernels

#endif  // PORTCHECK_KERNELS_HPP_
