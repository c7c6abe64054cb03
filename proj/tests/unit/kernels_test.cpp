// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#include "portcheck/kernels.hpp"

#include <gtest/gtest.h>

#include <random>

namespace portcheck::kernels {
namespace {

BitRows random_rows(std::mt19937& rng, unsigned n, double density) {
  std::bernoulli_distribution coin(density);
  BitRows m;
  for (unsigned i = 0; i < n; ++i) {
    for (unsigned j = 0; j < n; ++j) {
      if (coin(rng)) m.row[i] |= 1u << j;
    }
  }
  return m;
}

// Naive boolean matrix product, used as the reference for both tables.
BitRows naive_compose(const BitRows& a, const BitRows& b, unsigned n) {
  BitRows out;
  for (unsigned i = 0; i < n; ++i)
    for (unsigned k = 0; k < n; ++k)
      if ((a.row[i] >> k) & 1u)
        for (unsigned j = 0; j < n; ++j)
          if ((b.row[k] >> j) & 1u) out.row[i] |= 1u << j;
  return out;
}

BitRows naive_closure(BitRows a, unsigned n) {
  for (;;) {
    BitRows next = a;
    BitRows sq = naive_compose(a, a, n);
    for (unsigned i = 0; i < n; ++i) next.row[i] |= sq.row[i];
    if (next == a) return a;
    a = next;
  }
}

std::vector<const KernelTable*> tables() {
  std::vector<const KernelTable*> out{&scalar_kernels()};
  if (avx2_kernels() != nullptr && cpu_has_avx2()) out.push_back(avx2_kernels());
  return out;
}

TEST(Kernels, ScalarAlwaysAvailable) {
  EXPECT_EQ(scalar_kernels().name, "scalar");
  EXPECT_TRUE(select_kernels("scalar"));
  EXPECT_EQ(active_kernels().name, "scalar");
  EXPECT_FALSE(select_kernels("neon-but-not-here"));
}

TEST(Kernels, AllTablesMatchNaiveReference) {
  std::mt19937 rng(7);
  for (const KernelTable* t : tables()) {
    SCOPED_TRACE(std::string(t->name));
    for (unsigned n : {1u, 3u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 32u}) {
      for (double d : {0.05, 0.2, 0.5}) {
        for (int rep = 0; rep < 20; ++rep) {
          const BitRows a = random_rows(rng, n, d);
          const BitRows b = random_rows(rng, n, d);
          BitRows got;
          t->compose(a, b, got, n);
          EXPECT_EQ(got, naive_compose(a, b, n));
          BitRows c = a;
          t->closure(c, n);
          EXPECT_EQ(c, naive_closure(a, n));
          t->transpose(a, got, n);
          for (unsigned i = 0; i < n; ++i)
            for (unsigned j = 0; j < n; ++j)
              EXPECT_EQ((got.row[j] >> i) & 1u, (a.row[i] >> j) & 1u);
        }
      }
    }
  }
}

TEST(Kernels, Avx2MatchesScalarBitForBit) {
  if (avx2_kernels() == nullptr || !cpu_has_avx2()) {
    GTEST_SKIP() << "AVX2 table not available on this build or CPU";
  }
  const KernelTable& s = scalar_kernels();
  const KernelTable& v = *avx2_kernels();
  std::mt19937 rng(2026);
  for (int rep = 0; rep < 2000; ++rep) {
    const unsigned n = 1 + rng() % 32;
    const BitRows a = random_rows(rng, n, 0.3);
    const BitRows b = random_rows(rng, n, 0.3);
    BitRows x, y;
    s.compose(a, b, x, n);
    v.compose(a, b, y, n);
    ASSERT_EQ(x, y);
    x = a;
    y = a;
    s.closure(x, n);
    v.closure(y, n);
    ASSERT_EQ(x, y);
    s.transpose(a, x, n);
    v.transpose(a, y, n);
    ASSERT_EQ(x, y);
  }
}

TEST(Kernels, OutputMayAliasInput) {
  std::mt19937 rng(3);
  for (const KernelTable* t : tables()) {
    const BitRows a = random_rows(rng, 12, 0.3);
    BitRows expect;
    t->compose(a, a, expect, 12);
    BitRows inplace = a;
    t->compose(inplace, inplace, inplace, 12);
    EXPECT_EQ(inplace, expect);
  }
}

}  // namespace
}  // namespace portcheck::kernels
