// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "gemm.hpp"

#include <algorithm>
#include <vector>

namespace lhdr::detail {
namespace {

#if defined(__AVX512F__)
constexpr int kVecBytes = 64;
#else
constexpr int kVecBytes = 32;
#endif
constexpr int kRows = 4;
constexpr int kVecs = 2;

// Register-blocked tile: kRows x kVecs vector accumulators stay in registers
// while k sweeps the shared dimension. `B` is a packed K x Cols panel.
template <typename T>
inline void tile_full(int K, const T* A, int lda, const T* B, T* C, int ldc) {
  constexpr int kLanes = kVecBytes / static_cast<int>(sizeof(T));
  typedef T Vec __attribute__((vector_size(kVecBytes)));
  Vec acc[kRows][kVecs] = {};
  const Vec* bp = reinterpret_cast<const Vec*>(B);
  for (int k = 0; k < K; ++k) {
    Vec bv[kVecs];
    for (int v = 0; v < kVecs; ++v) bv[v] = bp[k * kVecs + v];
    for (int r = 0; r < kRows; ++r) {
      const T a = A[static_cast<long>(r) * lda + k];
      for (int v = 0; v < kVecs; ++v) acc[r][v] += a * bv[v];
    }
  }
  for (int r = 0; r < kRows; ++r) {
    T* c_row = C + static_cast<long>(r) * ldc;
    for (int v = 0; v < kVecs; ++v) {
      Vec cv;
      __builtin_memcpy(&cv, c_row + v * kLanes, sizeof(Vec));
      cv += acc[r][v];
      __builtin_memcpy(c_row + v * kLanes, &cv, sizeof(Vec));
    }
  }
}

template <typename T>
inline void tile_edge(int rows, int cols, int K, const T* A, int lda,
                      const T* B, int ldb, T* C, int ldc) {
  for (int r = 0; r < rows; ++r) {
    const T* a = A + static_cast<long>(r) * lda;
    T* c_row = C + static_cast<long>(r) * ldc;
    for (int k = 0; k < K; ++k) {
      const T av = a[k];
      const T* b = B + static_cast<long>(k) * ldb;
      for (int c = 0; c < cols; ++c) c_row[c] += av * b[c];
    }
  }
}

}  // namespace

template <typename T>
void gemm_acc(int M, int N, int K, const T* A, int lda, const T* B, int ldb,
              T* C, int ldc) {
  constexpr int kLanes = kVecBytes / static_cast<int>(sizeof(T));
  constexpr int cols = kLanes * kVecs;
  const int full_rows = M - M % kRows;
  const int full_cols = N - N % cols;
  if (full_rows > 0 && full_cols > 0) {
    struct alignas(64) Block {
      T v[kLanes];
    };
    std::vector<Block> packed(static_cast<std::size_t>(K) * kVecs);
    T* panel = packed.front().v;
    for (int j = 0; j < full_cols; j += cols) {
      for (int k = 0; k < K; ++k) {
        std::copy_n(B + static_cast<long>(k) * ldb + j, cols,
                    panel + static_cast<long>(k) * cols);
      }
      for (int i = 0; i < full_rows; i += kRows) {
        tile_full<T>(K, A + static_cast<long>(i) * lda, lda, panel,
                     C + static_cast<long>(i) * ldc + j, ldc);
      }
    }
  }
  if (full_rows < M) {
    tile_edge(M - full_rows, N, K, A + static_cast<long>(full_rows) * lda, lda,
              B, ldb, C + static_cast<long>(full_rows) * ldc, ldc);
  }
  if (full_cols < N && full_rows > 0) {
    tile_edge(full_rows, N - full_cols, K, A, lda, B + full_cols, ldb,
              C + full_cols, ldc);
  }
}

template <typename T>
void transpose(int rows, int cols, const T* src, int lds, T* dst, int ldd) {
  constexpr int kBlock = 32;
  for (int r0 = 0; r0 < rows; r0 += kBlock) {
    const int r1 = std::min(rows, r0 + kBlock);
    for (int c0 = 0; c0 < cols; c0 += kBlock) {
      const int c1 = std::min(cols, c0 + kBlock);
      for (int r = r0; r < r1; ++r) {
        for (int c = c0; c < c1; ++c) {
          dst[static_cast<long>(c) * ldd + r] = src[static_cast<long>(r) * lds + c];
        }
      }
    }
  }
}

template void gemm_acc(int, int, int, const float*, int, const float*, int,
                       float*, int);
template void gemm_acc(int, int, int, const double*, int, const double*, int,
                       double*, int);
template void transpose(int, int, const float*, int, float*, int);
template void transpose(int, int, const double*, int, double*, int);

}  // namespace lhdr::detail
