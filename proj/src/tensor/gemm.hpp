// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace lhdr::detail {

/// C[M x N] += A[M x K] * B[K x N], all row-major with leading dimensions.
template <typename T>
void gemm_acc(int M, int N, int K, const T* A, int lda, const T* B, int ldb,
              T* C, int ldc);

/// dst[cols x rows] = transpose(src[rows x cols]).
template <typename T>
void transpose(int rows, int cols, const T* src, int lds, T* dst, int ldd);

}  // namespace lhdr::detail
