// SPDX-License-Identifier: Apache-2.0
//
// Hot inner loops behind a function-pointer table. The scalar table is the
// reference; the AVX2+FMA table is selected at runtime when the CPU reports
// both features. Results agree with the reference to rounding (summation
// order differs), which tests/unit/test_kernels.cpp pins down.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "oafmtl/types.hpp"

namespace oafmtl::simd {

struct KernelTable {
  const char* name;
  /// sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  /// sum_i (x[i] - mean)^2
  double (*centered_sumsq)(const double* x, std::size_t n, double mean);
  /// y += a * x over complex arrays
  void (*caxpy)(cd a, const cd* x, cd* y, std::size_t n);
};

const KernelTable& scalar_kernels();
/// nullptr when the AVX2 translation unit was not built.
const KernelTable* avx2_kernels();
bool cpu_supports_avx2();

/// Active table. The first call resolves OAFMTL_KERNELS (auto | scalar |
/// avx2) from the environment, defaulting to auto.
const KernelTable& kernels();
/// Throws std::invalid_argument for an unknown name and std::runtime_error
/// when avx2 is requested on a CPU or build without it.
void select_kernels(const std::string& name);
std::vector<std::string> available_kernels();

namespace detail {
const KernelTable* avx2_table();
}  // namespace detail

}  // namespace oafmtl::simd
