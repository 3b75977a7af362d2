// SPDX-License-Identifier: Apache-2.0

#include "oafmtl/simd/kernels.hpp"

namespace oafmtl::simd {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double centered_sumsq_scalar(const double* x, std::size_t n, double mean) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = x[i] - mean;
    s += d * d;
  }
  return s;
}

// Written out by components: std::complex multiplication carries the
// Annex G inf/nan recovery path, which we neither need nor want here.
void caxpy_scalar(cd a, const cd* x, cd* y, std::size_t n) {
  const double ar = a.real();
  const double ai = a.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real();
    const double xi = x[i].imag();
    y[i] = cd(y[i].real() + (ar * xr - ai * xi), y[i].imag() + (ar * xi + ai * xr));
  }
}

const KernelTable kScalar{"scalar", dot_scalar, axpy_scalar, sum_scalar,
                          centered_sumsq_scalar, caxpy_scalar};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace oafmtl::simd
