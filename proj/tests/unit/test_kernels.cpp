// SPDX-License-Identifier: Apache-2.0
//
// Every kernel table against long-double loops, and the vector tables
// against the scalar reference, over lengths that cover empty input, the
// vector width, its remainders and long runs.

#include <doctest.h>

#include <cmath>
#include <vector>

#include "oafmtl/rng.hpp"
#include "oafmtl/simd/kernels.hpp"
#include "oracles.hpp"

using namespace oafmtl;
using simd::KernelTable;

namespace {

std::vector<const KernelTable*> tables() {
  std::vector<const KernelTable*> t{&simd::scalar_kernels()};
  if (const KernelTable* a = simd::avx2_kernels()) t.push_back(a);
  return t;
}

std::vector<double> random_vec(std::size_t n, RngStream& r, double offset = 0.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = offset + r.normal();
  return v;
}

const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 250, 1001};

}  // namespace

TEST_CASE("dot, sum and centered_sumsq match long-double loops") {
  RngStream r = substream(11, "kernels");
  for (const KernelTable* t : tables()) {
    for (std::size_t n : kLengths) {
      CAPTURE(t->name);
      CAPTURE(n);
      const auto x = random_vec(n, r, 3.0), y = random_vec(n, r);
      long double scale = 0.0L;
      for (std::size_t i = 0; i < n; ++i) scale += std::abs(x[i] * y[i]);
      CHECK(std::abs(t->dot(x.data(), y.data(), n) - static_cast<double>(oracle::dot(x.data(), y.data(), n))) <=
            1e-14 * static_cast<double>(scale) + 1e-300);
      long double abs_sum = 0.0L;
      for (double v : x) abs_sum += std::abs(v);
      CHECK(std::abs(t->sum(x.data(), n) - static_cast<double>(oracle::sum(x.data(), n))) <=
            1e-14 * static_cast<double>(abs_sum) + 1e-300);
      if (n > 0) {
        long double m, v;
        oracle::mean_var(x.data(), n, m, v);
        const double got = t->centered_sumsq(x.data(), n, static_cast<double>(m));
        CHECK(got == doctest::Approx(static_cast<double>(v * n)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("axpy and caxpy match the scalar reference") {
  RngStream r = substream(12, "kernels");
  const KernelTable& ref = simd::scalar_kernels();
  for (const KernelTable* t : tables()) {
    for (std::size_t n : kLengths) {
      CAPTURE(t->name);
      CAPTURE(n);
      const auto x = random_vec(n, r);
      const auto y0 = random_vec(n, r);
      auto y1 = y0, y2 = y0;
      ref.axpy(0.37, x.data(), y1.data(), n);
      t->axpy(0.37, x.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(y2[i] - y1[i]) <= 4e-16 * (std::abs(0.37 * x[i]) + std::abs(y0[i])));
      }

      std::vector<cd> cx(n), cy1(n);
      for (std::size_t i = 0; i < n; ++i) {
        cx[i] = r.cnormal();
        cy1[i] = r.cnormal();
      }
      auto cy2 = cy1;
      const cd a(0.3, -1.7);
      ref.caxpy(a, cx.data(), cy1.data(), n);
      t->caxpy(a, cx.data(), cy2.data(), n);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(cy2[i] - cy1[i]) <= 1e-14 * (std::abs(a) * std::abs(cx[i]) + std::abs(cy1[i])));
      }
    }
  }
}

TEST_CASE("caxpy reference is y + a x") {
  const cd a(2.0, 1.0);
  cd x[2] = {{1.0, 0.0}, {0.0, 1.0}};
  cd y[2] = {{0.0, 0.0}, {1.0, 1.0}};
  for (const KernelTable* t : tables()) {
    cd z[2] = {y[0], y[1]};
    t->caxpy(a, x, z, 2);
    CHECK(z[0] == cd(2.0, 1.0));
    CHECK(z[1] == cd(0.0, 3.0));
  }
}

TEST_CASE("dispatcher resolves names") {
  CHECK_THROWS_AS(simd::select_kernels("sse9"), std::invalid_argument);
  simd::select_kernels("scalar");
  CHECK(std::string(simd::kernels().name) == "scalar");
  const auto names = simd::available_kernels();
  CHECK(names.front() == "scalar");
  if (simd::avx2_kernels()) {
    simd::select_kernels("avx2");
    CHECK(std::string(simd::kernels().name) == "avx2");
  } else {
    CHECK_THROWS_AS(simd::select_kernels("avx2"), std::runtime_error);
  }
  simd::select_kernels("auto");
}
