// Copyright 2026 The pitchdsp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pitchdsp/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace pitchdsp {

namespace {

// FFTW's planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct RealFft::Impl {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
};

RealFft::RealFft(std::size_t size) : size_(size), impl_(std::make_unique<Impl>()) {
  if (size < 2) throw std::invalid_argument("RealFft: size must be >= 2");
  std::lock_guard lock(planner_mutex());
  impl_->real = fftw_alloc_real(size);
  impl_->spec = fftw_alloc_complex(size / 2 + 1);
  const int n = static_cast<int>(size);
  impl_->fwd = fftw_plan_dft_r2c_1d(n, impl_->real, impl_->spec, FFTW_ESTIMATE);
  impl_->inv = fftw_plan_dft_c2r_1d(n, impl_->spec, impl_->real, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(impl_->fwd);
  fftw_destroy_plan(impl_->inv);
  fftw_free(impl_->real);
  fftw_free(impl_->spec);
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  std::copy(in.begin(), in.end(), impl_->real);
  fftw_execute(impl_->fwd);
  const std::size_t nb = bins();
  for (std::size_t k = 0; k < nb; ++k) out[k] = {impl_->spec[k][0], impl_->spec[k][1]};
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  const std::size_t nb = bins();
  for (std::size_t k = 0; k < nb; ++k) {
    impl_->spec[k][0] = in[k].real();
    impl_->spec[k][1] = in[k].imag();
  }
  // c2r destroys its input, which is our private buffer.
  fftw_execute(impl_->inv);
  std::copy(impl_->real, impl_->real + size_, out.begin());
}

RealFft& RealFft::cached(std::size_t size) {
  thread_local std::map<std::size_t, std::unique_ptr<RealFft>> cache;
  auto& slot = cache[size];
  if (!slot) slot = std::make_unique<RealFft>(size);
  return *slot;
}

struct Dct1::Impl {
  double* in = nullptr;
  double* out = nullptr;
  fftw_plan plan = nullptr;
};

Dct1::Dct1(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
  if (n < 2) throw std::invalid_argument("Dct1: size must be >= 2");
  std::lock_guard lock(planner_mutex());
  impl_->in = fftw_alloc_real(n);
  impl_->out = fftw_alloc_real(n);
  impl_->plan = fftw_plan_r2r_1d(static_cast<int>(n), impl_->in, impl_->out, FFTW_REDFT00,
                                 FFTW_ESTIMATE);
}

Dct1::~Dct1() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(impl_->plan);
  fftw_free(impl_->in);
  fftw_free(impl_->out);
}

void Dct1::transform(std::span<const double> in, std::span<double> out) {
  std::copy(in.begin(), in.end(), impl_->in);
  fftw_execute(impl_->plan);
  std::copy(impl_->out, impl_->out + n_, out.begin());
}

Dct1& Dct1::cached(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<Dct1>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Dct1>(n);
  return *slot;
}

}  // namespace pitchdsp
