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

#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace pitchdsp {

// Thin RAII wrappers over FFTW plans. Each object owns its buffers, so an
// instance must not be shared between threads; use the thread-local
// accessors below for cached per-thread instances.

class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return size_; }
  std::size_t bins() const { return size_ / 2 + 1; }

  // Unnormalized forward transform: in.size() == size(), out.size() == bins().
  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  // Unnormalized inverse: result is size() times the original signal.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

  static RealFft& cached(std::size_t size);

 private:
  struct Impl;
  std::size_t size_;
  std::unique_ptr<Impl> impl_;
};

// Type-I DCT (FFTW REDFT00) of length n. Equivalent to the DFT of the even
// extension of length 2(n-1); applying it twice scales by 2(n-1).
class Dct1 {
 public:
  explicit Dct1(std::size_t n);
  ~Dct1();
  Dct1(const Dct1&) = delete;
  Dct1& operator=(const Dct1&) = delete;

  std::size_t size() const { return n_; }
  void transform(std::span<const double> in, std::span<double> out);

  static Dct1& cached(std::size_t n);

 private:
  struct Impl;
  std::size_t n_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pitchdsp
