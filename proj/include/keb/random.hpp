// Copyright 2026 The keb-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include "keb/core.hpp"

namespace keb {

// SplitMix64; cheap to seed, so every restart or sample gets its own stream.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream) : state_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    return mix(z);
  }

  double normal() { return normal_(*this); }
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline Matrix random_gaussian(int rows, int cols, Rng& rng) {
  Matrix M(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      double re = rng.normal();
      double im = rng.normal();
      M(i, j) = cplx(re, im);
    }
  return M;
}

inline Eigen::MatrixXd random_real_gaussian(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd M(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) M(i, j) = rng.normal();
  return M;
}

inline Vector random_unit_vector(int d, Rng& rng) {
  Vector v = random_gaussian(d, 1, rng).col(0);
  return v / v.norm();
}

// Haar unitary: QR of a complex Ginibre matrix with the phases of diag(R) removed.
inline Matrix random_unitary(int d, Rng& rng) {
  Matrix Z = random_gaussian(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(Z);
  Matrix Q = qr.householderQ();
  Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    cplx r = R(i, i);
    double a = std::abs(r);
    Q.col(i) *= (a > 0 ? r / a : cplx(1.0));
  }
  return Q;
}

// Random PSD matrix of the given rank (Wishart-type).
inline Matrix random_psd(int n, int rank, Rng& rng) {
  Matrix G = random_gaussian(n, rank, rng);
  return G * G.adjoint();
}

inline Matrix random_hermitian(int n, Rng& rng) {
  Matrix G = random_gaussian(n, n, rng);
  return (G + G.adjoint()) / 2.0;
}

inline Matrix random_matrix_of_rank(int rows, int cols, int rank, Rng& rng) {
  Matrix L = random_gaussian(rows, rank, rng);
  Matrix R = random_gaussian(rank, cols, rng);
  return L * R;
}

// Convex mixture of `terms` random pure product states, unit trace.
inline Bipartite random_separable(int dA, int dB, int terms, Rng& rng) {
  Matrix X = Matrix::Zero(dA * dB, dA * dB);
  double total = 0.0;
  for (int t = 0; t < terms; ++t) {
    Vector a = random_unit_vector(dA, rng);
    Vector b = random_unit_vector(dB, rng);
    Vector v = kron(a, b);
    double w = rng.uniform() + 1e-3;
    X += w * v * v.adjoint();
    total += w;
  }
  return Bipartite(X / total, dA, dB);
}

}  // namespace keb
