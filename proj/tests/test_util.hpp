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

#include <vector>

#include "keb/keb.hpp"

namespace keb::testing {

// Elementwise oracle for the Choi matrix: block (i,j) is Phi(E_ij).
inline Matrix choi_by_units(const ChannelRep& phi) {
  const int d1 = phi.dim_in(), d2 = phi.dim_out();
  Matrix C = Matrix::Zero(d1 * d2, d1 * d2);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d1; ++j) C.block(i * d2, j * d2, d2, d2) = phi.apply(matrix_unit(d1, d1, i, j));
  return C;
}

inline std::vector<Matrix> random_kraus(int count, int rows, int cols, Rng& rng) {
  std::vector<Matrix> out;
  for (int n = 0; n < count; ++n) out.push_back(random_gaussian(rows, cols, rng));
  return out;
}

inline double hs_pairing(const Matrix& A, const Matrix& B) { return (A.adjoint() * B).trace().real(); }

inline Matrix product_state(const Vector& x, const Vector& y) {
  Vector v = kron(x, y);
  return v * v.adjoint();
}

}  // namespace keb::testing
