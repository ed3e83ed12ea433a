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

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace keb {

// Finds x >= 0 with Aeq x = beq and Ale x <= ble (phase-I simplex, Bland's rule).
inline std::optional<Eigen::VectorXd> lp_feasible(const Eigen::MatrixXd& Aeq, const Eigen::VectorXd& beq,
                                                  const Eigen::MatrixXd& Ale, const Eigen::VectorXd& ble,
                                                  double tol = 1e-10) {
  const Eigen::Index n = std::max(Aeq.cols(), Ale.cols());
  const Eigen::Index me = Aeq.rows(), ml = Ale.rows(), m = me + ml;
  // Columns: x (n), slacks (ml), artificials (m), rhs.
  const Eigen::Index cols = n + ml + m + 1;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, cols);
  for (Eigen::Index i = 0; i < me; ++i) {
    T.row(i).head(n) = Aeq.row(i);
    T(i, cols - 1) = beq(i);
  }
  for (Eigen::Index i = 0; i < ml; ++i) {
    T.row(me + i).head(n) = Ale.row(i);
    T(me + i, n + i) = 1.0;
    T(me + i, cols - 1) = ble(i);
  }
  std::vector<Eigen::Index> basis(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (T(i, cols - 1) < 0) T.row(i) = -T.row(i);
    T(i, n + ml + i) = 1.0;
    basis[i] = n + ml + i;
  }
  for (Eigen::Index i = 0; i < m; ++i) T.row(m) -= T.row(i);
  for (Eigen::Index j = n + ml; j < n + ml + m; ++j) T(m, j) = 0.0;

  for (int iter = 0; iter < 10000; ++iter) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < cols - 1; ++j)
      if (T(m, j) < -tol) {
        enter = j;
        break;
      }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (T(i, enter) <= tol) continue;
      double ratio = T(i, cols - 1) / T(i, enter);
      if (leave < 0 || ratio < best - tol || (std::abs(ratio - best) <= tol && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) break;
    T.row(leave) /= T(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i)
      if (i != leave && T(i, enter) != 0.0) T.row(i) -= T(i, enter) * T.row(leave);
    basis[leave] = enter;
  }
  if (-T(m, cols - 1) > 1e-8) return std::nullopt;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i)
    if (basis[i] < n) x(basis[i]) = std::max(0.0, T(i, cols - 1));
  return x;
}

}  // namespace keb
