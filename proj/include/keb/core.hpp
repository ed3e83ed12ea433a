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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace keb {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Malformed or out-of-contract input.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension above the configured maximum.
class LimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A decomposition failed its residual gate.
class NumericGateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tolerance {
  double eps_psd = 1e-9;
  double eps_herm = 1e-10;
  double eps_sep = 1e-7;
  double eps_eq = 1e-10;
  int restarts = 64;
  int samples = 100000;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(eps_psd >= 0) || !(eps_herm >= 0) || !(eps_sep >= 0) || !(eps_eq >= 0))
      throw InputError("tolerances must be nonnegative");
    if (restarts < 1) throw InputError("restarts must be positive");
    if (samples < 1) throw InputError("samples must be positive");
  }
};

enum class Side { First, Second };

// Operator on C^dimA (x) C^dimB, index (i,k) stored at i*dimB + k.
struct Bipartite {
  Matrix matrix;
  int dimA = 1;
  int dimB = 1;

  Bipartite() : matrix(Matrix::Identity(1, 1)) {}
  Bipartite(Matrix m, int dA, int dB) : matrix(std::move(m)), dimA(dA), dimB(dB) {
    if (dA < 1 || dB < 1) throw InputError("factor dimensions must be positive");
    if (matrix.rows() != dA * dB || matrix.cols() != dA * dB)
      throw InputError("bipartite matrix must be square of side dimA*dimB (got " +
                       std::to_string(matrix.rows()) + "x" + std::to_string(matrix.cols()) +
                       " for " + std::to_string(dA) + "*" + std::to_string(dB) + ")");
  }

  int dim() const { return dimA * dimB; }
};

inline Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

inline Vector kron(const Vector& x, const Vector& y) {
  Vector out(x.size() * y.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out.segment(i * y.size(), y.size()) = x(i) * y;
  return out;
}

inline Matrix identity(int n) { return Matrix::Identity(n, n); }

inline Matrix matrix_unit(int rows, int cols, int i, int j) {
  Matrix E = Matrix::Zero(rows, cols);
  E(i, j) = 1.0;
  return E;
}

inline Vector basis_vector(int d, int i) {
  Vector e = Vector::Zero(d);
  e(i) = 1.0;
  return e;
}

inline Vector omega_vector(int d) {
  if (d < 1) throw InputError("omega_vector: d must be positive");
  Vector w = Vector::Zero(d * d);
  for (int i = 0; i < d; ++i) w(i * d + i) = 1.0;
  return w;
}

inline Matrix omega_projector(int d) {
  Vector w = omega_vector(d);
  return w * w.adjoint();
}

inline Matrix swap_operator(int d) {
  if (d < 1) throw InputError("swap_operator: d must be positive");
  Matrix S = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) S(j * d + i, i * d + j) = 1.0;
  return S;
}

inline Matrix partial_trace(const Bipartite& X, Side side) {
  const int dA = X.dimA, dB = X.dimB;
  if (side == Side::Second) {
    Matrix out = Matrix::Zero(dA, dA);
    for (int i = 0; i < dA; ++i)
      for (int j = 0; j < dA; ++j)
        out(i, j) = X.matrix.block(i * dB, j * dB, dB, dB).trace();
    return out;
  }
  Matrix out = Matrix::Zero(dB, dB);
  for (int i = 0; i < dA; ++i) out += X.matrix.block(i * dB, i * dB, dB, dB);
  return out;
}

inline Bipartite partial_transpose(const Bipartite& X, Side side) {
  const int dA = X.dimA, dB = X.dimB;
  Matrix out(X.dim(), X.dim());
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dA; ++j) {
      if (side == Side::Second)
        out.block(i * dB, j * dB, dB, dB) = X.matrix.block(i * dB, j * dB, dB, dB).transpose();
      else
        out.block(i * dB, j * dB, dB, dB) = X.matrix.block(j * dB, i * dB, dB, dB);
    }
  return Bipartite(std::move(out), dA, dB);
}

// R[(i,j),(k,l)] = X[(i,k),(j,l)], a dimA^2 x dimB^2 matrix.
inline Matrix realignment(const Bipartite& X) {
  const int dA = X.dimA, dB = X.dimB;
  Matrix R(dA * dA, dB * dB);
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dA; ++j)
      for (int k = 0; k < dB; ++k)
        for (int l = 0; l < dB; ++l) R(i * dA + j, k * dB + l) = X.matrix(i * dB + k, j * dB + l);
  return R;
}

inline Bipartite realignment_inverse(const Matrix& R, int dA, int dB) {
  if (R.rows() != dA * dA || R.cols() != dB * dB)
    throw InputError("realignment_inverse: shape does not match factor dimensions");
  Matrix X(dA * dB, dA * dB);
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dA; ++j)
      for (int k = 0; k < dB; ++k)
        for (int l = 0; l < dB; ++l) X(i * dB + k, j * dB + l) = R(i * dA + j, k * dB + l);
  return Bipartite(std::move(X), dA, dB);
}

inline double hermitian_deviation(const Matrix& M) {
  if (M.rows() != M.cols()) return std::numeric_limits<double>::infinity();
  return (M - M.adjoint()).cwiseAbs().maxCoeff();
}

// Symmetrizes M when its deviation from Hermiticity is within eps_herm*max(1,|M|).
inline Matrix ensure_hermitian(const Matrix& M, double eps_herm) {
  if (M.rows() != M.cols()) throw InputError("matrix is not square");
  double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if (hermitian_deviation(M) > eps_herm * scale)
    throw InputError("matrix is not Hermitian (deviation " + std::to_string(hermitian_deviation(M)) +
                     ")");
  return (M + M.adjoint()) / 2.0;
}

struct EigenSystem {
  RealVector values;  // descending
  Matrix vectors;     // orthonormal columns matching values
};

inline EigenSystem hermitian_eig(const Matrix& M, double eps_herm = 1e-10) {
  Matrix H = ensure_hermitian(M, eps_herm);
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  if (es.info() != Eigen::Success) throw NumericGateError("hermitian_eig did not converge");
  const Eigen::Index n = H.rows();
  EigenSystem out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = es.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  double norm = H.norm();
  double resid =
      (H - out.vectors * out.values.cast<cplx>().asDiagonal() * out.vectors.adjoint()).norm();
  if (resid > 1e-10 * std::max(norm, 1e-300) && resid > 1e-300)
    throw NumericGateError("hermitian_eig residual gate failed: " + std::to_string(resid));
  return out;
}

inline double min_eigenvalue(const Matrix& M, double eps_herm = 1e-10) {
  auto es = hermitian_eig(M, eps_herm);
  return es.values(es.values.size() - 1);
}

struct SvdSystem {
  Matrix U;
  RealVector singular;  // descending
  Matrix V;
};

inline SvdSystem svd(const Matrix& M) {
  Eigen::JacobiSVD<Matrix> js(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdSystem out{js.matrixU(), js.singularValues(), js.matrixV()};
  const Eigen::Index r = out.singular.size();
  Matrix S = Matrix::Zero(M.rows(), M.cols());
  for (Eigen::Index i = 0; i < r; ++i) S(i, i) = out.singular(i);
  double resid = (M - out.U * S * out.V.adjoint()).norm();
  if (resid > 1e-10 * std::max(M.norm(), 1e-300) && resid > 1e-300)
    throw NumericGateError("svd residual gate failed: " + std::to_string(resid));
  return out;
}

inline double op_norm_inf(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  return svd(M).singular(0);
}

inline double nuclear_norm(const Matrix& M) { return svd(M).singular.sum(); }

inline bool approx_equal(const Matrix& A, const Matrix& B, double eps) {
  return A.rows() == B.rows() && A.cols() == B.cols() && (A - B).cwiseAbs().maxCoeff() <= eps;
}

// Columns spanning the eigenspaces of H with eigenvalue above rel*max|eig|.
inline Matrix support_isometry(const Matrix& H, double rel = 1e-9) {
  auto es = hermitian_eig(H);
  double top = std::max(std::abs(es.values(0)), std::abs(es.values(es.values.size() - 1)));
  int r = 0;
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    if (es.values(i) > rel * top) ++r;
  return es.vectors.leftCols(r);
}

// Orthonormal completion of the columns of Q (assumed orthonormal) to size n x n.
inline Matrix complete_basis(const Matrix& Q, int n) {
  Matrix P = identity(n) - Q * Q.adjoint();
  auto es = hermitian_eig((P + P.adjoint()) / 2.0, 1e-8);
  Matrix out(n, n);
  out.leftCols(Q.cols()) = Q;
  out.rightCols(n - Q.cols()) = es.vectors.leftCols(n - Q.cols());
  return out;
}

inline long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// All k-subsets of {0..n-1} in lexicographic order.
inline std::vector<std::vector<int>> combinations(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

}  // namespace keb
