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

#include <map>
#include <string>
#include <vector>

#include "keb/channels.hpp"
#include "keb/core.hpp"

namespace keb {

struct SchmidtDecomposition {
  RealVector coefficients;  // nonincreasing
  Matrix left;              // dA x r, orthonormal columns
  Matrix right;             // dB x r, orthonormal columns
  double norm = 0.0;

  int rank() const { return static_cast<int>(coefficients.size()); }

  Vector reconstruct() const {
    Vector out = Vector::Zero(left.rows() * right.rows());
    for (int n = 0; n < rank(); ++n) out += coefficients(n) * kron(Vector(left.col(n)), Vector(right.col(n)));
    return out;
  }
};

// Reshape to the dA x dB matrix M[i,k] = xi[i*dB+k].
inline Matrix reshape_vector(const Vector& xi, int dA, int dB) {
  Matrix M(dA, dB);
  for (int i = 0; i < dA; ++i)
    for (int k = 0; k < dB; ++k) M(i, k) = xi(i * dB + k);
  return M;
}

inline SchmidtDecomposition schmidt_decompose(const Vector& xi, int dA, int dB, double tol = 1e-8) {
  if (dA < 1 || dB < 1 || xi.size() != static_cast<Eigen::Index>(dA) * dB)
    throw InputError("schmidt_decompose: vector length must equal dA*dB");
  SchmidtDecomposition out;
  out.norm = xi.norm();
  if (out.norm == 0.0) {
    out.coefficients.resize(0);
    out.left.resize(dA, 0);
    out.right.resize(dB, 0);
    return out;
  }
  auto s = svd(reshape_vector(xi, dA, dB));
  int r = 0;
  while (r < s.singular.size() && s.singular(r) > tol * s.singular(0)) ++r;
  out.coefficients = s.singular.head(r);
  out.left = s.U.leftCols(r);
  out.right = s.V.leftCols(r).conjugate();
  return out;
}

inline int schmidt_rank(const Vector& xi, int dA, int dB, double tol = 1e-8) {
  return schmidt_decompose(xi, dA, dB, tol).rank();
}

struct SnBounds {
  int lower = 1;
  int upper = 1;
  std::string lowerEvidence;
  std::string upperEvidence;
  Vector lowerWitness;       // eigenvector of the violated probe
  double lowerWitnessValue = 0.0;
};

// Pure parts sqrt(l_n) v_n of the eigendecomposition of a PSD operator.
inline std::vector<Vector> pure_parts(const Bipartite& X, double eps_psd = 1e-9) {
  auto es = hermitian_eig(X.matrix, 1e-8 * std::max(1.0, X.matrix.cwiseAbs().maxCoeff()));
  const Eigen::Index n = es.values.size();
  double top = std::max(std::abs(es.values(0)), std::abs(es.values(n - 1)));
  if (es.values(n - 1) < -eps_psd * std::max(1.0, top))
    throw InputError("operator is not PSD (min eigenvalue " + std::to_string(es.values(n - 1)) + ")");
  std::vector<Vector> out;
  for (Eigen::Index m = 0; m < n; ++m) {
    if (es.values(m) <= 1e-12 * top) break;
    out.push_back(std::sqrt(es.values(m)) * es.vectors.col(m));
  }
  return out;
}

inline SnBounds sn_upper_bound(const Bipartite& X, double eps_psd = 1e-9) {
  SnBounds b;
  auto parts = pure_parts(X, eps_psd);
  int up = 1;
  for (const auto& v : parts) up = std::max(up, schmidt_rank(v, X.dimA, X.dimB));
  b.upper = up;
  b.upperEvidence = "max Schmidt rank over " + std::to_string(parts.size()) + " eigen-pure parts";
  return b;
}

// Also uses the stored Kraus list (SN <= max Kraus rank).
inline SnBounds sn_upper_bound(const ChannelRep& phi, double eps_psd = 1e-9) {
  SnBounds b = sn_upper_bound(phi.choi(), eps_psd);
  if (const auto* K = phi.native_kraus()) {
    int kr = 1;
    for (const auto& V : *K) {
      auto s = svd(V).singular;
      int r = 0;
      while (r < s.size() && s(r) > 1e-8 * s(0)) ++r;
      kr = std::max(kr, r);
    }
    if (kr < b.upper) {
      b.upper = kr;
      b.upperEvidence = "max rank over " + std::to_string(K->size()) + " stored Kraus operators";
    }
  }
  return b;
}

// tr_2(X) (x) I - X/k (second side) or I (x) tr_1(X) - X/k (first side).
// A negative eigenvalue certifies SN(X) > k.
inline Matrix reduction_probe(const Bipartite& X, int k, Side side) {
  if (side == Side::Second)
    return kron(partial_trace(X, Side::Second), identity(X.dimB)) - X.matrix / static_cast<double>(k);
  return kron(identity(X.dimA), partial_trace(X, Side::First)) - X.matrix / static_cast<double>(k);
}

// (id (x) W_{1/k})(X) = tr_2(X) (x) I - (id (x) T)(X)/k.
inline Matrix werner_probe(const Bipartite& X, int k) {
  return kron(partial_trace(X, Side::Second), identity(X.dimB)) -
         partial_transpose(X, Side::Second).matrix / static_cast<double>(k);
}

inline SnBounds sn_lower_bound(const Bipartite& X, int kMax, double eps_psd = 1e-9) {
  const int m = std::min(X.dimA, X.dimB);
  if (kMax > m) kMax = m;
  pure_parts(X, eps_psd);
  SnBounds b;
  b.lower = 1;
  b.lowerEvidence = "no probe violated";
  double scale = std::max(1.0, X.matrix.trace().real());
  for (int k = std::min(kMax, m - 1); k >= 1; --k) {
    struct Probe {
      const char* name;
      Matrix op;
    };
    Probe probes[] = {{"W_{1/k}", werner_probe(X, k)},
                      {"T o W_{1/k} (second factor)", reduction_probe(X, k, Side::Second)},
                      {"T o W_{1/k} (first factor)", reduction_probe(X, k, Side::First)}};
    for (auto& p : probes) {
      auto es = hermitian_eig(p.op, 1e-8 * scale);
      double mn = es.values(es.values.size() - 1);
      if (mn < -eps_psd * scale) {
        b.lower = k + 1;
        b.lowerEvidence = std::string(p.name) + " probe at k=" + std::to_string(k) +
                          " has eigenvalue " + std::to_string(mn);
        b.lowerWitness = es.vectors.col(es.values.size() - 1);
        b.lowerWitnessValue = mn;
        return b;
      }
    }
  }
  return b;
}

inline SnBounds sn_bounds(const Bipartite& X, double eps_psd = 1e-9) {
  SnBounds up = sn_upper_bound(X, eps_psd);
  SnBounds lo = sn_lower_bound(X, std::min(X.dimA, X.dimB), eps_psd);
  up.lower = lo.lower;
  up.lowerEvidence = lo.lowerEvidence;
  up.lowerWitness = lo.lowerWitness;
  up.lowerWitnessValue = lo.lowerWitnessValue;
  return up;
}

struct RegroupedPart {
  Matrix isometry;  // dA x j, left Schmidt basis
  Vector psi;       // in C^j (x) C^dB, (V (x) I) psi = xi
};

// Groups pure parts by Schmidt rank j.
inline std::map<int, std::vector<RegroupedPart>> sn_regroup(const std::vector<Vector>& parts, int dA,
                                                            int dB, double tol = 1e-8) {
  std::map<int, std::vector<RegroupedPart>> out;
  for (const auto& xi : parts) {
    auto sd = schmidt_decompose(xi, dA, dB, tol);
    if (sd.rank() == 0) continue;
    const int j = sd.rank();
    Matrix V = sd.left;
    if ((V.adjoint() * V - identity(j)).cwiseAbs().maxCoeff() > 1e-9)
      throw NumericGateError("sn_regroup: extracted Schmidt basis is not isometric");
    Vector psi = kron(Matrix(V.adjoint()), identity(dB)) * xi;
    out[j].push_back({V, psi});
  }
  return out;
}

inline Matrix sn_regroup_reconstruct(const std::map<int, std::vector<RegroupedPart>>& groups, int dB) {
  Matrix X;
  for (const auto& [j, list] : groups)
    for (const auto& p : list) {
      Vector v = kron(p.isometry, identity(dB)) * p.psi;
      if (X.size() == 0) X = Matrix::Zero(v.size(), v.size());
      X += v * v.adjoint();
    }
  return X;
}

}  // namespace keb
