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

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "keb/core.hpp"

namespace keb {

enum class FamilyName {
  WernerHolevo,    // X -> tr(X) I - lambda X^T
  PhiLambda,       // X -> tr(X) I + lambda (X + X^T)
  WernerModified,  // X -> tr(X) I + lambda Gamma(X)
  Schur,           // X -> A o X
  AdV,             // X -> V* X V
  Identity,
  Transpose,
  TraceMap,        // X -> tr(X) I_{dOut}
  DirectSum,       // X -> Phi_1(X) (+) Phi_2(X)
};

inline const char* to_string(FamilyName f) {
  switch (f) {
    case FamilyName::WernerHolevo: return "WernerHolevo";
    case FamilyName::PhiLambda: return "PhiLambda";
    case FamilyName::WernerModified: return "WernerModified";
    case FamilyName::Schur: return "Schur";
    case FamilyName::AdV: return "AdV";
    case FamilyName::Identity: return "Identity";
    case FamilyName::Transpose: return "Transpose";
    case FamilyName::TraceMap: return "TraceMap";
    case FamilyName::DirectSum: return "DirectSum";
  }
  return "?";
}

inline std::optional<FamilyName> family_from_string(const std::string& s) {
  for (FamilyName f : {FamilyName::WernerHolevo, FamilyName::PhiLambda, FamilyName::WernerModified,
                       FamilyName::Schur, FamilyName::AdV, FamilyName::Identity,
                       FamilyName::Transpose, FamilyName::TraceMap, FamilyName::DirectSum})
    if (s == to_string(f)) return f;
  return std::nullopt;
}

class ChannelRep;

struct FamilySpec {
  FamilyName name = FamilyName::Identity;
  int d = 0;            // input dimension for the scalar-parametric families
  int d_out = 0;        // TraceMap output dimension (0 means d)
  double lambda = 0.0;
  Matrix param;         // A for Schur, V for AdV
  std::vector<ChannelRep> maps;  // {Gamma} for WernerModified, {Phi_1, Phi_2} for DirectSum
};

class ChannelRep {
 public:
  enum class Body { Kraus, Choi, Family };

  // Each V is dimIn x dimOut and acts as X -> V* X V.
  static ChannelRep from_kraus(std::vector<Matrix> kraus) {
    if (kraus.empty()) throw InputError("Kraus list must be nonempty");
    const auto r = kraus.front().rows(), c = kraus.front().cols();
    if (r < 1 || c < 1) throw InputError("Kraus operators must be nonempty matrices");
    for (const auto& V : kraus)
      if (V.rows() != r || V.cols() != c) throw InputError("Kraus operators must share one shape");
    auto impl = std::make_shared<Impl>();
    impl->d1 = static_cast<int>(r);
    impl->d2 = static_cast<int>(c);
    impl->body = Body::Kraus;
    impl->kraus = std::move(kraus);
    return ChannelRep(std::move(impl));
  }

  static ChannelRep from_choi(Bipartite C) {
    auto impl = std::make_shared<Impl>();
    impl->d1 = C.dimA;
    impl->d2 = C.dimB;
    impl->body = Body::Choi;
    impl->choi_body = std::move(C);
    return ChannelRep(std::move(impl));
  }

  static ChannelRep from_family(FamilySpec spec);

  int dim_in() const { return impl_->d1; }
  int dim_out() const { return impl_->d2; }
  Body body() const { return impl_->body; }
  const FamilySpec* family() const { return impl_->body == Body::Family ? &impl_->family : nullptr; }
  const std::vector<Matrix>* native_kraus() const {
    return impl_->body == Body::Kraus ? &impl_->kraus : nullptr;
  }

  Matrix apply(const Matrix& X) const {
    if (X.rows() != dim_in() || X.cols() != dim_in())
      throw InputError("apply: input must be " + std::to_string(dim_in()) + "x" +
                       std::to_string(dim_in()));
    switch (impl_->body) {
      case Body::Kraus: {
        Matrix out = Matrix::Zero(dim_out(), dim_out());
        for (const auto& V : impl_->kraus) out += V.adjoint() * X * V;
        return out;
      }
      case Body::Choi: {
        const Bipartite& C = impl_->choi_body;
        Matrix out = Matrix::Zero(dim_out(), dim_out());
        const int d2 = dim_out();
        for (int i = 0; i < dim_in(); ++i)
          for (int j = 0; j < dim_in(); ++j)
            if (X(i, j) != cplx(0.0)) out += X(i, j) * C.matrix.block(i * d2, j * d2, d2, d2);
        return out;
      }
      case Body::Family: return apply_family(X);
    }
    return X;
  }

  const Bipartite& choi() const {
    std::call_once(impl_->choi_once, [this] {
      if (impl_->body == Body::Choi) {
        impl_->choi_cache = impl_->choi_body;
        return;
      }
      const int d1 = dim_in(), d2 = dim_out();
      Matrix C = Matrix::Zero(d1 * d2, d1 * d2);
      if (impl_->body == Body::Kraus) {
        for (const auto& V : impl_->kraus) {
          Vector psi(d1 * d2);
          for (int i = 0; i < d1; ++i)
            for (int k = 0; k < d2; ++k) psi(i * d2 + k) = std::conj(V(i, k));
          C += psi * psi.adjoint();
        }
      } else {
        for (int i = 0; i < d1; ++i)
          for (int j = 0; j < d1; ++j)
            C.block(i * d2, j * d2, d2, d2) = apply(matrix_unit(d1, d1, i, j));
      }
      impl_->choi_cache = Bipartite(std::move(C), d1, d2);
    });
    return impl_->choi_cache;
  }

  // Native Kraus list, or one extracted from the Choi eigendecomposition.
  std::vector<Matrix> kraus(double eps_psd = 1e-9) const {
    if (impl_->body == Body::Kraus) return impl_->kraus;
    const Bipartite& C = choi();
    auto es = hermitian_eig(C.matrix, 1e-8 * std::max(1.0, C.matrix.cwiseAbs().maxCoeff()));
    const Eigen::Index n = es.values.size();
    double top = std::max(std::abs(es.values(0)), std::abs(es.values(n - 1)));
    if (es.values(n - 1) < -eps_psd * std::max(1.0, top))
      throw InputError("Kraus extraction refused: Choi matrix is not PSD (min eigenvalue " +
                       std::to_string(es.values(n - 1)) + ")");
    const int d1 = dim_in(), d2 = dim_out();
    std::vector<Matrix> out;
    for (Eigen::Index m = 0; m < n; ++m) {
      if (es.values(m) <= 1e-14 * top) break;
      Vector psi = std::sqrt(es.values(m)) * es.vectors.col(m);
      Matrix V(d1, d2);
      for (int i = 0; i < d1; ++i)
        for (int k = 0; k < d2; ++k) V(i, k) = std::conj(psi(i * d2 + k));
      out.push_back(std::move(V));
    }
    if (out.empty()) out.push_back(Matrix::Zero(d1, d2));
    return out;
  }

  bool hermiticity_preserving(double eps_herm = 1e-10) const {
    const Matrix& C = choi().matrix;
    return hermitian_deviation(C) <= eps_herm * std::max(1.0, C.cwiseAbs().maxCoeff());
  }

 private:
  struct Impl {
    int d1 = 1, d2 = 1;
    Body body = Body::Choi;
    std::vector<Matrix> kraus;
    Bipartite choi_body;
    FamilySpec family;
    mutable std::once_flag choi_once;
    mutable Bipartite choi_cache;
  };

  explicit ChannelRep(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}

  Matrix apply_family(const Matrix& X) const {
    const FamilySpec& f = impl_->family;
    const int d2 = dim_out();
    switch (f.name) {
      case FamilyName::WernerHolevo: return X.trace() * identity(d2) - f.lambda * X.transpose();
      case FamilyName::PhiLambda:
        return X.trace() * identity(d2) + f.lambda * (X + Matrix(X.transpose()));
      case FamilyName::WernerModified:
        return X.trace() * identity(d2) + f.lambda * f.maps[0].apply(X);
      case FamilyName::Schur: return f.param.cwiseProduct(X);
      case FamilyName::AdV: return f.param.adjoint() * X * f.param;
      case FamilyName::Identity: return X;
      case FamilyName::Transpose: return X.transpose();
      case FamilyName::TraceMap: return X.trace() * identity(d2);
      case FamilyName::DirectSum: {
        const int a = f.maps[0].dim_out(), b = f.maps[1].dim_out();
        Matrix out = Matrix::Zero(a + b, a + b);
        out.topLeftCorner(a, a) = f.maps[0].apply(X);
        out.bottomRightCorner(b, b) = f.maps[1].apply(X);
        return out;
      }
    }
    return X;
  }

  std::shared_ptr<Impl> impl_;
};

inline ChannelRep ChannelRep::from_family(FamilySpec f) {
  auto impl = std::make_shared<Impl>();
  auto need_dim = [&] {
    if (f.d < 1) throw InputError(std::string(to_string(f.name)) + ": dimension must be positive");
  };
  switch (f.name) {
    case FamilyName::WernerHolevo:
    case FamilyName::PhiLambda:
    case FamilyName::Identity:
    case FamilyName::Transpose:
      need_dim();
      impl->d1 = impl->d2 = f.d;
      break;
    case FamilyName::TraceMap:
      need_dim();
      if (f.d_out == 0) f.d_out = f.d;
      if (f.d_out < 1) throw InputError("TraceMap: output dimension must be positive");
      impl->d1 = f.d;
      impl->d2 = f.d_out;
      break;
    case FamilyName::WernerModified:
      if (f.maps.size() != 1) throw InputError("WernerModified needs exactly one map Gamma");
      if (f.maps[0].dim_in() != f.maps[0].dim_out())
        throw InputError("WernerModified: Gamma must map M_d to M_d");
      f.d = f.maps[0].dim_in();
      impl->d1 = impl->d2 = f.d;
      break;
    case FamilyName::Schur:
      if (f.param.rows() < 1 || f.param.rows() != f.param.cols())
        throw InputError("Schur: A must be square");
      f.d = static_cast<int>(f.param.rows());
      impl->d1 = impl->d2 = f.d;
      break;
    case FamilyName::AdV:
      if (f.param.rows() < 1 || f.param.cols() < 1) throw InputError("AdV: V must be nonempty");
      impl->d1 = static_cast<int>(f.param.rows());
      impl->d2 = static_cast<int>(f.param.cols());
      f.d = impl->d1;
      break;
    case FamilyName::DirectSum:
      if (f.maps.size() != 2) throw InputError("DirectSum needs exactly two maps");
      if (f.maps[0].dim_in() != f.maps[1].dim_in())
        throw InputError("DirectSum: summands must share the input dimension");
      f.d = f.maps[0].dim_in();
      impl->d1 = f.d;
      impl->d2 = f.maps[0].dim_out() + f.maps[1].dim_out();
      break;
  }
  impl->body = Body::Family;
  impl->family = std::move(f);
  return ChannelRep(std::move(impl));
}

inline ChannelRep family_make(FamilySpec spec) { return ChannelRep::from_family(std::move(spec)); }

inline ChannelRep werner_holevo(int d, double lambda) {
  FamilySpec f;
  f.name = FamilyName::WernerHolevo;
  f.d = d;
  f.lambda = lambda;
  return family_make(std::move(f));
}

inline ChannelRep phi_lambda(int d, double lambda) {
  FamilySpec f;
  f.name = FamilyName::PhiLambda;
  f.d = d;
  f.lambda = lambda;
  return family_make(std::move(f));
}

inline ChannelRep werner_modified(const ChannelRep& gamma, double lambda) {
  FamilySpec f;
  f.name = FamilyName::WernerModified;
  f.lambda = lambda;
  f.maps = {gamma};
  return family_make(std::move(f));
}

inline ChannelRep schur_map(const Matrix& A) {
  FamilySpec f;
  f.name = FamilyName::Schur;
  f.param = A;
  return family_make(std::move(f));
}

inline ChannelRep ad_v(const Matrix& V) {
  FamilySpec f;
  f.name = FamilyName::AdV;
  f.param = V;
  return family_make(std::move(f));
}

inline ChannelRep identity_map(int d) {
  FamilySpec f;
  f.name = FamilyName::Identity;
  f.d = d;
  return family_make(std::move(f));
}

inline ChannelRep transpose_map(int d) {
  FamilySpec f;
  f.name = FamilyName::Transpose;
  f.d = d;
  return family_make(std::move(f));
}

inline ChannelRep trace_map(int d, int d_out = 0) {
  FamilySpec f;
  f.name = FamilyName::TraceMap;
  f.d = d;
  f.d_out = d_out;
  return family_make(std::move(f));
}

inline ChannelRep direct_sum(const ChannelRep& a, const ChannelRep& b) {
  FamilySpec f;
  f.name = FamilyName::DirectSum;
  f.maps = {a, b};
  return family_make(std::move(f));
}

inline ChannelRep map_of_choi(const Bipartite& C) { return ChannelRep::from_choi(C); }

inline Bipartite choi_of(const ChannelRep& phi) { return phi.choi(); }

// (id (x) Phi) applied to an operator whose second factor is Phi's input.
inline Bipartite apply_second(const ChannelRep& phi, const Bipartite& X) {
  if (X.dimB != phi.dim_in()) throw InputError("apply_second: factor dimension mismatch");
  const int m = X.dimA, d1 = phi.dim_in(), d2 = phi.dim_out();
  Matrix out(m * d2, m * d2);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      out.block(a * d2, b * d2, d2, d2) = phi.apply(X.matrix.block(a * d1, b * d1, d1, d1));
  return Bipartite(std::move(out), m, d2);
}

// (Phi (x) id) applied to an operator whose first factor is Phi's input.
inline Bipartite apply_first(const ChannelRep& phi, const Bipartite& X) {
  if (X.dimA != phi.dim_in()) throw InputError("apply_first: factor dimension mismatch");
  const int m = X.dimB, d1 = phi.dim_in(), d2 = phi.dim_out();
  Matrix out(d2 * m, d2 * m);
  Matrix Y(d1, d1);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      for (int i = 0; i < d1; ++i)
        for (int j = 0; j < d1; ++j) Y(i, j) = X.matrix(i * m + a, j * m + b);
      Matrix Z = phi.apply(Y);
      for (int p = 0; p < d2; ++p)
        for (int q = 0; q < d2; ++q) out(p * m + a, q * m + b) = Z(p, q);
    }
  return Bipartite(std::move(out), d2, m);
}

// Phi o Psi.
inline ChannelRep compose(const ChannelRep& phi, const ChannelRep& psi) {
  if (psi.dim_out() != phi.dim_in())
    throw InputError("compose: inner output dimension " + std::to_string(psi.dim_out()) +
                     " does not match outer input dimension " + std::to_string(phi.dim_in()));
  if (phi.native_kraus() && psi.native_kraus()) {
    std::vector<Matrix> out;
    for (const auto& V : *psi.native_kraus())
      for (const auto& W : *phi.native_kraus()) out.push_back(V * W);
    return ChannelRep::from_kraus(std::move(out));
  }
  return ChannelRep::from_choi(apply_second(phi, psi.choi()));
}

enum class TensorSide { Left, Right };

// id_k (x) Phi (Left) or Phi (x) id_k (Right).
inline ChannelRep tensor_with_identity(const ChannelRep& phi, int k, TensorSide side) {
  if (k < 1) throw InputError("tensor_with_identity: k must be positive");
  if (k == 1) return phi;
  if (const auto* K = phi.native_kraus()) {
    std::vector<Matrix> out;
    for (const auto& V : *K) out.push_back(side == TensorSide::Left ? kron(identity(k), V) : kron(V, identity(k)));
    return ChannelRep::from_kraus(std::move(out));
  }
  const int n = k * phi.dim_in(), m = k * phi.dim_out();
  Matrix C(n * m, n * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Bipartite E(matrix_unit(n, n, i, j), side == TensorSide::Left ? k : phi.dim_in(),
                  side == TensorSide::Left ? phi.dim_in() : k);
      C.block(i * m, j * m, m, m) =
          side == TensorSide::Left ? apply_second(phi, E).matrix : apply_first(phi, E).matrix;
    }
  return ChannelRep::from_choi(Bipartite(std::move(C), n, m));
}

// Hilbert-Schmidt dual: C*[(k,i),(l,j)] = conj(C[(i,k),(j,l)]).
inline ChannelRep adjoint(const ChannelRep& phi) {
  if (const auto* K = phi.native_kraus()) {
    std::vector<Matrix> out;
    for (const auto& V : *K) out.push_back(V.adjoint());
    return ChannelRep::from_kraus(std::move(out));
  }
  const Bipartite& C = phi.choi();
  const int d1 = phi.dim_in(), d2 = phi.dim_out();
  Matrix D(d1 * d2, d1 * d2);
  for (int i = 0; i < d1; ++i)
    for (int k = 0; k < d2; ++k)
      for (int j = 0; j < d1; ++j)
        for (int l = 0; l < d2; ++l) D(k * d1 + i, l * d1 + j) = std::conj(C.matrix(i * d2 + k, j * d2 + l));
  return ChannelRep::from_choi(Bipartite(std::move(D), d2, d1));
}

// T o Phi o T.
inline ChannelRep transpose_conjugate(const ChannelRep& phi) {
  if (const auto* K = phi.native_kraus()) {
    std::vector<Matrix> out;
    for (const auto& V : *K) out.push_back(V.conjugate());
    return ChannelRep::from_kraus(std::move(out));
  }
  const Bipartite& C = phi.choi();
  return ChannelRep::from_choi(Bipartite(C.matrix.transpose(), C.dimA, C.dimB));
}

inline double choi_distance(const ChannelRep& a, const ChannelRep& b) {
  if (a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out())
    return std::numeric_limits<double>::infinity();
  return (a.choi().matrix - b.choi().matrix).norm();
}

}  // namespace keb
