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
#include <string>
#include <vector>

#include "keb/certificate.hpp"
#include "keb/channels.hpp"
#include "keb/core.hpp"
#include "keb/random.hpp"
#include "keb/schmidt.hpp"

namespace keb {

inline Matrix random_isometry(int n, int k, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_gaussian(n, k, rng));
  Matrix Q = qr.householderQ();
  return Q.leftCols(k);
}

inline Matrix pad_isometry(const Matrix& Q, int n, int k) {
  if (Q.cols() >= k) return Q.leftCols(k);
  return complete_basis(Q, n).leftCols(k);
}

struct SchmidtSearch {
  double value = 0.0;
  Vector psi;
  int restart = -1;
};

// Minimizes <psi|H|psi> over unit psi with Schmidt rank <= k by alternating compressions:
// fix the right (left) support, take the lowest eigenvector of the compressed operator,
// re-split by SVD, repeat. Restart r is seeded from (seed, r).
inline SchmidtSearch min_over_schmidt_rank(const Matrix& H, int dA, int dB, int k, const Tolerance& tol,
                                           bool short_circuit = true) {
  SchmidtSearch best;
  best.value = std::numeric_limits<double>::infinity();
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  for (int r = 0; r < tol.restarts; ++r) {
    Rng rng(tol.seed, 0x5eed0000ULL + static_cast<std::uint64_t>(r));
    Matrix B = random_isometry(dB, k, rng);
    Vector psi;
    double val = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 400; ++it) {
      double prev = val;
      Matrix IB = kron(identity(dA), B);
      auto e1 = hermitian_eig(IB.adjoint() * H * IB, 1e-8 * scale);
      psi = IB * e1.vectors.col(e1.values.size() - 1);
      auto s1 = schmidt_decompose(psi, dA, dB, 1e-12);
      Matrix A = pad_isometry(s1.left, dA, k);
      Matrix AI = kron(A, identity(dB));
      auto e2 = hermitian_eig(AI.adjoint() * H * AI, 1e-8 * scale);
      psi = AI * e2.vectors.col(e2.values.size() - 1);
      val = e2.values(e2.values.size() - 1);
      auto s2 = schmidt_decompose(psi, dA, dB, 1e-12);
      B = pad_isometry(s2.right, dB, k);
      if (prev - val < 1e-13 * scale) break;
    }
    psi /= psi.norm();
    val = (psi.adjoint() * H * psi)(0, 0).real();
    if (val < best.value) {
      best.value = val;
      best.psi = psi;
      best.restart = r;
    }
    if (short_circuit && best.value < -tol.eps_psd) break;
  }
  return best;
}

inline Certificate psd_certificate(const Matrix& M, const Tolerance& tol, const std::string& method) {
  double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  auto es = hermitian_eig(M, tol.eps_herm * 100 * scale);
  const Eigen::Index n = es.values.size();
  double mn = es.values(n - 1);
  if (mn >= -tol.eps_psd) return make_certificate(Verdict::Holds, method, eigenpair(mn, es.vectors.col(n - 1)));
  return make_certificate(Verdict::Fails, method, eigenpair(mn, es.vectors.col(n - 1)));
}

inline bool is_psd(const Matrix& M, const Tolerance& tol) { return psd_certificate(M, tol, "psd").holds(); }

// <psi|C|psi> >= 0 over Schmidt rank <= k.
inline Certificate block_positivity(const Bipartite& C, int k, const Tolerance& tol) {
  const int m = std::min(C.dimA, C.dimB);
  bool clamped = false;
  if (k < 1) throw InputError("block_positivity: k must be positive");
  if (k > m) {
    k = m;
    clamped = true;
  }
  Certificate cert;
  if (k == m) {
    cert = psd_certificate(C.matrix, tol, "full eigensolve");
    if (cert.fails()) {
      cert.evidence.kind = EvidenceKind::SchmidtWitness;
      cert.evidence.schmidt_rank = schmidt_rank(cert.evidence.vector, C.dimA, C.dimB);
    }
  } else {
    Certificate full = psd_certificate(C.matrix, tol, "full eigensolve");
    if (full.holds()) {
      cert = full;
      cert.method = "PSD operator";
    } else {
      auto s = min_over_schmidt_rank(C.matrix, C.dimA, C.dimB, k, tol);
      if (s.value < -tol.eps_psd) {
        Evidence ev;
        ev.kind = EvidenceKind::SchmidtWitness;
        ev.value = s.value;
        ev.vector = s.psi;
        ev.schmidt_rank = schmidt_rank(s.psi, C.dimA, C.dimB);
        ev.note = "restart " + std::to_string(s.restart);
        cert = make_certificate(Verdict::Fails, "Schmidt-rank search", ev);
      } else {
        Evidence ev;
        ev.value = s.value;
        ev.note = "no witness below -eps_psd after " + std::to_string(tol.restarts) + " restarts";
        cert = make_certificate(Verdict::Unknown, "Schmidt-rank search", ev);
      }
    }
  }
  cert.clamped = clamped;
  if (clamped) cert.notes.push_back("k clamped to " + std::to_string(k));
  return cert;
}

inline bool reverify_schmidt_witness(const Bipartite& C, int k, const Evidence& ev, const Tolerance& tol) {
  if (ev.vector.size() != C.dim()) return false;
  Vector psi = ev.vector / ev.vector.norm();
  if (schmidt_rank(psi, C.dimA, C.dimB) > k) return false;
  return (psi.adjoint() * C.matrix * psi)(0, 0).real() < -tol.eps_psd;
}

inline Certificate is_cp(const ChannelRep& phi, const Tolerance& tol) {
  return psd_certificate(phi.choi().matrix, tol, "Choi eigensolve");
}

inline Certificate is_ppt_map(const ChannelRep& phi, const Tolerance& tol) {
  Certificate c = psd_certificate(phi.choi().matrix, tol, "Choi eigensolve");
  if (c.fails()) return c;
  Certificate p = psd_certificate(partial_transpose(phi.choi(), Side::Second).matrix, tol,
                                  "partial-transpose eigensolve");
  return p;
}

inline Evidence rank_one_input_witness(const ChannelRep& phi, const Vector& u) {
  Matrix out = phi.apply(u * u.adjoint());
  auto es = hermitian_eig(out, 1e-8 * std::max(1.0, out.cwiseAbs().maxCoeff()));
  Evidence ev;
  ev.kind = EvidenceKind::Eigenpair;
  ev.vector = u;
  ev.value = es.values(es.values.size() - 1);
  ev.note = "input |u><u| with Phi(|u><u|) having the stated minimum eigenvalue";
  return ev;
}

inline std::optional<Certificate> positivity_analytic(const ChannelRep& phi) {
  const FamilySpec* f = phi.family();
  if (!f) return std::nullopt;
  const int d = phi.dim_in();
  switch (f->name) {
    case FamilyName::WernerHolevo:
      if (f->lambda <= 1.0) return make_certificate(Verdict::Holds, "family threshold", analytic("W_lambda positive iff lambda <= 1"));
      return make_certificate(Verdict::Fails, "family threshold", rank_one_input_witness(phi, basis_vector(d, 0)));
    case FamilyName::PhiLambda:
      if (f->lambda >= -0.5) return make_certificate(Verdict::Holds, "family threshold", analytic("Phi_lambda positive iff lambda >= -1/2"));
      return make_certificate(Verdict::Fails, "family threshold", rank_one_input_witness(phi, basis_vector(d, 0)));
    case FamilyName::Schur: {
      double mn = min_eigenvalue(f->param, 1e-8 * std::max(1.0, f->param.cwiseAbs().maxCoeff()));
      if (mn >= 0) return make_certificate(Verdict::Holds, "family threshold", analytic("Schur multiplier with PSD A"));
      Vector u = Vector::Ones(d) / std::sqrt(static_cast<double>(d));
      return make_certificate(Verdict::Fails, "family threshold", rank_one_input_witness(phi, u));
    }
    case FamilyName::AdV:
    case FamilyName::Identity:
    case FamilyName::Transpose:
    case FamilyName::TraceMap:
      return make_certificate(Verdict::Holds, "family threshold", analytic(std::string(to_string(f->name)) + " is positive"));
    case FamilyName::DirectSum: {
      auto a = positivity_analytic(f->maps[0]);
      auto b = positivity_analytic(f->maps[1]);
      if (a && b && a->holds() && b->holds())
        return make_certificate(Verdict::Holds, "direct sum", analytic("both summands positive"));
      for (auto* s : {&a, &b})
        if (*s && (*s)->fails() && (*s)->evidence.vector.size() == d)
          return make_certificate(Verdict::Fails, "direct sum", rank_one_input_witness(phi, (*s)->evidence.vector));
      return std::nullopt;
    }
    case FamilyName::WernerModified: return std::nullopt;
  }
  return std::nullopt;
}

inline Certificate is_positive_map(const ChannelRep& phi, const Tolerance& tol) {
  if (auto a = positivity_analytic(phi)) {
    bool witnessed = a->evidence.value && *a->evidence.value < -tol.eps_psd;
    if (a->holds() || witnessed) return *a;
  }
  if (is_cp(phi, tol).holds())
    return make_certificate(Verdict::Holds, "complete positivity", analytic("PSD Choi matrix"));
  auto s = min_over_schmidt_rank(phi.choi().matrix, phi.dim_in(), phi.dim_out(), 1, tol);
  if (s.value < -tol.eps_psd) {
    auto sd = schmidt_decompose(s.psi, phi.dim_in(), phi.dim_out(), 1e-12);
    Vector u = sd.left.col(0).conjugate();
    Evidence ev = rank_one_input_witness(phi, u);
    if (ev.value && *ev.value < -tol.eps_psd) return make_certificate(Verdict::Fails, "product-vector search", ev);
  }
  Evidence ev;
  ev.value = s.value;
  ev.note = "no negative direction found after " + std::to_string(tol.restarts) + " restarts";
  return make_certificate(Verdict::Unknown, "product-vector search", ev);
}

// Principal block over `indices` in the basis F_ij = U E_ij U*.
inline Bipartite principal_block(const Bipartite& C, const std::vector<int>& indices,
                                 const std::optional<Matrix>& basisChange = std::nullopt) {
  const int d1 = C.dimA, d2 = C.dimB;
  for (size_t a = 0; a < indices.size(); ++a) {
    if (indices[a] < 0 || indices[a] >= d1) throw InputError("principal_block: index out of range");
    for (size_t b = 0; b < a; ++b)
      if (indices[a] == indices[b]) throw InputError("principal_block: indices must be distinct");
  }
  Matrix R = C.matrix;
  if (basisChange) {
    const Matrix& U = *basisChange;
    if (U.rows() != d1 || U.cols() != d1) throw InputError("principal_block: basis change must be d1 x d1");
    Matrix L = kron(Matrix(U.transpose()), identity(d2));
    R = L * C.matrix * L.adjoint();
  }
  const int k = static_cast<int>(indices.size());
  Matrix out(k * d2, k * d2);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) out.block(a * d2, b * d2, d2, d2) = R.block(indices[a] * d2, indices[b] * d2, d2, d2);
  return Bipartite(std::move(out), k, d2);
}

struct EquivarianceCheck {
  bool passed = false;
  std::string note;
};

// Looks for V with Phi o Ad_U = Ad_V o Phi for `trials` Haar-random unitaries U.
inline EquivarianceCheck equivariance_spot_check(const ChannelRep& phi, int trials, std::uint64_t seed) {
  const int d1 = phi.dim_in(), d2 = phi.dim_out();
  std::vector<Matrix> images;
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d1; ++j) images.push_back(phi.apply(matrix_unit(d1, d1, i, j)));
  double scale = 1.0;
  for (const auto& M : images) scale = std::max(scale, M.cwiseAbs().maxCoeff());
  Matrix F(d2 * d2, d1 * d1);
  for (int c = 0; c < d1 * d1; ++c) F.col(c) = Eigen::Map<const Vector>(images[c].data(), d2 * d2);
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed, 0xe9a1ULL + static_cast<std::uint64_t>(t));
    Matrix U = random_unitary(d1, rng);
    std::vector<Matrix> rotated;
    Matrix G(d2 * d2, d1 * d1);
    for (int i = 0; i < d1; ++i)
      for (int j = 0; j < d1; ++j) {
        Matrix Y = phi.apply(U.adjoint() * matrix_unit(d1, d1, i, j) * U);
        G.col(i * d1 + j) = Eigen::Map<const Vector>(Y.data(), d2 * d2);
        rotated.push_back(std::move(Y));
      }
    std::vector<Matrix> candidates;
    if (d1 == d2) candidates = {U, U.conjugate(), U.transpose(), U.adjoint()};
    Matrix L = G * F.completeOrthogonalDecomposition().pseudoInverse();
    Matrix CL = Matrix::Zero(d2 * d2, d2 * d2);
    for (int p = 0; p < d2; ++p)
      for (int q = 0; q < d2; ++q) {
        Matrix E = matrix_unit(d2, d2, p, q);
        Vector img = L * Eigen::Map<const Vector>(E.data(), d2 * d2);
        CL.block(p * d2, q * d2, d2, d2) = Eigen::Map<const Matrix>(img.data(), d2, d2);
      }
    Matrix CLh = (CL + CL.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(CLh);
    Vector top = es.eigenvectors().col(d2 * d2 - 1) * std::sqrt(std::max(0.0, es.eigenvalues()(d2 * d2 - 1)));
    Matrix Vc(d2, d2);
    for (int i = 0; i < d2; ++i)
      for (int k = 0; k < d2; ++k) Vc(i, k) = std::conj(top(i * d2 + k));
    candidates.push_back(Vc);
    bool found = false;
    for (const auto& V : candidates) {
      double err = 0.0;
      for (int c = 0; c < d1 * d1 && err <= 1e-8 * scale; ++c)
        err = std::max(err, (V.adjoint() * images[c] * V - rotated[c]).cwiseAbs().maxCoeff());
      if (err <= 1e-8 * scale) {
        found = true;
        break;
      }
    }
    if (!found) return {false, "no V found for random unitary #" + std::to_string(t)};
  }
  return {true, "equivariance spot-check passed on " + std::to_string(trials) + " random unitaries"};
}

// Principal k-block positivity; valid as a k-positivity test for equivariant maps.
inline Certificate equivariant_k_positive(const ChannelRep& phi, int k, const Tolerance& tol, int trials = 5) {
  if (k < 1) throw InputError("equivariant_k_positive: k must be positive");
  bool clamped = false;
  if (k > phi.dim_in()) {
    k = phi.dim_in();
    clamped = true;
  }
  auto eq = equivariance_spot_check(phi, trials, tol.seed);
  Certificate cert;
  if (!eq.passed) {
    cert = block_positivity(phi.choi(), k, tol);
    cert.notes.push_back("equivariance spot-check failed (" + eq.note + "); generic path used");
  } else {
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    Bipartite block = principal_block(phi.choi(), idx);
    cert = psd_certificate(block.matrix, tol, "principal block eigensolve");
    cert.notes.push_back(eq.note);
  }
  cert.clamped = clamped;
  if (clamped) cert.notes.push_back("k clamped to " + std::to_string(k));
  return cert;
}

inline Certificate k_positive(const ChannelRep& phi, int k, const Tolerance& tol) {
  if (k <= 1) return is_positive_map(phi, tol);
  return block_positivity(phi.choi(), k, tol);
}

}  // namespace keb
