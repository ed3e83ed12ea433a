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

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "keb/certificate.hpp"
#include "keb/channels.hpp"
#include "keb/core.hpp"
#include "keb/positivity.hpp"
#include "keb/random.hpp"
#include "keb/schmidt.hpp"
#include "keb/twirl.hpp"

namespace keb {

struct LocalCompression {
  Bipartite compressed;
  Matrix SA;  // dimA x rA isometry onto supp tr_2(X)
  Matrix SB;  // dimB x rB isometry onto supp tr_1(X)
};

// Restricts a PSD operator to the supports of its marginals.
inline LocalCompression compress_local_supports(const Bipartite& X) {
  Matrix SA = support_isometry(partial_trace(X, Side::Second), 1e-10);
  Matrix SB = support_isometry(partial_trace(X, Side::First), 1e-10);
  if (SA.cols() == 0 || SB.cols() == 0) return {X, identity(X.dimA), identity(X.dimB)};
  Matrix S = kron(SA, SB);
  Matrix Y = S.adjoint() * X.matrix * S;
  double scale = std::max(1.0, X.matrix.norm());
  if ((S * Y * S.adjoint() - X.matrix).norm() > 1e-9 * scale) return {X, identity(X.dimA), identity(X.dimB)};
  return {Bipartite((Y + Y.adjoint()) / 2.0, static_cast<int>(SA.cols()), static_cast<int>(SB.cols())), SA, SB};
}

inline Bipartite swap_factors(const Bipartite& X) {
  const int dA = X.dimA, dB = X.dimB;
  Matrix P = Matrix::Zero(dA * dB, dA * dB);
  for (int i = 0; i < dA; ++i)
    for (int k = 0; k < dB; ++k) P(k * dA + i, i * dB + k) = 1.0;
  return Bipartite(P * X.matrix * P.transpose(), dB, dA);
}

inline void require_psd_input(const Bipartite& X, const Tolerance& tol, const char* who) {
  double scale = std::max(1.0, X.matrix.cwiseAbs().maxCoeff());
  double mn = min_eigenvalue(X.matrix, tol.eps_herm * 100 * scale);
  if (mn < -tol.eps_psd * scale)
    throw InputError(std::string(who) + ": input is not PSD (min eigenvalue " + std::to_string(mn) + ")");
}

// Certified lower bound on <a (x) y|Z|a (x) y> over unit a in C^2, y in C^dB.
// M(r) is affine in the Bloch vector r, so lambda_min(M(r)) is concave; every unit r in a spherical
// triangle of the mesh lies in the hull of its vertices v_i and the scaled vertices v_i/h.
inline double qubit_product_lower_bound(const Matrix& Z, int dB, int levels = 4) {
  const Matrix Z00 = Z.block(0, 0, dB, dB), Z01 = Z.block(0, dB, dB, dB);
  const Matrix Z10 = Z.block(dB, 0, dB, dB), Z11 = Z.block(dB, dB, dB, dB);
  const cplx I(0, 1);
  auto lam = [&](const Eigen::Vector3d& r) {
    Matrix M = 0.5 * ((1 + r(2)) * Z00 + (1 - r(2)) * Z11 + (r(0) + I * r(1)) * Z01 + (r(0) - I * r(1)) * Z10);
    Eigen::SelfAdjointEigenSolver<Matrix> es((M + M.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  };
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                                    {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<std::array<int, 3>> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                       {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                       {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                       {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < levels; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      mid[key] = static_cast<int>(v.size()) - 1;
      return static_cast<int>(v.size()) - 1;
    };
    std::vector<std::array<int, 3>> g;
    for (const auto& tri : f) {
      int ab = midpoint(tri[0], tri[1]), bc = midpoint(tri[1], tri[2]), ca = midpoint(tri[2], tri[0]);
      g.push_back({tri[0], ab, ca});
      g.push_back({tri[1], bc, ab});
      g.push_back({tri[2], ca, bc});
      g.push_back({ab, bc, ca});
    }
    f = std::move(g);
  }
  std::vector<double> at(v.size());
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < v.size(); ++i) best = std::min(best, at[i] = lam(v[i]));
  for (const auto& tri : f) {
    Eigen::Vector3d n = (v[tri[1]] - v[tri[0]]).cross(v[tri[2]] - v[tri[0]]);
    double h = std::abs(n.normalized().dot(v[tri[0]]));
    for (int c = 0; c < 3; ++c) best = std::min(best, lam(v[tri[c]] / h));
  }
  return best - 1e-12 * std::max(1.0, Z.norm());
}

struct EdgeWitness {
  bool found = false;
  double value = 0.0;   // tr(W X) / tr(X)
  double epsilon = 0.0; // certified product minimum of P + Q^Gamma
  Matrix W;             // witness in the original coordinates
};

// Range-criterion witness W = P + Q^Gamma - eps I for operators with a qubit local support;
// P, Q are the kernel projectors of X and of its partial transpose.
inline EdgeWitness edge_witness(const Bipartite& X, const Tolerance& tol) {
  EdgeWitness out;
  LocalCompression lc = compress_local_supports(X);
  Bipartite Y = lc.compressed;
  bool swapped = false;
  if (Y.dimA != 2) {
    if (Y.dimB != 2) return out;
    Y = swap_factors(Y);
    swapped = true;
  }
  if (Y.dimB < 2) return out;
  auto kernel = [](const Matrix& H) {
    auto es = hermitian_eig(H, 1e-8 * std::max(1.0, H.cwiseAbs().maxCoeff()));
    const Eigen::Index n = es.values.size();
    double top = std::max(std::abs(es.values(0)), std::abs(es.values(n - 1)));
    Matrix K = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      if (es.values(i) <= 1e-9 * top) K += es.vectors.col(i) * es.vectors.col(i).adjoint();
    return K;
  };
  Matrix P = kernel(Y.matrix);
  Matrix Q = kernel(partial_transpose(Y, Side::Second).matrix);
  if (P.norm() == 0.0 && Q.norm() == 0.0) return out;
  Matrix Zm = P + partial_transpose(Bipartite(Q, 2, Y.dimB), Side::Second).matrix;
  Zm = (Zm + Zm.adjoint()) / 2.0;
  double eps = qubit_product_lower_bound(Zm, Y.dimB);
  if (eps <= 0.0) return out;
  Matrix Wc = Zm - eps * identity(Y.dim());
  Bipartite Wb(Wc, Y.dimA, Y.dimB);
  if (swapped) Wb = swap_factors(Wb);
  Matrix S = kron(lc.SA, lc.SB);
  Matrix W = S * Wb.matrix * S.adjoint();
  double tr = X.matrix.trace().real();
  double val = (W * X.matrix).trace().real() / std::max(tr, 1e-300);
  out.W = W;
  out.epsilon = eps;
  out.value = val;
  out.found = val < -tol.eps_psd;
  return out;
}

// Block positivity of W on product vectors, certified when some local support of W is a qubit.
inline bool certify_block_positive(const Bipartite& W) {
  Matrix H = (W.matrix + W.matrix.adjoint()) / 2.0;
  Matrix abs = Matrix::Zero(H.rows(), H.cols());
  auto es = hermitian_eig(H, 1e-8 * std::max(1.0, H.cwiseAbs().maxCoeff()));
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    abs += std::abs(es.values(i)) * es.vectors.col(i) * es.vectors.col(i).adjoint();
  LocalCompression lc = compress_local_supports(Bipartite(abs, W.dimA, W.dimB));
  Matrix S = kron(lc.SA, lc.SB);
  Bipartite Y(S.adjoint() * H * S, lc.compressed.dimA, lc.compressed.dimB);
  if (Y.dimA != 2) {
    if (Y.dimB != 2) return false;
    Y = swap_factors(Y);
  }
  return qubit_product_lower_bound(Y.matrix, Y.dimB) >= 0.0;
}

inline Matrix sep_inequality_operator(const Bipartite& X, double lambda, Side side) {
  const int d = X.dimA;
  if (side == Side::First)
    return lambda * X.matrix + lambda * partial_transpose(X, Side::First).matrix +
           kron(identity(d), partial_trace(X, Side::First));
  return lambda * X.matrix + lambda * partial_transpose(X, Side::Second).matrix +
         kron(partial_trace(X, Side::Second), identity(d));
}

inline std::string sep_inequality_tag(double lambda, Side side) {
  return "lambda=" + std::to_string(lambda) + (side == Side::First ? ", (T(x)id) form" : ", (id(x)T) form");
}

inline Certificate sep_necessary_inequality(const Bipartite& X, double lambda, Side side, const Tolerance& tol) {
  if (X.dimA != X.dimB) throw InputError("sep_necessary_inequality: factors must have equal dimension");
  if (lambda < -0.5) throw InputError("sep_necessary_inequality: lambda must be >= -1/2");
  require_psd_input(X, tol, "sep_necessary_inequality");
  Certificate c = psd_certificate(sep_inequality_operator(X, lambda, side), tol, "separability inequality");
  c.evidence.note = sep_inequality_tag(lambda, side);
  return c;
}

inline const std::vector<double>& default_lambda_grid() {
  static const std::vector<double> g = {-0.5, 0.0, 1.0, 10.0};
  return g;
}

inline Certificate sep_refute(const Bipartite& X, const Tolerance& tol) {
  require_psd_input(X, tol, "sep_refute");
  std::vector<std::string> margins;
  Certificate ppt = psd_certificate(partial_transpose(X, Side::Second).matrix, tol, "PPT");
  if (ppt.fails()) {
    ppt.evidence.note = "partial transpose has a negative eigenvalue";
    return ppt;
  }
  margins.push_back("PPT min eigenvalue " + std::to_string(*ppt.evidence.value));

  const double tr = X.matrix.trace().real();
  const double real_val = nuclear_norm(realignment(X)) - tr;
  if (real_val > tol.eps_psd * std::max(1.0, tr)) {
    Evidence ev;
    ev.kind = EvidenceKind::Realignment;
    ev.value = real_val;
    ev.note = "realigned nuclear norm exceeds trace";
    return make_certificate(Verdict::Fails, "realignment", ev);
  }
  margins.push_back("realignment margin " + std::to_string(real_val));

  if (X.dimA == X.dimB && X.dimA >= 2) {
    for (double lambda : default_lambda_grid())
      for (Side side : {Side::First, Side::Second}) {
        Certificate c = sep_necessary_inequality(X, lambda, side, tol);
        if (c.fails()) {
          c.method = "separability inequality";
          return c;
        }
        margins.push_back(c.evidence.note + " min eigenvalue " + std::to_string(*c.evidence.value));
      }
  }

  EdgeWitness ew = edge_witness(X, tol);
  if (ew.found) {
    Evidence ev;
    ev.kind = EvidenceKind::WitnessOperator;
    ev.value = ew.value;
    ev.matrix = ew.W;
    ev.note = "range-criterion witness, certified product minimum " + std::to_string(ew.epsilon);
    return make_certificate(Verdict::Fails, "edge witness", ev);
  }

  Certificate out = make_certificate(Verdict::Unknown, "refutation battery");
  out.notes = std::move(margins);
  return out;
}

// Re-evaluates a FAILS certificate from sep_refute against X.
inline bool reverify_refutation(const Bipartite& X, const Certificate& c, const Tolerance& tol) {
  if (!c.fails()) return false;
  const double tr = X.matrix.trace().real();
  switch (c.evidence.kind) {
    case EvidenceKind::Eigenpair: {
      const Vector& v = c.evidence.vector;
      if (v.size() != X.dim()) return false;
      Matrix op;
      if (c.method == "PPT") {
        op = partial_transpose(X, Side::Second).matrix;
      } else if (c.method == "separability inequality") {
        for (double lambda : default_lambda_grid())
          for (Side side : {Side::First, Side::Second})
            if (sep_inequality_tag(lambda, side) == c.evidence.note) op = sep_inequality_operator(X, lambda, side);
        if (op.size() == 0) return false;
      } else {
        return false;
      }
      Vector u = v / v.norm();
      return (u.adjoint() * op * u)(0, 0).real() < -tol.eps_psd;
    }
    case EvidenceKind::Realignment:
      return nuclear_norm(realignment(X)) - tr > tol.eps_psd * std::max(1.0, tr);
    case EvidenceKind::WitnessOperator: {
      const Matrix& W = c.evidence.matrix;
      if (W.rows() != X.dim()) return false;
      if (!certify_block_positive(Bipartite(W, X.dimA, X.dimB))) return false;
      return (W * X.matrix).trace().real() / std::max(tr, 1e-300) < -tol.eps_psd;
    }
    default: return false;
  }
}

inline Certificate eb_necessary(const ChannelRep& phi, const std::vector<double>& grid, const Tolerance& tol) {
  if (phi.dim_in() != phi.dim_out()) throw InputError("eb_necessary: map must be square");
  const Bipartite& C = phi.choi();
  const int d = phi.dim_in();
  const Matrix CT1 = partial_transpose(C, Side::First).matrix;   // Choi of Phi o T
  const Matrix CT2 = partial_transpose(C, Side::Second).matrix;  // Choi of T o Phi
  const Matrix PhiI = partial_trace(C, Side::First);
  const Matrix tr2 = partial_trace(C, Side::Second);
  std::vector<std::string> notes;
  for (double lambda : grid) {
    if (lambda < -0.5) throw InputError("eb_necessary: grid values must be >= -1/2");
    Matrix op1 = kron(identity(d), PhiI) + lambda * (C.matrix + CT1);
    Matrix op2 = kron(tr2, identity(d)) + lambda * (C.matrix + CT2);
    for (int form = 0; form < 2; ++form) {
      Certificate c = psd_certificate(form == 0 ? op1 : op2, tol, "EB necessary inequality");
      std::string tag = "lambda=" + std::to_string(lambda) + (form == 0 ? ", I(x)Phi(I) form" : ", tr_2(C)(x)I form");
      if (c.fails()) {
        c.evidence.note = tag;
        return c;
      }
      notes.push_back(tag + " min eigenvalue " + std::to_string(*c.evidence.value));
    }
  }
  Certificate out = make_certificate(Verdict::Holds, "EB necessary inequality", analytic("all grid points pass"));
  out.notes = std::move(notes);
  return out;
}

namespace detail {

// min 1/2 w'Gw - h'w subject to w >= 0 (Lawson-Hanson active set on the normal equations).
inline Eigen::VectorXd nnls_gram(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, int maxIter = 500) {
  const Eigen::Index n = h.size();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  const double tolg = 1e-14 * std::max(1.0, h.cwiseAbs().maxCoeff());
  for (int outer = 0; outer < maxIter; ++outer) {
    Eigen::VectorXd g = h - G * w;
    Eigen::Index j = -1;
    double gmax = tolg;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!passive[i] && g(i) > gmax) {
        gmax = g(i);
        j = i;
      }
    if (j < 0) break;
    passive[j] = true;
    for (int inner = 0; inner < maxIter; ++inner) {
      std::vector<Eigen::Index> P;
      for (Eigen::Index i = 0; i < n; ++i)
        if (passive[i]) P.push_back(i);
      Eigen::MatrixXd GP(P.size(), P.size());
      Eigen::VectorXd hP(P.size());
      for (size_t a = 0; a < P.size(); ++a) {
        hP(a) = h(P[a]);
        for (size_t b = 0; b < P.size(); ++b) GP(a, b) = G(P[a], P[b]);
      }
      Eigen::VectorXd s = GP.ldlt().solve(hP);
      bool ok = true;
      for (Eigen::Index a = 0; a < s.size(); ++a)
        if (!(s(a) > 0)) ok = false;
      if (ok) {
        w.setZero();
        for (size_t a = 0; a < P.size(); ++a) w(P[a]) = s(a);
        break;
      }
      double alpha = 1.0;
      for (size_t a = 0; a < P.size(); ++a)
        if (!(s(a) > 0)) {
          double wi = w(P[a]);
          double den = wi - s(a);
          if (den > 0) alpha = std::min(alpha, wi / den);
        }
      for (size_t a = 0; a < P.size(); ++a) w(P[a]) += alpha * (s(a) - w(P[a]));
      for (size_t a = 0; a < P.size(); ++a)
        if (w(P[a]) <= 1e-300) {
          w(P[a]) = 0.0;
          passive[P[a]] = false;
        }
    }
  }
  return w;
}

struct ProductAtom {
  Vector x, y;
};

// Alternating top-eigenvector ascent for max <x (x) y|R|x (x) y> from the start y.
inline ProductAtom ascend_product(const Matrix& R, int dA, int dB, Vector y, double* value, int maxIter = 200) {
  Vector x;
  double val = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < maxIter; ++it) {
    Matrix Iy = kron(identity(dA), Matrix(y));
    Matrix Rx = Iy.adjoint() * R * Iy;
    Eigen::SelfAdjointEigenSolver<Matrix> e1((Rx + Rx.adjoint()) / 2.0);
    x = e1.eigenvectors().col(dA - 1);
    Matrix xI = kron(Matrix(x), identity(dB));
    Matrix Ry = xI.adjoint() * R * xI;
    Eigen::SelfAdjointEigenSolver<Matrix> e2((Ry + Ry.adjoint()) / 2.0);
    y = e2.eigenvectors().col(dB - 1);
    double nv = e2.eigenvalues()(dB - 1);
    if (nv - val < 1e-15 * std::max(1.0, std::abs(nv))) {
      val = nv;
      break;
    }
    val = nv;
  }
  *value = val;
  return {x, y};
}

inline ProductAtom best_product(const Matrix& R, int dA, int dB, Rng& rng, int restarts, double* value) {
  ProductAtom best;
  double bestVal = -std::numeric_limits<double>::infinity();
  auto es = hermitian_eig(R, 1e-6 * std::max(1.0, R.cwiseAbs().maxCoeff()));
  for (int r = 0; r < restarts; ++r) {
    Vector y;
    if (r < 2) {
      auto sd = schmidt_decompose(es.vectors.col(r % es.vectors.cols()), dA, dB, 1e-12);
      y = sd.right.col(0);
    } else {
      y = random_unit_vector(dB, rng);
    }
    double val = 0.0;
    ProductAtom a = ascend_product(R, dA, dB, y, &val);
    if (val > bestVal) {
      bestVal = val;
      best = std::move(a);
    }
  }
  *value = bestVal;
  return best;
}

// Levenberg-Marquardt on Y = sum_i (a_i (x) b_i)(a_i (x) b_i)*. When Y is rank deficient the
// off-range components Q v_i (Q = I - range projector) are appended to the residual.
// Returns the final Frobenius residual of Y; a and b are updated in place.
inline double refine_products(const Matrix& Y, int dA, int dB, std::vector<Vector>& a, std::vector<Vector>& b,
                              double target, int maxIter = 60, const Matrix& Q = Matrix()) {
  const int n = dA * dB;
  const int terms = static_cast<int>(a.size());
  const int params = 2 * terms * (dA + dB);
  const bool useQ = Q.size() > 0;
  const int rows = n * n + (useQ ? 2 * n * terms : 0);
  auto flatten = [&](const Matrix& H, Eigen::VectorXd& r) {
    int idx = 0;
    for (int i = 0; i < n; ++i) {
      r(idx++) = H(i, i).real();
      for (int j = i + 1; j < n; ++j) {
        r(idx++) = std::sqrt(2.0) * H(i, j).real();
        r(idx++) = std::sqrt(2.0) * H(i, j).imag();
      }
    }
  };
  auto evaluate = [&](const std::vector<Vector>& A, const std::vector<Vector>& B, double* fnorm) {
    Matrix F = -Y;
    Eigen::VectorXd r = Eigen::VectorXd::Zero(rows);
    for (int t = 0; t < terms; ++t) {
      Vector v = kron(A[t], B[t]);
      F += v * v.adjoint();
      if (useQ) {
        Vector q = Q * v;
        for (int i = 0; i < n; ++i) {
          r(n * n + 2 * n * t + 2 * i) = q(i).real();
          r(n * n + 2 * n * t + 2 * i + 1) = q(i).imag();
        }
      }
    }
    Eigen::VectorXd head(n * n);
    flatten(F, head);
    r.head(n * n) = head;
    *fnorm = F.norm();
    return r;
  };
  double norm = 0.0;
  Eigen::VectorXd r = evaluate(a, b, &norm);
  double mu = 1e-3 * std::max(1e-12, r.squaredNorm());
  Eigen::VectorXd col(n * n);
  for (int it = 0; it < maxIter && norm > target; ++it) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(rows, params);
    int c = 0;
    for (int t = 0; t < terms; ++t) {
      Vector v = kron(a[t], b[t]);
      for (int side = 0; side < 2; ++side) {
        const int len = side == 0 ? dA : dB;
        for (int p = 0; p < len; ++p)
          for (cplx unit : {cplx(1, 0), cplx(0, 1)}) {
            Vector dv = side == 0 ? kron(Vector(unit * basis_vector(dA, p)), b[t])
                                  : kron(a[t], Vector(unit * basis_vector(dB, p)));
            Matrix dF = dv * v.adjoint();
            flatten(dF + dF.adjoint(), col);
            J.col(c).head(n * n) = col;
            if (useQ) {
              Vector dq = Q * dv;
              for (int i = 0; i < n; ++i) {
                J(n * n + 2 * n * t + 2 * i, c) = dq(i).real();
                J(n * n + 2 * n * t + 2 * i + 1, c) = dq(i).imag();
              }
            }
            ++c;
          }
      }
    }
    const bool wide = rows <= params;
    const Eigen::MatrixXd N = wide ? Eigen::MatrixXd(J * J.transpose()) : Eigen::MatrixXd(J.transpose() * J);
    const Eigen::VectorXd g = J.transpose() * r;
    bool accepted = false;
    for (int tries = 0; tries < 12 && !accepted; ++tries) {
      Eigen::MatrixXd M = N;
      M.diagonal().array() += mu;
      Eigen::VectorXd step = wide ? Eigen::VectorXd(-J.transpose() * M.ldlt().solve(r)) : Eigen::VectorXd(-M.ldlt().solve(g));
      std::vector<Vector> a2 = a, b2 = b;
      int k = 0;
      for (int t = 0; t < terms; ++t) {
        for (int p = 0; p < dA; ++p, k += 2) a2[t](p) += cplx(step(k), step(k + 1));
        for (int p = 0; p < dB; ++p, k += 2) b2[t](p) += cplx(step(k), step(k + 1));
      }
      double n2 = 0.0;
      Eigen::VectorXd r2 = evaluate(a2, b2, &n2);
      if (r2.squaredNorm() < r.squaredNorm()) {
        a = std::move(a2);
        b = std::move(b2);
        r = std::move(r2);
        norm = n2;
        mu = std::max(mu / 10.0, 1e-30);
        accepted = true;
      } else {
        mu *= 10.0;
      }
    }
    if (!accepted) break;
  }
  return norm;
}

}  // namespace detail

struct PursuitResult {
  SeparableDecomposition decomposition;
  bool converged = false;
  int iterations = 0;
};

// Fully corrective greedy product pursuit: add the best product atom for the current residual,
// then re-fit all weights by NNLS.
inline PursuitResult matching_pursuit(const Bipartite& X, const Tolerance& tol, int maxTerms = 500) {
  PursuitResult out;
  const int dA = X.dimA, dB = X.dimB;
  const double tr = X.matrix.trace().real();
  if (tr <= 0) return out;
  const Matrix Y = X.matrix / tr;
  const double target = tol.eps_sep / tr;
  std::vector<detail::ProductAtom> atoms;
  std::vector<Vector> vecs;
  Eigen::VectorXd w;
  Matrix R = Y;
  Rng rng(tol.seed, 0xb5aULL);
  // A separable X only contains product vectors from its range, so atoms are pulled onto it.
  const Matrix S = support_isometry(Y, 1e-10);
  const bool deficient = S.cols() < Y.rows();
  const Matrix P = S * S.adjoint();
  int refineBudget = 4;
  for (int it = 0; it < 4 * maxTerms; ++it) {
    out.iterations = it + 1;
    double gain = 0.0;
    auto atom = detail::best_product(R, dA, dB, rng, 6, &gain);
    if (gain <= 1e-16) break;
    if (deficient) {
      double inRange = 0.0;
      auto polished = detail::ascend_product(P, dA, dB, atom.y, &inRange, 2000);
      if (inRange >= 1.0 - 1e-13) {
        atoms.push_back(polished);
        vecs.push_back(kron(polished.x, polished.y));
      }
    }
    atoms.push_back(atom);
    vecs.push_back(kron(atom.x, atom.y));
    const Eigen::Index n = static_cast<Eigen::Index>(atoms.size());
    Eigen::MatrixXd G(n, n);
    Eigen::VectorXd h(n);
    for (Eigen::Index a = 0; a < n; ++a) {
      h(a) = (vecs[a].adjoint() * Y * vecs[a])(0, 0).real();
      for (Eigen::Index b = 0; b <= a; ++b) G(a, b) = G(b, a) = std::norm(vecs[a].dot(vecs[b]));
    }
    w = detail::nnls_gram(G, h);
    std::vector<detail::ProductAtom> keptA;
    std::vector<Vector> keptV;
    std::vector<double> keptW;
    for (Eigen::Index a = 0; a < n; ++a)
      if (w(a) > 0) {
        keptA.push_back(atoms[a]);
        keptV.push_back(vecs[a]);
        keptW.push_back(w(a));
      }
    atoms = std::move(keptA);
    vecs = std::move(keptV);
    w = Eigen::Map<Eigen::VectorXd>(keptW.data(), keptW.size());
    R = Y;
    for (size_t a = 0; a < vecs.size(); ++a) R -= w(a) * vecs[a] * vecs[a].adjoint();
    if (R.norm() <= target) {
      out.converged = true;
      break;
    }
    const bool last = static_cast<int>(atoms.size()) >= maxTerms || it + 1 == 4 * maxTerms;
    const bool small = static_cast<int>(atoms.size()) <= 3 * dA * dB;
    if ((it % 25 == 24 || last) && small && refineBudget > 0 && R.norm() < 1e-2) {
      --refineBudget;
      std::vector<Vector> A, B;
      for (size_t a = 0; a < atoms.size(); ++a) {
        A.push_back(std::sqrt(w(a)) * atoms[a].x);
        B.push_back(atoms[a].y);
      }
      if (detail::refine_products(Y, dA, dB, A, B, 0.5 * target, 200, deficient ? Matrix(identity(Y.rows()) - P) : Matrix()) <= target) {
        for (size_t a = 0; a < atoms.size(); ++a) {
          const double na = A[a].norm(), nb = B[a].norm();
          w(a) = na * na * nb * nb;
          atoms[a] = {A[a] / na, B[a] / nb};
          vecs[a] = kron(atoms[a].x, atoms[a].y);
        }
        R = Y;
        for (size_t a = 0; a < vecs.size(); ++a) R -= w(a) * vecs[a] * vecs[a].adjoint();
        out.converged = true;
        break;
      }
    }
    if (last) break;
  }
  SeparableDecomposition dec;
  for (size_t a = 0; a < atoms.size(); ++a)
    dec.terms.push_back({tr * w(a) * atoms[a].x * atoms[a].x.adjoint(), atoms[a].y * atoms[a].y.adjoint()});
  dec.residual = tr * R.norm();
  out.converged = dec.residual <= tol.eps_sep;
  out.decomposition = std::move(dec);
  return out;
}

inline double decomposition_residual(const Bipartite& X, const SeparableDecomposition& dec) {
  Matrix S = Matrix::Zero(X.dim(), X.dim());
  for (const auto& [A, B] : dec.terms) S += kron(A, B);
  if (!dec.twirled.empty()) S += twirled_decomposition_operator(dec, X.dimA);
  return (X.matrix - S).norm();
}

// Recomputes the residual independently and checks every factor is PSD.
inline bool verify_decomposition(const Bipartite& X, const SeparableDecomposition& dec, const Tolerance& tol) {
  for (const auto& [A, B] : dec.terms) {
    if (A.rows() != X.dimA || B.rows() != X.dimB) return false;
    if (!is_psd(A, tol) || !is_psd(B, tol)) return false;
  }
  for (const auto& t : dec.twirled)
    if (!(t.weight >= 0)) return false;
  return decomposition_residual(X, dec) <= tol.eps_sep;
}

inline std::optional<Certificate> product_operator_route(const Bipartite& X, const Tolerance& tol) {
  auto s = svd(realignment(X));
  if (s.singular(0) <= 0) return std::nullopt;
  if (s.singular.size() > 1 && s.singular(1) > 1e-12 * s.singular(0)) return std::nullopt;
  const int dA = X.dimA, dB = X.dimB;
  Matrix A(dA, dA), B(dB, dB);
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dA; ++j) A(i, j) = s.U(i * dA + j, 0);
  for (int k = 0; k < dB; ++k)
    for (int l = 0; l < dB; ++l) B(k, l) = s.singular(0) * std::conj(s.V(k * dB + l, 0));
  cplx tA = A.trace();
  if (std::abs(tA) < 1e-12) return std::nullopt;
  cplx ph = tA / std::abs(tA);
  A /= ph;
  B *= ph;
  A = (A + A.adjoint()).eval() / 2.0;
  B = (B + B.adjoint()).eval() / 2.0;
  if (B.trace().real() < 0) {
    A = -A;
    B = -B;
  }
  if (!is_psd(A, tol) || !is_psd(B, tol)) return std::nullopt;
  SeparableDecomposition dec;
  dec.terms.push_back({A, B});
  dec.residual = decomposition_residual(X, dec);
  if (dec.residual > tol.eps_sep) return std::nullopt;
  Evidence ev;
  ev.kind = EvidenceKind::Decomposition;
  ev.value = dec.residual;
  ev.note = "operator Schmidt rank one";
  Certificate c = make_certificate(Verdict::Holds, "product operator", ev);
  c.decomposition = std::move(dec);
  return c;
}

struct SepCertifyOptions {
  int twirlSamplePoints = 2000;
  int maxTerms = 500;
  bool allowPursuit = true;
};

inline Certificate sep_certify(const Bipartite& X, const Tolerance& tol, const SepCertifyOptions& opt = {}) {
  require_psd_input(X, tol, "sep_certify");
  std::vector<std::string> notes;

  if (auto c = product_operator_route(X, tol)) return *c;

  LocalCompression lc = compress_local_supports(X);
  const int rA = lc.compressed.dimA, rB = lc.compressed.dimB;
  if (rA * rB <= 6) {
    Certificate ppt = psd_certificate(partial_transpose(X, Side::Second).matrix, tol, "PPT");
    if (ppt.holds()) {
      Certificate c = make_certificate(
          Verdict::Holds, "Peres-Horodecki exact",
          analytic("PPT with local supports " + std::to_string(rA) + "x" + std::to_string(rB) + " (product <= 6)"));
      c.analytic_without_decomposition = true;
      return c;
    }
    notes.push_back("not PPT on a <= 6 dimensional local support");
  }

  if (X.dimA == X.dimB && X.dimA >= 2) {
    auto tp = twirl_project(X, tol.eps_herm * 100 * std::max(1.0, X.matrix.cwiseAbs().maxCoeff()));
    if ((tp.projected.matrix - X.matrix).norm() <= 1e-9 * std::max(1.0, X.matrix.norm())) {
      Certificate c = twirl_cone_membership(tp.coeffs, X.dimA, opt.twirlSamplePoints, tol.seed, tol.eps_sep, tol);
      if (c.holds()) return c;
      notes.push_back("twirl-cone route: " + c.method + " " + to_string(c.verdict));
    }
  }

  if (opt.allowPursuit) {
    PursuitResult pr = matching_pursuit(lc.compressed, tol, opt.maxTerms);
    SeparableDecomposition dec;
    for (const auto& [A, B] : pr.decomposition.terms)
      dec.terms.push_back({lc.SA * A * lc.SA.adjoint(), lc.SB * B * lc.SB.adjoint()});
    dec.residual = decomposition_residual(X, dec);
    if (dec.residual <= tol.eps_sep) {
      Evidence ev;
      ev.kind = EvidenceKind::Decomposition;
      ev.value = dec.residual;
      ev.note = std::to_string(dec.terms.size()) + " product terms";
      Certificate c = make_certificate(Verdict::Holds, "product pursuit", ev);
      c.decomposition = std::move(dec);
      return c;
    }
    notes.push_back("product pursuit residual " + std::to_string(dec.residual) + " after " +
                    std::to_string(pr.iterations) + " iterations");
  }
  Certificate out = make_certificate(Verdict::Unknown, "certification routes exhausted");
  out.notes = std::move(notes);
  return out;
}

}  // namespace keb
