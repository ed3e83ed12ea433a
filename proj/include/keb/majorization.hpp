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

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "keb/certificate.hpp"
#include "keb/channels.hpp"
#include "keb/core.hpp"
#include "keb/entanglement_breaking.hpp"
#include "keb/lp.hpp"
#include "keb/positivity.hpp"

namespace keb {

constexpr double kMajorizationSlack = 1e-9;

class SpectrumVector {
 public:
  SpectrumVector() = default;
  explicit SpectrumVector(std::vector<double> v) : values_(std::move(v)) {
    std::sort(values_.begin(), values_.end(), std::greater<double>());
  }

  static SpectrumVector of(const Matrix& H) {
    auto es = hermitian_eig(H, 1e-8 * std::max(1.0, H.cwiseAbs().maxCoeff()));
    return SpectrumVector(std::vector<double>(es.values.data(), es.values.data() + es.values.size()));
  }

  const std::vector<double>& values() const { return values_; }
  size_t size() const { return values_.size(); }

  SpectrumVector padded(size_t n) const {
    SpectrumVector out = *this;
    if (out.values_.size() < n) out.values_.resize(n, 0.0);
    return out;
  }

  SpectrumVector scaled(double s) const {
    std::vector<double> v = values_;
    for (double& x : v) x *= s;
    return SpectrumVector(std::move(v));
  }

 private:
  std::vector<double> values_;
};

// x <_w y: every descending prefix sum of x is at most that of y.
inline Certificate weakly_majorizes(const SpectrumVector& y, const SpectrumVector& x) {
  const size_t n = std::max(x.size(), y.size());
  const auto xs = x.padded(n).values(), ys = y.padded(n).values();
  double sx = 0.0, sy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    if (sx > sy + kMajorizationSlack) {
      Evidence ev;
      ev.kind = EvidenceKind::PrefixIndex;
      ev.value = sx - sy;
      ev.lo = static_cast<double>(i + 1);
      ev.note = "prefix " + std::to_string(i + 1) + " violated by " + std::to_string(sx - sy);
      return make_certificate(Verdict::Fails, "weak majorization", ev);
    }
  }
  return make_certificate(Verdict::Holds, "weak majorization", analytic("all prefix sums dominated"));
}

inline Certificate majorizes(const SpectrumVector& y, const SpectrumVector& x) {
  Certificate w = weakly_majorizes(y, x);
  if (!w.holds()) return w;
  double sx = 0.0, sy = 0.0;
  for (double v : x.values()) sx += v;
  for (double v : y.values()) sy += v;
  if (std::abs(sx - sy) > kMajorizationSlack) {
    Evidence ev;
    ev.kind = EvidenceKind::PrefixIndex;
    ev.value = sx - sy;
    ev.lo = static_cast<double>(std::max(x.size(), y.size()));
    ev.note = "total sums differ by " + std::to_string(sx - sy);
    return make_certificate(Verdict::Fails, "majorization", ev);
  }
  return make_certificate(Verdict::Holds, "majorization", analytic("weak majorization with equal sums"));
}

inline Certificate doubly_substochastic_check(const Matrix& D, double eps_imag = 1e-12) {
  if (D.rows() != D.cols()) throw InputError("doubly_substochastic_check: matrix must be square");
  if (D.imag().cwiseAbs().maxCoeff() > eps_imag)
    throw InputError("doubly_substochastic_check: entries must be real");
  const Eigen::MatrixXd R = D.real();
  const double slack = 1e-12;
  auto fail = [](const std::string& n) {
    Evidence ev;
    ev.note = n;
    return make_certificate(Verdict::Fails, "doubly substochastic", ev);
  };
  for (Eigen::Index i = 0; i < R.rows(); ++i)
    for (Eigen::Index j = 0; j < R.cols(); ++j)
      if (R(i, j) < -slack) return fail("negative entry at (" + std::to_string(i) + "," + std::to_string(j) + ")");
  for (Eigen::Index i = 0; i < R.rows(); ++i) {
    if (R.row(i).sum() > 1 + slack) return fail("row " + std::to_string(i) + " sums to " + std::to_string(R.row(i).sum()));
    if (R.col(i).sum() > 1 + slack) return fail("column " + std::to_string(i) + " sums to " + std::to_string(R.col(i).sum()));
  }
  return make_certificate(Verdict::Holds, "doubly substochastic", analytic("nonnegative with row and column sums <= 1"));
}

// Doubly substochastic D with x = D y, or nullopt.
inline std::optional<Eigen::MatrixXd> substochastic_solution(const SpectrumVector& x, const SpectrumVector& y) {
  const size_t n = std::max(x.size(), y.size());
  const auto xs = x.padded(n).values(), ys = y.padded(n).values();
  const Eigen::Index N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd Aeq = Eigen::MatrixXd::Zero(N, N * N), Ale = Eigen::MatrixXd::Zero(2 * N, N * N);
  Eigen::VectorXd beq(N), ble = Eigen::VectorXd::Ones(2 * N);
  for (Eigen::Index i = 0; i < N; ++i) {
    beq(i) = xs[i];
    for (Eigen::Index j = 0; j < N; ++j) {
      Aeq(i, i * N + j) = ys[j];
      Ale(i, i * N + j) = 1.0;
      Ale(N + j, i * N + j) = 1.0;
    }
  }
  auto sol = lp_feasible(Aeq, beq, Ale, ble);
  if (!sol) return std::nullopt;
  Eigen::MatrixXd D(N, N);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j) D(i, j) = (*sol)(i * N + j);
  return D;
}

struct MajorizationReport {
  Certificate verdict;
  Certificate first;   // against tr_1
  Certificate second;  // against tr_2
  int factor = 1;
};

inline MajorizationReport keb_majorization_check(const ChannelRep& phi, int k, const Tolerance& tol) {
  if (phi.dim_in() != phi.dim_out()) throw InputError("keb_majorization_check: map must be square");
  const int d = phi.dim_in();
  if (k < 1 || k > d) throw InputError("keb_majorization_check: requires 1 <= k <= d");
  if (!keb_certify(phi, k, tol).verdict.holds())
    throw InputError("keb_majorization_check: map is not certified k-EB");
  const Bipartite& C = phi.choi();
  MajorizationReport r;
  r.factor = d - k + 1;
  SpectrumVector sc = SpectrumVector::of(C.matrix);
  r.first = weakly_majorizes(SpectrumVector::of(partial_trace(C, Side::First)).scaled(r.factor), sc);
  r.second = weakly_majorizes(SpectrumVector::of(partial_trace(C, Side::Second)).scaled(r.factor), sc);
  Verdict v = r.first.holds() && r.second.holds() ? Verdict::Holds : Verdict::Fails;
  Evidence ev = r.first.holds() ? r.second.evidence : r.first.evidence;
  if (v == Verdict::Holds) ev = analytic("factor " + std::to_string(r.factor) + " against both marginals");
  r.verdict = make_certificate(v, "k-EB majorization", ev);
  return r;
}

// Restricts the first factor to the support of tr_2(X).
inline Bipartite compress_first_support(const Bipartite& X) {
  Matrix S = support_isometry(partial_trace(X, Side::Second), 1e-10);
  if (S.cols() == 0 || S.cols() == X.dimA) return X;
  Matrix L = kron(S, identity(X.dimB));
  return Bipartite(L.adjoint() * X.matrix * L, static_cast<int>(S.cols()), X.dimB);
}

inline Bipartite compress_second_support(const Bipartite& X) {
  Matrix S = support_isometry(partial_trace(X, Side::First), 1e-10);
  if (S.cols() == 0 || S.cols() == X.dimB) return X;
  Matrix L = kron(identity(X.dimA), S);
  return Bipartite(L.adjoint() * X.matrix * L, X.dimA, static_cast<int>(S.cols()));
}

struct ConditionalMajorization {
  Certificate hypothesis;   // tr_2(X) (x) I - X/k >= 0
  Certificate conclusion;   // sigma(X) <_w k sigma(tr_2 X); UNKNOWN when the hypothesis fails
  Certificate hypothesis1;  // I (x) tr_1(X) - X/k >= 0
  Certificate conclusion1;
};

inline ConditionalMajorization conditional_majorization_check(const Bipartite& X, int k, const Tolerance& tol) {
  if (X.dimA != X.dimB) throw InputError("conditional_majorization_check: factors must have equal dimension");
  if (k < 1) throw InputError("conditional_majorization_check: k must be positive");
  require_psd_input(X, tol, "conditional_majorization_check");
  ConditionalMajorization out;
  SpectrumVector sx = SpectrumVector::of(X.matrix);
  auto run = [&](Side side, Certificate& hyp, Certificate& con) {
    Bipartite Y = side == Side::Second ? compress_first_support(X) : compress_second_support(X);
    hyp = psd_certificate(reduction_probe(Y, k, side), tol, "conditional hypothesis");
    const Matrix marg = partial_trace(X, side);
    Certificate c = weakly_majorizes(SpectrumVector::of(marg).scaled(k), sx);
    if (hyp.holds()) {
      con = c;
    } else {
      con = make_certificate(Verdict::Unknown, "conditional conclusion", analytic("hypothesis not satisfied"));
      con.notes.push_back(std::string("unconditional comparison: ") + to_string(c.verdict));
    }
  };
  run(Side::Second, out.hypothesis, out.conclusion);
  run(Side::First, out.hypothesis1, out.conclusion1);
  return out;
}

}  // namespace keb
