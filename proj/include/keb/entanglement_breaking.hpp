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

#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "keb/certificate.hpp"
#include "keb/channels.hpp"
#include "keb/core.hpp"
#include "keb/positivity.hpp"
#include "keb/random.hpp"
#include "keb/schmidt.hpp"
#include "keb/separability.hpp"

namespace keb {

enum class Route {
  None,
  CompositionWitness,
  ProjectionWitness,
  PrincipalBlock,
  FamilyThreshold,
  NormSufficient,
  DirectSum,
  DualPairing,
  PptShortcut
};

inline const char* to_string(Route r) {
  switch (r) {
    case Route::None: return "None";
    case Route::CompositionWitness: return "CompositionWitness";
    case Route::ProjectionWitness: return "ProjectionWitness";
    case Route::PrincipalBlock: return "PrincipalBlock";
    case Route::FamilyThreshold: return "FamilyThreshold";
    case Route::NormSufficient: return "NormSufficient";
    case Route::DirectSum: return "DirectSum";
    case Route::DualPairing: return "DualPairing";
    case Route::PptShortcut: return "PptShortcut";
  }
  return "None";
}

struct KebReport {
  int k = 0;
  Certificate verdict;
  Route route = Route::None;
  std::string details;
  // Kraus operators (k x d1) of the map Psi: M_k -> M_d1 behind a FAILS verdict.
  std::vector<Matrix> witness;
  std::optional<Certificate> composite;  // refutation of the Choi matrix of Phi o Psi
};

struct RefuteOptions {
  int bases = 20;
  int randomMaps = 10;
  int randomRankK = 10;
};

namespace detail {

inline std::vector<Matrix> pad_rows(const std::vector<Matrix>& kraus, int rows) {
  std::vector<Matrix> out;
  for (const auto& V : kraus) {
    Matrix P = Matrix::Zero(std::max<Eigen::Index>(rows, V.rows()), V.cols());
    P.topRows(V.rows()) = V;
    out.push_back(std::move(P));
  }
  return out;
}

// Refutes the composite Phi o Psi: non-PSD Choi or a failed separability test.
inline std::optional<Certificate> refute_composite(const ChannelRep& phi, const std::vector<Matrix>& psiKraus,
                                                   const Tolerance& tol) {
  Bipartite C = compose(phi, ChannelRep::from_kraus(psiKraus)).choi();
  Certificate psd = psd_certificate(C.matrix, tol, "composite Choi PSD");
  if (psd.fails()) {
    psd.evidence.note = "composite Choi matrix is not PSD (map is not k-positive)";
    return psd;
  }
  Certificate r = sep_refute(C, tol);
  if (r.fails()) return r;
  return std::nullopt;
}

}  // namespace detail

// Recomputes the composite Choi matrix from the stored witness and re-verifies its refutation.
inline bool reverify_keb_failure(const ChannelRep& phi, const KebReport& rep, const Tolerance& tol) {
  if (!rep.verdict.fails() || rep.witness.empty() || !rep.composite) return false;
  // Drop the zero rows added by pad_rows so the composite matches the stored evidence.
  Eigen::Index rows = 0;
  for (const auto& V : rep.witness)
    for (Eigen::Index r = 0; r < V.rows(); ++r)
      if (V.row(r).cwiseAbs().maxCoeff() > 0) rows = std::max(rows, r + 1);
  if (rows == 0) return false;
  std::vector<Matrix> kraus;
  for (const auto& V : rep.witness) kraus.push_back(V.topRows(rows));
  Bipartite C = compose(phi, ChannelRep::from_kraus(kraus)).choi();
  const Certificate& c = *rep.composite;
  if (c.method == "composite Choi PSD") {
    const Vector& v = c.evidence.vector;
    if (v.size() != C.dim()) return false;
    Vector u = v / v.norm();
    return (u.adjoint() * C.matrix * u)(0, 0).real() < -tol.eps_psd;
  }
  return reverify_refutation(C, c, tol);
}

inline KebReport keb_refute(const ChannelRep& phi, int k, const Tolerance& tol, const RefuteOptions& opt = {}) {
  if (k < 1) throw InputError("keb_refute: k must be positive");
  const int d1 = phi.dim_in();
  const int top = std::min(k, d1);
  KebReport rep;
  rep.k = k;
  auto found = [&](std::vector<Matrix> kraus, Certificate c, Route route, const std::string& what, int j) {
    rep.witness = detail::pad_rows(kraus, k);
    rep.composite = c;
    rep.route = route;
    rep.verdict = make_certificate(Verdict::Fails, "composite refutation");
    rep.verdict.evidence = c.evidence;
    rep.details = what + " (size " + std::to_string(j) + "), composite " + c.method;
    return rep;
  };
  for (int j = 1; j <= top; ++j) {
    for (const auto& idx : combinations(d1, j)) {
      Matrix Q = Matrix::Zero(d1, j);
      for (int a = 0; a < j; ++a) Q(idx[a], a) = 1.0;
      std::vector<Matrix> kraus = {Q.adjoint()};
      if (auto c = detail::refute_composite(phi, kraus, tol)) {
        std::string s = "coordinate projection onto {";
        for (int a = 0; a < j; ++a) s += (a ? "," : "") + std::to_string(idx[a]);
        return found(kraus, *c, Route::ProjectionWitness, s + "}", j);
      }
    }
    if (j == 1) continue;
    for (int b = 0; b < opt.bases && j < d1; ++b) {
      Rng rng(tol.seed, 0xba5e0000ULL + 64ULL * j + b);
      Matrix Q = random_unitary(d1, rng).leftCols(j);
      std::vector<Matrix> kraus = {Q.adjoint()};
      if (auto c = detail::refute_composite(phi, kraus, tol))
        return found(kraus, *c, Route::ProjectionWitness, "random rank-" + std::to_string(j) + " projection", j);
    }
    for (int t = 0; t < opt.randomMaps; ++t) {
      Rng rng(tol.seed, 0xc0de0000ULL + 64ULL * j + t);
      const int count = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(j));
      std::vector<Matrix> kraus;
      for (int n = 0; n < count; ++n) kraus.push_back(random_gaussian(j, d1, rng));
      if (auto c = detail::refute_composite(phi, kraus, tol))
        return found(kraus, *c, Route::CompositionWitness,
                     "random CP map with " + std::to_string(count) + " Kraus operators", j);
    }
    for (int t = 0; t < opt.randomRankK && j < d1; ++t) {
      Rng rng(tol.seed, 0x7a4e0000ULL + 64ULL * j + t);
      Matrix V = random_matrix_of_rank(d1, d1, j, rng);
      std::vector<Matrix> kraus = {V};
      if (auto c = detail::refute_composite(phi, kraus, tol))
        return found(kraus, *c, Route::CompositionWitness, "random rank-" + std::to_string(j) + " conjugation", j);
    }
  }
  rep.verdict = make_certificate(Verdict::Unknown, "composite refutation");
  rep.verdict.clamped = k > d1;
  rep.details = "no separability violation found up to size " + std::to_string(top);
  return rep;
}

struct ThresholdInterval {
  FamilyName family = FamilyName::WernerHolevo;
  int d = 0;
  int k = 0;
  double lo = 0.0, hi = 0.0;  // certified interval
  bool exact = true;          // certified interval is also necessary
  double necLo = 0.0, necHi = 0.0;
  std::optional<std::pair<double, double>> gap;  // [gap.first, gap.second) reported UNKNOWN
  std::string note;
};

inline ThresholdInterval keb_threshold(FamilyName family, int d, int k) {
  if (d < 1) throw InputError("keb_threshold: d must be positive");
  if (k < 1) throw InputError("keb_threshold: k must be positive");
  ThresholdInterval t;
  t.family = family;
  t.d = d;
  t.k = k;
  const double m = std::min(k, d);
  switch (family) {
    case FamilyName::WernerHolevo:
      t.hi = k == 1 ? 1.0 : 1.0 / m;
      t.lo = -1.0;
      if (k == 1) t.note = "CP interval; positivity alone holds on (-inf, 1]";
      break;
    case FamilyName::PhiLambda:
      t.hi = 1.0;
      if (k == 1 || m == d) {
        t.lo = -1.0 / (d + 1.0);
        if (k == 1) t.note = "CP interval; positivity alone holds on [-1/2, inf)";
      } else {
        t.lo = -1.0 / (2.0 * m);
        t.exact = false;
        t.necLo = -1.0 / (m + 1.0);
        t.necHi = 1.0;
        t.gap = std::make_pair(t.necLo, t.lo);
        t.note = "sufficient interval only; the gap is unresolved";
      }
      break;
    default: throw InputError(std::string("keb_threshold: family ") + to_string(family) + " is not lambda-parametric");
  }
  if (t.exact) {
    t.necLo = t.lo;
    t.necHi = t.hi;
  }
  return t;
}

inline double dual_pairing(const ChannelRep& gamma, const ChannelRep& theta, double eps = 1e-9) {
  if (gamma.dim_in() != theta.dim_in() || gamma.dim_out() != theta.dim_out())
    throw InputError("dual_pairing: dimension mismatch");
  cplx v = (gamma.choi().matrix * theta.choi().matrix).trace();
  double scale = std::max(1.0, std::abs(v));
  if (gamma.hermiticity_preserving() && theta.hermiticity_preserving() && std::abs(v.imag()) > eps * scale)
    throw NumericGateError("dual_pairing: imaginary part " + std::to_string(v.imag()) + " exceeds tolerance");
  return v.real();
}

namespace detail {

inline KebReport analytic_report(int k, Verdict v, Route route, const std::string& note) {
  KebReport r;
  r.k = k;
  r.route = route;
  r.verdict = make_certificate(v, to_string(route), analytic(note));
  r.details = note;
  return r;
}

inline bool in_interval(double x, double lo, double hi) { return x >= lo - 1e-12 && x <= hi + 1e-12; }

}  // namespace detail

inline KebReport keb_certify(const ChannelRep& phi, int k, const Tolerance& tol);

namespace detail {

inline std::optional<KebReport> family_route(const ChannelRep& phi, int k, const Tolerance& tol) {
  const FamilySpec* f = phi.family();
  if (!f) return std::nullopt;
  const int d = phi.dim_in();
  const double lam = f->lambda;
  auto rep = [&](Verdict v, const std::string& n) { return analytic_report(k, v, Route::FamilyThreshold, n); };
  switch (f->name) {
    case FamilyName::WernerHolevo: {
      if (k == 1) return lam <= 1.0 + 1e-12 ? rep(Verdict::Holds, "positive for lambda <= 1")
                                            : rep(Verdict::Fails, "not positive for lambda > 1");
      auto t = keb_threshold(FamilyName::WernerHolevo, d, k);
      bool in = in_interval(lam, t.lo, t.hi);
      return rep(in ? Verdict::Holds : Verdict::Fails,
                 std::string(in ? "inside" : "outside") + " the exact interval [-1, 1/" +
                     std::to_string(std::min(k, d)) + "]");
    }
    case FamilyName::PhiLambda: {
      if (k == 1) return lam >= -0.5 - 1e-12 ? rep(Verdict::Holds, "positive for lambda >= -1/2")
                                             : rep(Verdict::Fails, "not positive for lambda < -1/2");
      auto t = keb_threshold(FamilyName::PhiLambda, d, k);
      if (in_interval(lam, t.lo, t.hi)) return rep(Verdict::Holds, "inside the sufficient interval");
      if (!in_interval(lam, t.necLo, t.necHi)) return rep(Verdict::Fails, "outside the necessary interval");
      KebReport r = rep(Verdict::Unknown, "inside the unresolved gap [" + std::to_string(t.gap->first) + ", " +
                                              std::to_string(t.gap->second) + ")");
      r.verdict.notes.push_back("gap: necessary interval is known, sufficiency is open here");
      return r;
    }
    case FamilyName::WernerModified: {
      if (k == 1) return std::nullopt;
      const int kk = std::min(k, d);
      const ChannelRep& gamma = f->maps[0];
      if (!is_positive_map(gamma, tol).holds()) return std::nullopt;
      double g = op_norm_inf(gamma.apply(identity(d)));
      if (g <= 1e-15) return rep(Verdict::Holds, "Gamma vanishes; trace map");
      if (in_interval(lam, -1.0 / (kk * g), 1.0 / g))
        return rep(Verdict::Holds, "lambda in [-1/(k|Gamma|), 1/|Gamma|] with |Gamma| = " + std::to_string(g));
      return std::nullopt;
    }
    case FamilyName::Schur: {
      Certificate psd = psd_certificate(f->param, tol, "Schur multiplier PSD");
      if (k == 1)
        return psd.holds() ? rep(Verdict::Holds, "A is PSD") : rep(Verdict::Fails, "A is not PSD");
      bool diag = (f->param - Matrix(f->param.diagonal().asDiagonal())).cwiseAbs().maxCoeff() <= tol.eps_eq;
      if (diag && psd.holds()) return rep(Verdict::Holds, "A is diagonal and PSD");
      return rep(Verdict::Fails, psd.holds() ? "A is PSD but not diagonal" : "A is not PSD");
    }
    case FamilyName::AdV: {
      if (k == 1) return rep(Verdict::Holds, "Ad_V is completely positive");
      auto s = svd(f->param).singular;
      int r = 0;
      while (r < s.size() && s(r) > 1e-10 * std::max(1.0, s(0))) ++r;
      if (r <= 1) return rep(Verdict::Holds, "rank(V) <= 1");
      return rep(Verdict::Fails, "rank(V) = " + std::to_string(r));
    }
    case FamilyName::Identity:
    case FamilyName::Transpose:
      if (k == 1 || d == 1) return rep(Verdict::Holds, "positive map");
      return rep(Verdict::Fails, std::string(to_string(f->name)) + " is not 2-EB for d >= 2");
    case FamilyName::TraceMap: return rep(Verdict::Holds, "trace map is entanglement breaking");
    case FamilyName::DirectSum: {
      KebReport a = keb_certify(f->maps[0], k, tol);
      KebReport b = keb_certify(f->maps[1], k, tol);
      Verdict v = Verdict::Unknown;
      if (a.verdict.holds() && b.verdict.holds()) v = Verdict::Holds;
      if (a.verdict.fails() || b.verdict.fails()) v = Verdict::Fails;
      KebReport r = analytic_report(k, v, Route::DirectSum,
                                    std::string("summands: ") + to_string(a.verdict.verdict) + " (" +
                                        to_string(a.route) + "), " + to_string(b.verdict.verdict) + " (" +
                                        to_string(b.route) + ")");
      return r;
    }
  }
  return std::nullopt;
}

}  // namespace detail

inline bool trace_preserving(const ChannelRep& phi, double eps) {
  return (partial_trace(phi.choi(), Side::Second) - identity(phi.dim_in())).cwiseAbs().maxCoeff() <= eps;
}

inline KebReport ppt_keb_shortcut(const ChannelRep& phi, const Tolerance& tol) {
  KebReport r;
  r.route = Route::PptShortcut;
  Certificate ppt = is_ppt_map(phi, tol);
  if (!ppt.holds()) {
    r.verdict = make_certificate(Verdict::Unknown, "PPT shortcut", analytic("map is not PPT"));
    r.details = "precondition failed: map is not PPT";
    return r;
  }
  if (phi.dim_out() == 2) {
    r.k = 3;
    r.verdict = make_certificate(Verdict::Holds, "PPT shortcut", analytic("PPT map into M_2 is 3-EB"));
  } else if (phi.dim_out() == 3) {
    r.k = 2;
    r.verdict = make_certificate(Verdict::Holds, "PPT shortcut", analytic("PPT map into M_3 is 2-EB"));
  } else {
    r.verdict = make_certificate(Verdict::Unknown, "PPT shortcut", analytic("no conclusion for output dimension > 3"));
  }
  r.details = r.verdict.evidence.note;
  return r;
}

inline KebReport keb_certify(const ChannelRep& phi, int k, const Tolerance& tol) {
  if (k < 1) throw InputError("keb_certify: k must be positive");
  const int d1 = phi.dim_in();
  const bool clamped = k > d1;
  auto finish = [&](KebReport r) {
    r.k = k;
    r.verdict.clamped = clamped;
    if (clamped) r.verdict.notes.push_back("k exceeds the input dimension; k-EB coincides with EB");
    return r;
  };
  std::vector<std::string> notes;

  if (auto r = detail::family_route(phi, k, tol)) {
    if (!r->verdict.unknown() || r->route == Route::FamilyThreshold) return finish(*r);
    notes.push_back(r->details);
  }

  if (k == 1) {
    Certificate p = is_positive_map(phi, tol);
    KebReport r;
    r.route = Route::None;
    r.verdict = p;
    r.details = "1-EB coincides with positivity";
    return finish(r);
  }

  if (phi.dim_in() == phi.dim_out() && trace_preserving(phi, 1e-9)) {
    Certificate pos = is_positive_map(phi, tol);
    if (pos.holds()) {
      double n = op_norm_inf(static_cast<double>(d1) * identity(d1) - phi.apply(identity(d1)));
      const int kk = std::min(k, d1);
      if (n <= 1.0 / kk + 1e-12)
        return finish(detail::analytic_report(k, Verdict::Holds, Route::NormSufficient,
                                              "|dI - Phi(I)| = " + std::to_string(n) + " <= 1/k"));
      notes.push_back("norm condition: |dI - Phi(I)| = " + std::to_string(n));
    }
  }

  {
    KebReport s = ppt_keb_shortcut(phi, tol);
    if (s.verdict.holds() && k <= s.k) return finish(s);
  }

  const int m = std::min(k, d1);
  if (m == d1) {
    Certificate c = sep_certify(phi.choi(), tol);
    KebReport r;
    r.route = Route::PrincipalBlock;
    r.verdict = c;
    r.details = "full Choi matrix separability (k >= d1)";
    if (c.holds()) return finish(r);
    notes.push_back("full Choi separability: " + std::string(to_string(c.verdict)));
  } else {
    auto eq = equivariance_spot_check(phi, 5, tol.seed);
    if (eq.passed) {
      std::vector<int> idx(m);
      std::iota(idx.begin(), idx.end(), 0);
      Certificate c = sep_certify(principal_block(phi.choi(), idx), tol);
      if (c.holds()) {
        KebReport r;
        r.route = Route::PrincipalBlock;
        r.verdict = c;
        r.verdict.notes.push_back(eq.note);
        r.details = "principal block separability with equivariance";
        return finish(r);
      }
      notes.push_back("principal block: " + std::string(to_string(c.verdict)));
    } else {
      notes.push_back("principal block route skipped: " + eq.note);
    }
  }
  KebReport r;
  r.route = Route::None;
  r.verdict = make_certificate(Verdict::Unknown, "certification routes exhausted");
  r.verdict.notes = notes;
  r.details = "no certification route applies";
  return finish(r);
}

// Random PSD inputs X on d1 (x) k; (Phi (x) id_k)(X) must never be refuted.
inline Certificate flip_separability_check(const ChannelRep& phi, int k, int trials, const Tolerance& tol) {
  if (trials < 1) throw InputError("flip_separability_check: trials must be positive");
  KebReport cert = keb_certify(phi, k, tol);
  if (!cert.verdict.holds()) throw InputError("flip_separability_check: map is not certified k-EB");
  const int d1 = phi.dim_in();
  for (int t = 0; t < trials; ++t) {
    Rng rng(tol.seed, 0xf11b0000ULL + static_cast<std::uint64_t>(t));
    const int n = d1 * k;
    const int rank = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    Bipartite X(random_psd(n, rank, rng), d1, k);
    Bipartite Y = apply_first(phi, X);
    Certificate r = sep_refute(Y, tol);
    if (r.fails()) {
      Certificate out = make_certificate(Verdict::Fails, "flip separability", r.evidence);
      out.notes.push_back("counterexample at trial " + std::to_string(t) + " via " + r.method);
      return out;
    }
  }
  return make_certificate(Verdict::Holds, "flip separability",
                          analytic("no refutation in " + std::to_string(trials) + " random trials"));
}

struct SnReduction {
  Certificate verdict;
  SnBounds composite;  // bounds for Phi o Psi
  SnBounds inner;      // bounds for Psi
};

inline SnReduction sn_reduction_check(const ChannelRep& phi, const ChannelRep& psi, const Tolerance& tol) {
  if (psi.dim_out() != phi.dim_in()) throw InputError("sn_reduction_check: Psi output must match Phi input");
  const int m = psi.dim_in();
  if (m < 2 || m > phi.dim_out())
    throw InputError("sn_reduction_check: requires 2 <= dim_in(Psi) <= dim_out(Phi)");
  if (!keb_certify(phi, 2, tol).verdict.holds()) throw InputError("sn_reduction_check: Phi is not certified 2-EB");
  if (!is_cp(psi, tol).holds()) throw InputError("sn_reduction_check: Psi is not CP");
  Certificate ref = sep_refute(psi.choi(), tol);
  if (!ref.fails()) throw InputError("sn_reduction_check: Psi is not refuted as entanglement breaking");

  SnReduction out;
  Bipartite C = compose(phi, psi).choi();
  Certificate sep = sep_certify(C, tol);
  if (sep.holds()) {
    out.composite.upper = 1;
    out.composite.upperEvidence = "separable (" + sep.method + ")";
  } else {
    out.composite = sn_upper_bound(C, tol.eps_psd);
  }
  out.inner = sn_lower_bound(psi.choi(), std::min(psi.dim_in(), psi.dim_out()), tol.eps_psd);
  if (out.inner.lower < 2) {
    out.inner.lower = 2;
    out.inner.lowerEvidence = "entangled (" + ref.method + ")";
  }
  Evidence ev;
  ev.kind = EvidenceKind::Interval;
  ev.lo = out.composite.upper;
  ev.hi = out.inner.lower;
  ev.note = "SN(Phi o Psi) <= " + std::to_string(out.composite.upper) + ", SN(Psi) >= " +
            std::to_string(out.inner.lower);
  out.verdict = make_certificate(out.composite.upper < out.inner.lower ? Verdict::Holds : Verdict::Unknown,
                                 "Schmidt number reduction", ev);
  return out;
}

inline int composition_degree(int n, int m, int d) {
  if (n < 2 || m < 2 || n > d || m > d) throw InputError("composition_degree: requires 2 <= n, m <= d");
  return std::min(n + m - 1, d);
}

struct PowerResult {
  int m = 1;
  int snUpper = 1;
  int ceilBound = 1;
  Certificate verification;
};

inline ChannelRep channel_power(const ChannelRep& phi, int m) {
  if (m < 1) throw InputError("channel_power: m must be positive");
  ChannelRep out = phi;
  for (int i = 1; i < m; ++i) out = compose(phi, out);
  return out;
}

inline PowerResult power_to_eb(const ChannelRep& phi, int k, const Tolerance& tol) {
  if (k < 2) throw InputError("power_to_eb: k must be at least 2");
  if (phi.dim_in() != phi.dim_out()) throw InputError("power_to_eb: map must be square");
  if (!is_cp(phi, tol).holds()) throw InputError("power_to_eb: map is not CP");
  if (!keb_certify(phi, k, tol).verdict.holds()) throw InputError("power_to_eb: map is not certified k-EB");
  const int d = phi.dim_in();
  PowerResult r;
  r.snUpper = sn_upper_bound(phi).upper;
  r.ceilBound = k >= d ? 1 : (d - 1 + (k - 1) - 1) / (k - 1);
  r.m = std::max(1, std::min(r.snUpper, r.ceilBound));
  r.verification = sep_certify(channel_power(phi, r.m).choi(), tol);
  return r;
}

}  // namespace keb
