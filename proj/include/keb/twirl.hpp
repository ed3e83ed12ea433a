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
#include <array>
#include <string>
#include <vector>

#include "keb/certificate.hpp"
#include "keb/core.hpp"
#include "keb/positivity.hpp"
#include "keb/random.hpp"

namespace keb {

// a (I (x) I) + b |Omega><Omega| + c Delta.
struct TwirlCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  Matrix to_operator(int d) const {
    return a * identity(d * d) + b * omega_projector(d) + c * swap_operator(d);
  }
};

// Pairings (tr X, tr X|Omega><Omega|, tr X Delta) of a twirl-family element.
inline std::array<double, 3> twirl_pairings(const TwirlCoefficients& t, int d) {
  const double dd = d;
  return {t.a * dd * dd + t.b * dd + t.c * dd, t.a * dd + t.b * dd * dd + t.c * dd,
          t.a * dd + t.b * dd + t.c * dd * dd};
}

// Inverse Gram system of {I (x) I, |Omega><Omega|, Delta}.
inline TwirlCoefficients twirl_from_pairings(double T, double TO, double TD, int d) {
  if (d < 2) throw InputError("twirl: d must be at least 2");
  const double dd = d;
  const double D = dd * dd * dd + dd * dd - 2.0 * dd;
  return {((dd + 1.0) * T - TO - TD) / D, ((dd + 1.0) * TO - T - TD) / D, ((dd + 1.0) * TD - T - TO) / D};
}

inline Matrix haar_orthogonal(int d, Rng& rng) {
  if (d < 1) throw InputError("haar_orthogonal: d must be positive");
  Eigen::MatrixXd Z = random_real_gaussian(d, d, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Z);
  Eigen::MatrixXd Q = qr.householderQ();
  for (int i = 0; i < d; ++i)
    if (qr.matrixQR()(i, i) < 0) Q.col(i) = -Q.col(i);
  return Q.cast<cplx>();
}

inline Matrix haar_orthogonal(int d, std::uint64_t seed) {
  Rng rng(seed);
  return haar_orthogonal(d, rng);
}

inline void require_twirl_shape(const Bipartite& A) {
  if (A.dimA != A.dimB) throw InputError("twirl: factors must have equal dimension");
  if (A.dimA < 2) throw InputError("twirl: d = 1 is degenerate (I, Omega and Delta coincide)");
}

// Mean of (U (x) U)* A (U (x) U) over Haar orthogonal U; sample s draws from stream (seed, s).
inline Bipartite twirl_monte_carlo(const Bipartite& A, int samples, std::uint64_t seed) {
  require_twirl_shape(A);
  if (samples < 1) throw InputError("twirl_monte_carlo: samples must be positive");
  const int d = A.dimA;
  const Eigen::Index n = A.dim();
  Matrix sum = Matrix::Zero(n, n), comp = Matrix::Zero(n, n);
  for (int s = 0; s < samples; ++s) {
    Rng rng(seed, static_cast<std::uint64_t>(s));
    Matrix U = haar_orthogonal(d, rng);
    Matrix UU = kron(U, U);
    Matrix term = UU.adjoint() * A.matrix * UU;
    Matrix y = term - comp;
    Matrix t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return Bipartite(sum / static_cast<double>(samples), d, d);
}

struct TwirlProjection {
  Bipartite projected;
  TwirlCoefficients coeffs;
};

inline TwirlProjection twirl_project(const Bipartite& A, double eps_herm = 1e-10) {
  require_twirl_shape(A);
  const int d = A.dimA;
  Matrix H = ensure_hermitian(A.matrix, eps_herm);
  const double T = H.trace().real();
  const Vector w = omega_vector(d);
  const double TO = (w.adjoint() * H * w)(0, 0).real();
  const double TD = (H * swap_operator(d)).trace().real();
  TwirlCoefficients c = twirl_from_pairings(T, TO, TD, d);
  return {Bipartite(c.to_operator(d), d, d), c};
}

inline TwirlCoefficients twirl_product_coeffs(const Vector& x, const Vector& y, int d) {
  if (x.size() != d || y.size() != d) throw InputError("twirl_product_coeffs: vectors must have length d");
  const double nx = x.squaredNorm(), ny = y.squaredNorm();
  const double xy = std::norm(x.dot(y));                // |<x,y>|^2
  const double xyb = std::norm((x.transpose() * y)(0, 0));  // |<x,conj(y)>|^2
  return twirl_from_pairings(nx * ny, xyb, xy, d);
}

namespace detail {

struct Point2 {
  double q, p;
  int idx;
};

inline double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.q - o.q) * (b.p - o.p) - (a.p - o.p) * (b.q - o.q);
}

inline std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.q < b.q || (a.q == b.q && (a.p < b.p || (a.p == b.p && a.idx < b.idx)));
  });
  if (pts.size() < 3) return pts;
  std::vector<Point2> h(2 * pts.size());
  size_t k = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i - 1]) <= 0) --k;
    h[k++] = pts[i - 1];
  }
  h.resize(k - 1);
  return h;
}

}  // namespace detail

struct ProductPair {
  Vector x, y;
};

// Corner pairs of the product-point square plus `random` complex Gaussian pairs.
inline std::vector<ProductPair> twirl_sample_pairs(int d, int random, std::uint64_t seed) {
  std::vector<ProductPair> out;
  const double r = 1.0 / std::sqrt(2.0);
  Vector e1 = basis_vector(d, 0), e2 = basis_vector(d, 1);
  Vector circ = r * (e1 + cplx(0, 1) * e2);
  out.push_back({e1, e2});                    // (0,0)
  out.push_back({e1, e1});                    // (1,1)
  out.push_back({circ, circ});                // |<x,y>| = 1, <x,conj y> = 0
  out.push_back({circ, circ.conjugate()});    // |<x,y>| = 0, |<x,conj y>| = 1
  out.push_back({e1, r * (e1 + e2)});
  out.push_back({circ, e1});
  for (int s = 0; s < random; ++s) {
    Rng rng(seed, 0x7a1dULL + static_cast<std::uint64_t>(s));
    Vector x = random_unit_vector(d, rng);
    Vector y = random_unit_vector(d, rng);
    out.push_back({x, y});
  }
  return out;
}

inline Certificate twirl_cone_membership(const TwirlCoefficients& target, int d, int samplePoints = 2000,
                                         std::uint64_t seed = 0, double eps_sep = 1e-7,
                                         const Tolerance& tol = Tolerance{}) {
  if (d < 2) throw InputError("twirl_cone_membership: d must be at least 2");
  auto [T, TO, TD] = twirl_pairings(target, d);
  double scale = std::abs(target.a) + std::abs(target.b) + std::abs(target.c);
  if (std::abs(T) <= 1e-14 * std::max(1.0, scale)) throw InputError("twirl_cone_membership: trace is zero");
  const Matrix X = target.to_operator(d);
  auto outside = [&](const std::string& why) {
    Certificate psd = psd_certificate(X, tol, "reconstructed operator PSD");
    if (psd.fails()) {
      psd.method = "PSD test of reconstructed operator";
      return psd;
    }
    Certificate ppt = psd_certificate(partial_transpose(Bipartite(X, d, d), Side::Second).matrix, tol, "PPT");
    if (ppt.fails()) {
      ppt.method = "PPT test of reconstructed operator";
      return ppt;
    }
    Evidence ev;
    ev.note = why;
    return make_certificate(Verdict::Unknown, "twirl-cone hull", ev);
  };
  if (T < 0) return outside("negative trace");
  const double q = TO / T, p = TD / T;

  auto pairs = twirl_sample_pairs(d, std::max(0, samplePoints - 6), seed);
  std::vector<detail::Point2> pts;
  for (size_t i = 0; i < pairs.size(); ++i)
    pts.push_back({std::norm((pairs[i].x.transpose() * pairs[i].y)(0, 0)), std::norm(pairs[i].x.dot(pairs[i].y)),
                   static_cast<int>(i)});
  auto hull = detail::convex_hull(pts);
  const double slack = 1e-12;
  for (size_t i = 1; i + 1 < hull.size(); ++i) {
    const auto &A = hull[0], &B = hull[i], &C = hull[i + 1];
    double den = (B.p - C.p) * (A.q - C.q) + (C.q - B.q) * (A.p - C.p);
    if (std::abs(den) < 1e-300) continue;
    double l1 = ((B.p - C.p) * (q - C.q) + (C.q - B.q) * (p - C.p)) / den;
    double l2 = ((C.p - A.p) * (q - C.q) + (A.q - C.q) * (p - C.p)) / den;
    double l3 = 1.0 - l1 - l2;
    if (l1 < -slack || l2 < -slack || l3 < -slack) continue;
    std::array<double, 3> w = {std::max(0.0, l1), std::max(0.0, l2), std::max(0.0, l3)};
    double ws = w[0] + w[1] + w[2];
    SeparableDecomposition dec;
    TwirlCoefficients recon;
    const detail::Point2* verts[3] = {&A, &B, &C};
    for (int v = 0; v < 3; ++v) {
      if (w[v] == 0.0) continue;
      double weight = T * w[v] / ws;
      const auto& pr = pairs[verts[v]->idx];
      dec.twirled.push_back({weight, pr.x, pr.y});
      auto tc = twirl_product_coeffs(pr.x, pr.y, d);
      recon.a += weight * tc.a;
      recon.b += weight * tc.b;
      recon.c += weight * tc.c;
    }
    dec.residual = (recon.to_operator(d) - X).norm();
    if (dec.residual > eps_sep) return outside("hull reconstruction residual above eps_sep");
    Evidence ev;
    ev.kind = EvidenceKind::Decomposition;
    ev.value = dec.residual;
    ev.note = "convex combination of " + std::to_string(dec.twirled.size()) + " twirled product states";
    Certificate c = make_certificate(Verdict::Holds, "twirl-cone hull", ev);
    c.decomposition = std::move(dec);
    return c;
  }
  return outside("target outside the sampled product-point hull");
}

inline Matrix twirled_decomposition_operator(const SeparableDecomposition& dec, int d) {
  TwirlCoefficients t;
  for (const auto& term : dec.twirled) {
    auto tc = twirl_product_coeffs(term.x, term.y, d);
    t.a += term.weight * tc.a;
    t.b += term.weight * tc.b;
    t.c += term.weight * tc.c;
  }
  return t.to_operator(d);
}

}  // namespace keb
