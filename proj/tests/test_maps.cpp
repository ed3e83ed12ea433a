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

#include <gtest/gtest.h>

#include <cmath>

#include "keb/keb.hpp"
#include "test_util.hpp"

namespace keb {
namespace {

using testing::choi_by_units;
using testing::hs_pairing;
using testing::random_kraus;

ChannelRep transposed_werner(int d, double lambda) { return compose(transpose_map(d), werner_holevo(d, lambda)); }

// Channels.

TEST(Apply, FamilyExamples) {
  EXPECT_TRUE(approx_equal(werner_holevo(2, 1.0).apply(matrix_unit(2, 2, 0, 0)), matrix_unit(2, 2, 1, 1), 1e-15));
  Rng rng(1);
  Matrix X = random_gaussian(3, 3, rng);
  EXPECT_TRUE(approx_equal(identity_map(3).apply(X), X, 0));
  EXPECT_TRUE(approx_equal(phi_lambda(2, 1.0).apply(matrix_unit(2, 2, 0, 1)),
                           matrix_unit(2, 2, 0, 1) + matrix_unit(2, 2, 1, 0), 1e-15));
}

TEST(Apply, RejectsWrongShape) { EXPECT_THROW(identity_map(3).apply(identity(2)), InputError); }

TEST(Apply, BodiesAgree) {
  Rng rng(2);
  auto K = random_kraus(3, 3, 2, rng);
  ChannelRep k = ChannelRep::from_kraus(K);
  ChannelRep c = ChannelRep::from_choi(k.choi());
  for (int t = 0; t < 5; ++t) {
    Matrix X = random_gaussian(3, 3, rng);
    EXPECT_TRUE(approx_equal(k.apply(X), c.apply(X), 1e-10));
  }
}

TEST(ChoiOf, Examples) {
  for (int d = 2; d <= 4; ++d) {
    EXPECT_TRUE(approx_equal(choi_of(identity_map(d)).matrix, omega_projector(d), 1e-15));
    EXPECT_TRUE(approx_equal(choi_of(transpose_map(d)).matrix, swap_operator(d), 1e-15));
    for (double lam : {-1.0, -0.3, 0.25, 0.7, 1.0})
      EXPECT_TRUE(approx_equal(choi_of(werner_holevo(d, lam)).matrix, identity(d * d) - lam * swap_operator(d), 1e-14));
  }
}

TEST(ChoiOf, MatchesMatrixUnitOracle) {
  Rng rng(3);
  std::vector<ChannelRep> maps = {werner_holevo(3, 0.4), phi_lambda(3, -0.2), trace_map(2, 3),
                                  schur_map(random_psd(3, 2, rng)), ad_v(random_gaussian(2, 3, rng)),
                                  ChannelRep::from_kraus(random_kraus(2, 2, 4, rng))};
  for (const auto& phi : maps) EXPECT_TRUE(approx_equal(choi_of(phi).matrix, choi_by_units(phi), 1e-12));
}

TEST(ChoiOf, WernerSpectrum) {
  for (int d = 2; d <= 4; ++d)
    for (double lam : {-0.8, 0.3, 0.9}) {
      auto e = hermitian_eig(choi_of(werner_holevo(d, lam)).matrix);
      std::vector<double> v(e.values.data(), e.values.data() + e.values.size());
      int lo = 0, hi = 0;
      for (double x : v) {
        if (std::abs(x - (1 - lam)) < 1e-10) ++lo;
        if (std::abs(x - (1 + lam)) < 1e-10) ++hi;
      }
      EXPECT_EQ(lo, d * (d + 1) / 2);
      EXPECT_EQ(hi, d * (d - 1) / 2);
    }
}

TEST(MapOfChoi, Examples) {
  EXPECT_LE(choi_distance(map_of_choi(Bipartite(omega_projector(3), 3, 3)), identity_map(3)), 1e-14);
  EXPECT_LE(choi_distance(map_of_choi(Bipartite(swap_operator(3), 3, 3)), transpose_map(3)), 1e-14);
  Rng rng(4);
  Bipartite C(random_psd(6, 4, rng), 2, 3);
  auto kraus = map_of_choi(C).kraus();
  ChannelRep k = ChannelRep::from_kraus(kraus);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      EXPECT_TRUE(approx_equal(k.apply(matrix_unit(2, 2, i, j)), C.matrix.block(i * 3, j * 3, 3, 3), 1e-10));
}

TEST(MapOfChoi, RoundTrip) {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const int d1 = 1 + t % 4, d2 = 1 + (t / 4) % 4;
    Bipartite C(random_gaussian(d1 * d2, d1 * d2, rng), d1, d2);
    EXPECT_LE((choi_of(map_of_choi(C)).matrix - C.matrix).norm(), 1e-9);
    Bipartite P(random_psd(d1 * d2, 1 + t % (d1 * d2), rng), d1, d2);
    EXPECT_LE((ChannelRep::from_kraus(map_of_choi(P).kraus()).choi().matrix - P.matrix).norm(), 1e-9);
  }
}

TEST(MapOfChoi, KrausRefusedForNonPsd) {
  EXPECT_THROW(transpose_map(2).kraus(), InputError);
}

TEST(Compose, Examples) {
  Rng rng(6);
  ChannelRep phi = ChannelRep::from_kraus(random_kraus(2, 3, 2, rng));
  EXPECT_LE(choi_distance(compose(phi, identity_map(3)), phi), 1e-12);
  EXPECT_LE(choi_distance(compose(transpose_map(3), transpose_map(3)), identity_map(3)), 1e-14);
  ChannelRep w = werner_holevo(3, 0.5);
  EXPECT_TRUE(approx_equal(compose(w, w).choi().matrix, apply_second(w, w.choi()).matrix, 1e-10));
}

TEST(Compose, ChoiIdentityAndUnitAgreement) {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    ChannelRep psi = ChannelRep::from_choi(Bipartite(random_hermitian(6, rng), 2, 3));
    ChannelRep phi = ChannelRep::from_kraus(random_kraus(2, 3, 2, rng));
    ChannelRep c = compose(phi, psi);
    EXPECT_TRUE(approx_equal(c.choi().matrix, apply_second(phi, psi.choi()).matrix, 1e-10));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        Matrix E = matrix_unit(2, 2, i, j);
        EXPECT_TRUE(approx_equal(c.apply(E), phi.apply(psi.apply(E)), 1e-10));
      }
  }
  EXPECT_THROW(compose(identity_map(2), identity_map(3)), InputError);
}

TEST(TensorWithIdentity, Examples) {
  Rng rng(8);
  ChannelRep w = werner_holevo(3, 0.5);
  EXPECT_LE(choi_distance(tensor_with_identity(w, 1, TensorSide::Left), w), 0);
  Matrix A = random_gaussian(2, 2, rng), B = random_gaussian(3, 3, rng);
  EXPECT_TRUE(approx_equal(tensor_with_identity(transpose_map(3), 2, TensorSide::Left).apply(kron(A, B)),
                           kron(A, Matrix(B.transpose())), 1e-12));
  Matrix rho = matrix_unit(3, 3, 0, 0);
  Matrix Om = omega_projector(2);
  EXPECT_TRUE(approx_equal(tensor_with_identity(w, 4, TensorSide::Left).apply(kron(Om, rho)),
                           kron(Om, w.apply(rho)), 1e-12));
  EXPECT_TRUE(approx_equal(tensor_with_identity(w, 2, TensorSide::Right).apply(kron(B, A)),
                           kron(w.apply(B), A), 1e-12));
}

TEST(TensorWithIdentity, AgreesWithKronEvaluation) {
  Rng rng(9);
  ChannelRep phi = ChannelRep::from_kraus(random_kraus(2, 2, 3, rng));
  for (TensorSide side : {TensorSide::Left, TensorSide::Right}) {
    ChannelRep t = tensor_with_identity(phi, 2, side);
    for (int n = 0; n < 5; ++n) {
      Matrix A = random_gaussian(2, 2, rng), X = random_gaussian(2, 2, rng);
      Matrix in = side == TensorSide::Left ? kron(A, X) : kron(X, A);
      Matrix out = side == TensorSide::Left ? kron(A, phi.apply(X)) : kron(phi.apply(X), A);
      EXPECT_TRUE(approx_equal(t.apply(in), out, 1e-10));
    }
  }
}

TEST(Adjoint, Examples) {
  EXPECT_LE(choi_distance(adjoint(identity_map(3)), identity_map(3)), 1e-15);
  EXPECT_LE(choi_distance(adjoint(transpose_map(3)), transpose_map(3)), 1e-15);
  Matrix V = matrix_unit(2, 2, 0, 1);
  ChannelRep a = adjoint(ad_v(V));
  EXPECT_LE(choi_distance(a, ad_v(V.adjoint())), 1e-15);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) {
          Matrix X = matrix_unit(2, 2, i, j), Y = matrix_unit(2, 2, p, q);
          EXPECT_NEAR(std::abs((ad_v(V).apply(X).adjoint() * Y).trace() - (X.adjoint() * a.apply(Y)).trace()), 0,
                      1e-15);
        }
}

TEST(Adjoint, PairingIdentityOnMatrixUnits) {
  Rng rng(10);
  std::vector<ChannelRep> maps = {werner_holevo(3, 0.3), phi_lambda(2, 0.4),
                                  ChannelRep::from_choi(Bipartite(random_gaussian(6, 6, rng), 2, 3)),
                                  ChannelRep::from_kraus(random_kraus(2, 3, 2, rng))};
  for (const auto& phi : maps) {
    ChannelRep a = adjoint(phi);
    const int d1 = phi.dim_in(), d2 = phi.dim_out();
    ASSERT_EQ(a.dim_in(), d2);
    for (int i = 0; i < d1; ++i)
      for (int j = 0; j < d1; ++j)
        for (int p = 0; p < d2; ++p)
          for (int q = 0; q < d2; ++q) {
            Matrix X = matrix_unit(d1, d1, i, j), Y = matrix_unit(d2, d2, p, q);
            cplx lhs = (phi.apply(X).adjoint() * Y).trace(), rhs = (X.adjoint() * a.apply(Y)).trace();
            EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-12);
          }
    EXPECT_LE(choi_distance(adjoint(a), phi), 1e-12);
  }
}

TEST(Adjoint, ReversesComposition) {
  Rng rng(11);
  ChannelRep phi = ChannelRep::from_choi(Bipartite(random_gaussian(6, 6, rng), 3, 2));
  ChannelRep psi = ChannelRep::from_kraus(random_kraus(2, 2, 3, rng));
  EXPECT_LE(choi_distance(adjoint(compose(phi, psi)), compose(adjoint(psi), adjoint(phi))), 1e-10);
}

TEST(TransposeConjugate, Examples) {
  EXPECT_LE(choi_distance(transpose_conjugate(identity_map(3)), identity_map(3)), 1e-15);
  ChannelRep w = werner_holevo(3, 0.7);
  EXPECT_LE(choi_distance(transpose_conjugate(w), w), 1e-14);
  Rng rng(12);
  Matrix V = random_gaussian(3, 2, rng);
  EXPECT_LE(choi_distance(transpose_conjugate(ad_v(V)), ad_v(V.conjugate())), 1e-12);
  ChannelRep c = compose(transpose_map(2), compose(ad_v(V), transpose_map(3)));
  EXPECT_LE(choi_distance(transpose_conjugate(ad_v(V)), c), 1e-12);
}

TEST(FamilyMake, Examples) {
  EXPECT_LE(choi_distance(werner_holevo(3, 0.0), trace_map(3)), 0);
  Rng rng(13);
  Matrix X = random_gaussian(3, 3, rng);
  EXPECT_TRUE(approx_equal(schur_map(identity(3)).apply(X), Matrix(X.diagonal().asDiagonal()), 0));
  ChannelRep a = werner_holevo(2, 0.3), b = ad_v(random_gaussian(2, 3, rng));
  ChannelRep s = direct_sum(a, b);
  Matrix Y = random_gaussian(2, 2, rng);
  Matrix expect = Matrix::Zero(5, 5);
  expect.topLeftCorner(2, 2) = a.apply(Y);
  expect.bottomRightCorner(3, 3) = b.apply(Y);
  EXPECT_TRUE(approx_equal(s.apply(Y), expect, 1e-12));
}

TEST(FamilyMake, InvalidParameters) {
  EXPECT_THROW(schur_map(Matrix::Zero(2, 3)), InputError);
  EXPECT_THROW(direct_sum(identity_map(2), identity_map(3)), InputError);
  EXPECT_THROW(werner_holevo(0, 0.5), InputError);
}

TEST(FamilyMake, AdjointFormulas) {
  Rng rng(14);
  Matrix A = random_gaussian(3, 3, rng);
  EXPECT_LE(choi_distance(adjoint(schur_map(A)), schur_map(A.conjugate())), 1e-12);
  EXPECT_LE(choi_distance(adjoint(werner_holevo(3, 0.4)), werner_holevo(3, 0.4)), 1e-14);
  EXPECT_LE(choi_distance(adjoint(phi_lambda(3, 0.4)), phi_lambda(3, 0.4)), 1e-14);
}

TEST(SchmidtNumber, BoundedByKrausRank) {
  Rng rng(15);
  for (int t = 0; t < 20; ++t) {
    Bipartite C(random_psd(9, 1 + t % 9, rng), 3, 3);
    int maxRank = 0;
    for (const auto& V : map_of_choi(C).kraus()) {
      auto s = svd(V).singular;
      int r = 0;
      while (r < s.size() && s(r) > 1e-8 * s(0)) ++r;
      maxRank = std::max(maxRank, r);
    }
    EXPECT_LE(sn_upper_bound(C).upper, maxRank);
  }
}

// Positivity.

TEST(IsPositiveMap, Examples) {
  Tolerance tol;
  auto w = is_positive_map(werner_holevo(2, 2.0), tol);
  ASSERT_TRUE(w.fails());
  Vector u = w.evidence.vector;
  Matrix out = werner_holevo(2, 2.0).apply(u * u.adjoint() / u.squaredNorm());
  EXPECT_NEAR(min_eigenvalue(out), -1.0, 1e-9);
  EXPECT_TRUE(is_positive_map(identity_map(3), tol).holds());
  auto p = is_positive_map(phi_lambda(3, -0.6), tol);
  ASSERT_TRUE(p.fails());
  Vector v = p.evidence.vector;
  EXPECT_LT(min_eigenvalue(phi_lambda(3, -0.6).apply(v * v.adjoint() / v.squaredNorm())), -1e-9);
  EXPECT_NEAR(min_eigenvalue(phi_lambda(3, -0.6).apply(matrix_unit(3, 3, 0, 0))), -0.2, 1e-12);
}

TEST(IsPositiveMap, SearchFindsNonFamilyWitness) {
  Tolerance tol;
  ChannelRep phi = ChannelRep::from_choi(choi_of(werner_holevo(3, 1.5)));
  auto c = is_positive_map(phi, tol);
  ASSERT_TRUE(c.fails());
  Vector u = c.evidence.vector;
  EXPECT_LT(min_eigenvalue(phi.apply(u * u.adjoint() / u.squaredNorm())), -tol.eps_psd);
  EXPECT_FALSE(is_positive_map(ChannelRep::from_choi(choi_of(werner_holevo(3, 0.9))), tol).fails());
}

TEST(BlockPositivity, Examples) {
  Tolerance tol;
  EXPECT_TRUE(block_positivity(Bipartite(identity(9), 3, 3), 2, tol).holds());
  for (int d = 3; d <= 4; ++d)
    for (int k = 1; k < d; ++k) {
      const double lam = 1.0 / k + 0.05;
      Bipartite C = choi_of(transposed_werner(d, lam));
      auto c = block_positivity(C, k, tol);
      ASSERT_TRUE(c.fails()) << "d=" << d << " k=" << k;
      ASSERT_TRUE(c.evidence.value.has_value());
      EXPECT_LT(*c.evidence.value, -tol.eps_psd);
      EXPECT_GE(*c.evidence.value, 1 - lam * k - 1e-9);
      EXPECT_LE(c.evidence.schmidt_rank, k);
      EXPECT_TRUE(reverify_schmidt_witness(C, k, c.evidence, tol));
    }
  Rng rng(16);
  EXPECT_TRUE(block_positivity(Bipartite(random_psd(9, 4, rng), 3, 3), 3, tol).holds());
}

TEST(BlockPositivity, FullRankAgreesWithCp) {
  Tolerance tol;
  Rng rng(17);
  for (int t = 0; t < 100; ++t) {
    Matrix H = random_hermitian(6, rng);
    if (t % 2 == 0) H = random_psd(6, 1 + t % 6, rng);
    Bipartite C(H, 2, 3);
    EXPECT_EQ(block_positivity(C, 2, tol).verdict, is_cp(map_of_choi(C), tol).verdict);
  }
}

TEST(BlockPositivity, FailureIsMonotone) {
  Tolerance tol;
  Bipartite C = choi_of(transposed_werner(4, 0.6));
  auto c = block_positivity(C, 2, tol);
  ASSERT_TRUE(c.fails());
  for (int k = 2; k <= 4; ++k) {
    EXPECT_TRUE(reverify_schmidt_witness(C, k, c.evidence, tol));
    EXPECT_TRUE(block_positivity(C, k, tol).fails());
  }
}

TEST(BlockPositivity, ClampsLargeK) {
  Tolerance tol;
  auto c = block_positivity(Bipartite(identity(4), 2, 2), 5, tol);
  EXPECT_TRUE(c.holds());
  EXPECT_TRUE(c.clamped);
}

TEST(IsCp, Examples) {
  Tolerance tol;
  EXPECT_TRUE(is_cp(identity_map(3), tol).holds());
  auto t = is_cp(transpose_map(2), tol);
  ASSERT_TRUE(t.fails());
  EXPECT_NEAR(*t.evidence.value, -1.0, 1e-12);
  auto w = is_cp(werner_holevo(3, 1.05), tol);
  ASSERT_TRUE(w.fails());
  EXPECT_NEAR(*w.evidence.value, -0.05, 1e-12);
  Vector v = w.evidence.vector;
  EXPECT_NEAR((v.adjoint() * choi_of(werner_holevo(3, 1.05)).matrix * v)(0, 0).real(), -0.05, 1e-12);
}

TEST(IsPptMap, Examples) {
  Tolerance tol;
  EXPECT_TRUE(is_ppt_map(trace_map(3), tol).holds());
  auto i = is_ppt_map(identity_map(2), tol);
  ASSERT_TRUE(i.fails());
  EXPECT_NEAR(*i.evidence.value, -1.0, 1e-12);
  for (double lam = -1.2; lam <= 1.2; lam += 0.05) {
    bool expect = lam >= -1.0 - 1e-12 && lam <= 1.0 / 3 + 1e-12;
    EXPECT_EQ(is_ppt_map(werner_holevo(3, lam), tol).holds(), expect) << lam;
  }
}

TEST(EquivariantKPositive, TransposedWernerBlocks) {
  Tolerance tol;
  auto a = equivariant_k_positive(transposed_werner(4, 0.5), 2, tol);
  EXPECT_TRUE(a.holds());
  EXPECT_EQ(a.method, "principal block eigensolve");
  auto b = equivariant_k_positive(transposed_werner(4, 0.4), 3, tol);
  ASSERT_TRUE(b.fails());
  EXPECT_NEAR(*b.evidence.value, -0.2, 1e-12);
}

TEST(EquivariantKPositive, KEqualsOneIsImageOfUnit) {
  Tolerance tol;
  for (double lam : {0.5, 1.0, 1.5}) {
    ChannelRep phi = werner_holevo(3, lam);
    bool psd = min_eigenvalue(phi.apply(matrix_unit(3, 3, 0, 0))) >= -tol.eps_psd;
    EXPECT_EQ(equivariant_k_positive(phi, 1, tol).holds(), psd) << lam;
  }
}

TEST(EquivariantKPositive, ThresholdMatchesWernerInterval) {
  Tolerance tol;
  for (int d = 3; d <= 4; ++d)
    for (int k = 2; k < d; ++k) {
      EXPECT_TRUE(equivariant_k_positive(transposed_werner(d, 1.0 / k), k, tol).holds());
      EXPECT_TRUE(equivariant_k_positive(transposed_werner(d, 1.0 / k + 0.05), k, tol).fails());
    }
}

TEST(EquivarianceSpotCheck, RejectsGenericMaps) {
  Rng rng(18);
  ChannelRep phi = ChannelRep::from_kraus(random_kraus(2, 3, 3, rng));
  EXPECT_FALSE(equivariance_spot_check(phi, 5, 0).passed);
  EXPECT_TRUE(equivariance_spot_check(werner_holevo(3, 0.3), 5, 0).passed);
}

TEST(PrincipalBlock, Examples) {
  Bipartite C = choi_of(werner_holevo(3, 0.4));
  EXPECT_TRUE(approx_equal(principal_block(C, {0, 1, 2}).matrix, C.matrix, 0));
  Matrix P = Matrix::Zero(2, 3);
  P(0, 0) = P(1, 1) = 1;
  EXPECT_TRUE(approx_equal(principal_block(C, {0, 1}).matrix,
                           compose(werner_holevo(3, 0.4), ad_v(P)).choi().matrix, 1e-12));
  for (int i = 0; i < 3; ++i) {
    Bipartite s = principal_block(C, {i});
    EXPECT_TRUE(approx_equal(s.matrix, werner_holevo(3, 0.4).apply(matrix_unit(3, 3, i, i)), 1e-14));
    EXPECT_GE(min_eigenvalue(s.matrix), 0.0);
  }
  EXPECT_THROW(principal_block(C, {0, 0}), InputError);
  EXPECT_THROW(principal_block(C, {3}), InputError);
}

TEST(PrincipalBlock, RotatedBasis) {
  Rng rng(19);
  Matrix U = random_unitary(3, rng);
  ChannelRep w = werner_holevo(3, 0.4);
  Bipartite B = principal_block(w.choi(), {0, 1}, U);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      Matrix F = U * matrix_unit(3, 3, a, b) * U.adjoint();
      EXPECT_TRUE(approx_equal(B.matrix.block(a * 3, b * 3, 3, 3), w.apply(F), 1e-12));
    }
}

TEST(KPositiveComposition, TwoEbWithTwoPebIsCp) {
  Tolerance tol;
  Rng rng(20);
  ChannelRep w = werner_holevo(3, 0.5);
  for (int t = 0; t < 50; ++t) {
    std::vector<Matrix> kraus;
    for (int n = 0; n < 1 + t % 4; ++n) kraus.push_back(random_matrix_of_rank(3, 3, 1 + n % 2, rng));
    EXPECT_TRUE(is_cp(compose(w, ChannelRep::from_kraus(kraus)), tol).holds());
  }
}

// k-EB refutation and certification.

TEST(KebRefute, Examples) {
  Tolerance tol;
  auto id = keb_refute(identity_map(2), 2, tol);
  ASSERT_TRUE(id.verdict.fails());
  EXPECT_TRUE(reverify_keb_failure(identity_map(2), id, tol));
  EXPECT_EQ(id.witness.front().rows(), 2);

  ChannelRep w = werner_holevo(3, 0.6);
  auto r = keb_refute(w, 2, tol);
  ASSERT_TRUE(r.verdict.fails());
  EXPECT_TRUE(reverify_keb_failure(w, r, tol));

  EXPECT_TRUE(keb_refute(trace_map(3), 3, tol).verdict.unknown());
}

TEST(KebRefute, WitnessIsMonotoneInK) {
  Tolerance tol;
  ChannelRep w = werner_holevo(4, 0.55);
  auto r2 = keb_refute(w, 2, tol);
  ASSERT_TRUE(r2.verdict.fails());
  for (int k = 3; k <= 4; ++k) {
    auto rk = keb_refute(w, k, tol);
    ASSERT_TRUE(rk.verdict.fails());
    EXPECT_TRUE(reverify_keb_failure(w, rk, tol));
    KebReport lifted = r2;
    lifted.witness = detail::pad_rows(r2.witness, k);
    EXPECT_TRUE(reverify_keb_failure(w, lifted, tol));
  }
}

TEST(KebCertify, Examples) {
  Tolerance tol;
  auto a = keb_certify(werner_holevo(3, 0.5), 2, tol);
  EXPECT_TRUE(a.verdict.holds());
  EXPECT_EQ(a.route, Route::FamilyThreshold);
  auto b = keb_certify(phi_lambda(4, -0.2), 2, tol);
  EXPECT_TRUE(b.verdict.holds());
  EXPECT_EQ(b.route, Route::FamilyThreshold);
  auto c = keb_certify(phi_lambda(4, -0.28), 2, tol);
  EXPECT_TRUE(c.verdict.unknown());
  EXPECT_EQ(c.route, Route::FamilyThreshold);
  EXPECT_NE(c.details.find("gap"), std::string::npos);
  EXPECT_TRUE(keb_certify(phi_lambda(4, -0.4), 2, tol).verdict.fails());
}

TEST(KebCertify, FamilyRoutes) {
  Tolerance tol;
  Rng rng(21);
  Matrix D = Matrix::Zero(3, 3);
  D(0, 0) = 1;
  D(1, 1) = 2;
  D(2, 2) = 0.5;
  EXPECT_TRUE(keb_certify(schur_map(D), 2, tol).verdict.holds());
  EXPECT_TRUE(keb_certify(schur_map(random_psd(3, 3, rng)), 2, tol).verdict.fails());
  EXPECT_TRUE(keb_certify(ad_v(random_matrix_of_rank(3, 3, 1, rng)), 3, tol).verdict.holds());
  EXPECT_TRUE(keb_certify(ad_v(random_matrix_of_rank(3, 3, 2, rng)), 2, tol).verdict.fails());
  EXPECT_TRUE(keb_certify(identity_map(3), 2, tol).verdict.fails());
  EXPECT_TRUE(keb_certify(transpose_map(3), 2, tol).verdict.fails());
  EXPECT_TRUE(keb_certify(trace_map(3), 3, tol).verdict.holds());
  auto wm = keb_certify(werner_modified(transpose_map(3), -0.3), 3, tol);
  EXPECT_TRUE(wm.verdict.holds());
  EXPECT_EQ(wm.route, Route::FamilyThreshold);
}

TEST(KebCertify, NumericRoutes) {
  Tolerance tol;
  Rng rng(22);
  ChannelRep ppt = ChannelRep::from_choi(random_separable(3, 2, 4, rng));
  auto s = keb_certify(ppt, 3, tol);
  EXPECT_TRUE(s.verdict.holds());
  EXPECT_EQ(s.route, Route::PptShortcut);

  ChannelRep generic = ChannelRep::from_choi(choi_of(werner_holevo(3, 0.3)));
  auto g = keb_certify(generic, 2, tol);
  EXPECT_TRUE(g.verdict.holds());
  EXPECT_EQ(g.route, Route::PptShortcut);
  ChannelRep w4 = ChannelRep::from_choi(choi_of(werner_holevo(4, 0.25)));
  auto b = keb_certify(w4, 2, tol);
  EXPECT_TRUE(b.verdict.holds());
  EXPECT_EQ(b.route, Route::PrincipalBlock);
}

TEST(NormSufficient, HypothesisBoundedBelowForTracePreservingMaps) {
  Tolerance tol;
  Rng rng(29);
  for (int d = 2; d <= 4; ++d)
    for (int t = 0; t < 5; ++t) {
      Bipartite C(random_psd(d * d, d + t, rng), d, d);
      Matrix S = partial_trace(C, Side::Second);
      auto es = hermitian_eig(S);
      Matrix isqrt = es.vectors * es.values.cwiseInverse().cwiseSqrt().cast<cplx>().asDiagonal() * es.vectors.adjoint();
      Matrix R = kron(isqrt, identity(d));
      ChannelRep phi = ChannelRep::from_choi(Bipartite(R * C.matrix * R.adjoint(), d, d));
      ASSERT_TRUE(trace_preserving(phi, 1e-9));
      EXPECT_GE(op_norm_inf(static_cast<double>(d) * identity(d) - phi.apply(identity(d))), d - 1 - 1e-9);
      EXPECT_NE(keb_certify(phi, 2, tol).route, Route::NormSufficient);
    }
}

TEST(KebCertify, KEqualsOneIsPositivity) {
  Tolerance tol;
  EXPECT_TRUE(keb_certify(werner_holevo(3, 1.0), 1, tol).verdict.holds());
  EXPECT_TRUE(keb_certify(werner_holevo(3, 1.2), 1, tol).verdict.fails());
  EXPECT_TRUE(keb_certify(ChannelRep::from_choi(choi_of(werner_holevo(3, 1.5))), 1, tol).verdict.fails());
}

TEST(KebThreshold, Examples) {
  auto w = keb_threshold(FamilyName::WernerHolevo, 4, 3);
  EXPECT_DOUBLE_EQ(w.lo, -1.0);
  EXPECT_DOUBLE_EQ(w.hi, 1.0 / 3);
  EXPECT_TRUE(w.exact);
  auto w1 = keb_threshold(FamilyName::WernerHolevo, 4, 1);
  EXPECT_DOUBLE_EQ(w1.lo, -1.0);
  EXPECT_DOUBLE_EQ(w1.hi, 1.0);
  auto p = keb_threshold(FamilyName::PhiLambda, 5, 2);
  EXPECT_DOUBLE_EQ(p.lo, -0.25);
  EXPECT_DOUBLE_EQ(p.hi, 1.0);
  EXPECT_DOUBLE_EQ(p.necLo, -1.0 / 3);
  EXPECT_FALSE(p.exact);
  ASSERT_TRUE(p.gap.has_value());
  EXPECT_DOUBLE_EQ(p.gap->first, -1.0 / 3);
  EXPECT_DOUBLE_EQ(p.gap->second, -0.25);
  auto full = keb_threshold(FamilyName::PhiLambda, 3, 3);
  EXPECT_DOUBLE_EQ(full.lo, -0.25);
  EXPECT_FALSE(full.gap.has_value());
  EXPECT_THROW(keb_threshold(FamilyName::Schur, 3, 2), InputError);
  for (int k = 1; k <= 4; ++k)
    EXPECT_DOUBLE_EQ(keb_threshold(FamilyName::WernerHolevo, 4, k).hi, k == 1 ? 1.0 : 1.0 / k);
}

TEST(Thresholds, WernerSharpness) {
  Tolerance tol;
  for (int d = 3; d <= 4; ++d)
    for (int k = 2; k < d; ++k) {
      ChannelRep above = werner_holevo(d, 1.0 / k + 0.05);
      auto r = keb_refute(above, k, tol);
      ASSERT_TRUE(r.verdict.fails()) << "d=" << d << " k=" << k;
      EXPECT_TRUE(reverify_keb_failure(above, r, tol));
      EXPECT_TRUE(keb_certify(werner_holevo(d, 1.0 / k), k, tol).verdict.holds());
      EXPECT_TRUE(keb_certify(werner_holevo(d, -1.0), k, tol).verdict.holds());
    }
}

TEST(DualPairing, Examples) {
  EXPECT_NEAR(dual_pairing(identity_map(2), identity_map(2)), 4.0, 1e-14);
  EXPECT_NEAR(dual_pairing(transpose_map(2), identity_map(2)), 2.0, 1e-14);
  EXPECT_THROW(dual_pairing(identity_map(2), identity_map(3)), InputError);
}

TEST(DualPairing, NonnegativeAgainstPositiveAfterPartialEb) {
  Rng rng(23);
  ChannelRep w = werner_holevo(3, 0.5);
  for (int t = 0; t < 50; ++t) {
    ChannelRep gamma = ChannelRep::from_kraus(random_kraus(1 + t % 3, 3, 3, rng));
    if (t % 2) gamma = compose(transpose_map(3), gamma);
    std::vector<Matrix> kraus;
    for (int n = 0; n < 1 + t % 3; ++n) kraus.push_back(random_matrix_of_rank(3, 3, 1 + n % 2, rng));
    EXPECT_GE(dual_pairing(w, compose(gamma, ChannelRep::from_kraus(kraus))), -1e-9);
  }
}

TEST(FlipSeparability, Examples) {
  Tolerance tol;
  EXPECT_TRUE(flip_separability_check(werner_holevo(3, 0.5), 2, 25, tol).holds());
  EXPECT_TRUE(flip_separability_check(trace_map(3), 2, 10, tol).holds());
  EXPECT_TRUE(flip_separability_check(transpose_conjugate(werner_holevo(3, 0.5)), 2, 10, tol).holds());
  EXPECT_THROW(flip_separability_check(identity_map(3), 2, 5, tol), InputError);
}

TEST(TransposeClosure, CertifiedMapsResistRefutation) {
  Tolerance tol;
  Rng rng(24);
  Matrix D = Matrix::Zero(3, 3);
  D(0, 0) = 1;
  D(2, 2) = 3;
  for (const auto& phi : {werner_holevo(3, 0.5), schur_map(D), ad_v(random_matrix_of_rank(3, 3, 1, rng))}) {
    ASSERT_TRUE(keb_certify(phi, 2, tol).verdict.holds());
    EXPECT_FALSE(keb_refute(transpose_conjugate(phi), 2, tol).verdict.fails());
  }
}

TEST(DirectSum, ClosureBothDirections) {
  Tolerance tol;
  Rng rng(25);
  Matrix D = Matrix::Zero(3, 3);
  D(0, 0) = 2;
  D(1, 1) = 1;
  ChannelRep good = direct_sum(werner_holevo(3, 0.5), schur_map(D));
  auto c = keb_certify(good, 2, tol);
  EXPECT_TRUE(c.verdict.holds());
  EXPECT_EQ(c.route, Route::DirectSum);
  EXPECT_FALSE(keb_refute(good, 2, tol).verdict.fails());

  ChannelRep bad = direct_sum(werner_holevo(3, 0.5), identity_map(3));
  EXPECT_TRUE(keb_certify(bad, 2, tol).verdict.fails());
  auto r = keb_refute(bad, 2, tol);
  ASSERT_TRUE(r.verdict.fails());
  EXPECT_TRUE(reverify_keb_failure(bad, r, tol));
}

TEST(CmwBound, AmplifiedSchmidtNumberDrops) {
  Rng rng(26);
  ChannelRep w = werner_holevo(3, 0.5);
  const int n = 2;
  for (int m = 2; m <= 3; ++m)
    for (int t = 0; t < 20; ++t) {
      Bipartite X(random_psd(3 * m, 1 + t % (3 * m), rng), m, 3);
      Bipartite Y = apply_second(w, X);
      EXPECT_LE(sn_lower_bound(Y, std::min(m, 3)).lower, std::max(m - n + 1, 1));
    }
}

TEST(SnReduction, Examples) {
  Tolerance tol;
  Rng rng(27);
  ChannelRep w = werner_holevo(3, 0.5);
  auto r = sn_reduction_check(w, ad_v(random_matrix_of_rank(3, 3, 2, rng)), tol);
  EXPECT_TRUE(r.verdict.holds());
  EXPECT_EQ(r.composite.upper, 1);
  EXPECT_GE(r.inner.lower, 2);
  EXPECT_THROW(sn_reduction_check(w, trace_map(3), tol), InputError);
  EXPECT_THROW(sn_reduction_check(identity_map(3), ad_v(random_matrix_of_rank(3, 3, 2, rng)), tol), InputError);
}

TEST(CompositionDegree, Examples) {
  EXPECT_EQ(composition_degree(2, 2, 3), 3);
  EXPECT_EQ(composition_degree(2, 2, 5), 3);
  EXPECT_EQ(composition_degree(3, 4, 4), 4);
  EXPECT_THROW(composition_degree(1, 2, 3), InputError);
}

TEST(PowerToEb, Examples) {
  Tolerance tol;
  auto p = power_to_eb(werner_holevo(3, 0.5), 2, tol);
  EXPECT_EQ(p.m, 2);
  EXPECT_TRUE(p.verification.holds());
  auto q = power_to_eb(werner_holevo(3, 1.0 / 3), 3, tol);
  EXPECT_EQ(q.m, 1);
  EXPECT_TRUE(q.verification.holds());
}

TEST(PptShortcut, Examples) {
  Tolerance tol;
  Rng rng(28);
  auto a = ppt_keb_shortcut(ChannelRep::from_choi(random_separable(4, 2, 5, rng)), tol);
  EXPECT_TRUE(a.verdict.holds());
  EXPECT_EQ(a.k, 3);
  auto b = ppt_keb_shortcut(ChannelRep::from_choi(random_separable(4, 3, 5, rng)), tol);
  EXPECT_TRUE(b.verdict.holds());
  EXPECT_EQ(b.k, 2);
  auto c = ppt_keb_shortcut(werner_holevo(4, 0.25), tol);
  EXPECT_TRUE(c.verdict.unknown());
  EXPECT_TRUE(ppt_keb_shortcut(identity_map(3), tol).verdict.unknown());
}

// Majorization of certified maps.

TEST(KebMajorization, Examples) {
  Tolerance tol;
  auto w = keb_majorization_check(werner_holevo(3, 0.5), 2, tol);
  EXPECT_TRUE(w.verdict.holds());
  EXPECT_EQ(w.factor, 2);
  auto e = keb_majorization_check(werner_holevo(3, 1.0 / 3), 3, tol);
  EXPECT_TRUE(e.verdict.holds());
  EXPECT_EQ(e.factor, 1);
  EXPECT_TRUE(keb_majorization_check(trace_map(3), 3, tol).verdict.holds());
  EXPECT_THROW(keb_majorization_check(identity_map(3), 2, tol), InputError);
}

}  // namespace
}  // namespace keb
