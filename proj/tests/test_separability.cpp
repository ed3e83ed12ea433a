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
#include <string>

#include "keb/io.hpp"
#include "keb/keb.hpp"
#include "test_util.hpp"

namespace keb {
namespace {

using testing::product_state;

Bipartite load_state(const std::string& name) {
  std::string path = std::string(KEB_FIXTURE_DIR) + "/" + name;
  return io::state_from_json(io::parse_json(io::read_file(path), path), 6);
}

ChannelRep load_channel(const std::string& name) {
  std::string path = std::string(KEB_FIXTURE_DIR) + "/" + name;
  return io::channel_from_json(io::parse_json(io::read_file(path), path), 6);
}

Bipartite random_entangled_pure(int d, Rng& rng) {
  for (;;) {
    Vector xi = random_unit_vector(d * d, rng);
    if (schmidt_rank(xi, d, d) >= 2) return Bipartite(xi * xi.adjoint(), d, d);
  }
}

TEST(SepRefute, Examples) {
  Tolerance tol;
  auto o = sep_refute(Bipartite(omega_projector(2), 2, 2), tol);
  ASSERT_TRUE(o.fails());
  EXPECT_EQ(o.method, "PPT");
  EXPECT_NEAR(*o.evidence.value, -1.0, 1e-12);
  EXPECT_TRUE(reverify_refutation(Bipartite(omega_projector(2), 2, 2), o, tol));

  Rng rng(1);
  Bipartite P(kron(random_psd(3, 2, rng), random_psd(3, 3, rng)), 3, 3);
  EXPECT_TRUE(sep_refute(P, tol).unknown());
}

TEST(SepRefute, RejectsNonPsdInput) {
  Tolerance tol;
  EXPECT_THROW(sep_refute(Bipartite(swap_operator(2), 2, 2), tol), InputError);
}

TEST(SepRefute, PptEntangledFixture) {
  Tolerance tol;
  Bipartite X = load_state("horodecki_2x4.json");
  ASSERT_EQ(X.dimA, 2);
  ASSERT_EQ(X.dimB, 4);
  EXPECT_GE(min_eigenvalue(X.matrix), -1e-12);
  EXPECT_GE(min_eigenvalue(partial_transpose(X, Side::Second).matrix), -1e-12);
  // The realignment test does not see this state.
  EXPECT_LE(nuclear_norm(realignment(X)), X.matrix.trace().real() + 1e-9);
  auto c = sep_refute(X, tol);
  ASSERT_TRUE(c.fails());
  EXPECT_EQ(c.method, "edge witness");
  EXPECT_EQ(c.evidence.kind, EvidenceKind::WitnessOperator);
  EXPECT_LT(*c.evidence.value, -tol.eps_psd);
  EXPECT_TRUE(reverify_refutation(X, c, tol));
  EXPECT_TRUE(certify_block_positive(Bipartite(c.evidence.matrix, 2, 4)));
  EXPECT_FALSE(sep_certify(X, tol).holds());
}

TEST(SepRefute, RealignmentDetectsEntangledPureStates) {
  Tolerance tol;
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    Bipartite X = random_entangled_pure(3, rng);
    EXPECT_GT(nuclear_norm(realignment(X)), X.matrix.trace().real() + 1e-6);
  }
}

TEST(SepRefute, RandomEntangledPureStatesFailPpt) {
  Tolerance tol;
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const int d = 2 + t % 3;
    Bipartite X = random_entangled_pure(d, rng);
    auto c = sep_refute(X, tol);
    ASSERT_TRUE(c.fails());
    EXPECT_EQ(c.method, "PPT");
    EXPECT_TRUE(reverify_refutation(X, c, tol));
  }
}

TEST(SepRefute, RandomSeparableStatesNeverFail) {
  Tolerance tol;
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    Bipartite X = random_separable(3, 3, 1 + t % 12, rng);
    EXPECT_FALSE(sep_refute(X, tol).fails());
    for (double lam : default_lambda_grid())
      for (Side side : {Side::First, Side::Second}) {
        EXPECT_TRUE(sep_necessary_inequality(X, lam, side, tol).holds());
        EXPECT_GE(min_eigenvalue(sep_inequality_operator(X, lam, side)), -1e-9);
      }
  }
}

TEST(SepNecessaryInequality, Examples) {
  Tolerance tol;
  Rng rng(5);
  Bipartite S = random_separable(3, 3, 4, rng);
  EXPECT_TRUE(sep_necessary_inequality(S, -0.5, Side::Second, tol).holds());
  for (int t = 0; t < 10; ++t) {
    Bipartite X(random_psd(9, 1 + t % 9, rng), 3, 3);
    EXPECT_TRUE(sep_necessary_inequality(X, 0.0, Side::First, tol).holds());
    EXPECT_TRUE(sep_necessary_inequality(X, 0.0, Side::Second, tol).holds());
  }
  Bipartite O(omega_projector(2), 2, 2);
  // Oracle: I (x) I - (|Omega><Omega| + Delta)/2 has eigenvalue 1 - 3/2 on Omega.
  Matrix op = identity(4) - (omega_projector(2) + swap_operator(2)) / 2.0;
  EXPECT_NEAR(min_eigenvalue(op), -0.5, 1e-12);
  for (Side side : {Side::First, Side::Second}) {
    auto c = sep_necessary_inequality(O, -0.5, side, tol);
    ASSERT_TRUE(c.fails());
    EXPECT_NEAR(*c.evidence.value, -0.5, 1e-12);
  }
  EXPECT_THROW(sep_necessary_inequality(O, -0.6, Side::First, tol), InputError);
  EXPECT_THROW(sep_necessary_inequality(Bipartite(identity(6), 2, 3), 0.0, Side::First, tol), InputError);
}

TEST(EbNecessary, Examples) {
  Tolerance tol;
  EXPECT_TRUE(eb_necessary(trace_map(3), default_lambda_grid(), tol).holds());
  auto i = eb_necessary(identity_map(2), {-0.5}, tol);
  ASSERT_TRUE(i.fails());
  EXPECT_NEAR(*i.evidence.value, -0.5, 1e-12);
  for (int d = 2; d <= 4; ++d)
    EXPECT_TRUE(eb_necessary(werner_holevo(d, 1.0 / d), default_lambda_grid(), tol).holds());
}

TEST(SepCertify, ProductOperator) {
  Tolerance tol;
  Rng rng(6);
  Bipartite P(kron(random_psd(3, 2, rng), random_psd(3, 3, rng)), 3, 3);
  auto c = sep_certify(P, tol);
  ASSERT_TRUE(c.holds());
  ASSERT_TRUE(c.decomposition.has_value());
  EXPECT_EQ(c.decomposition->terms.size(), 1u);
  EXPECT_LE(decomposition_residual(P, *c.decomposition), 1e-12);
}

TEST(SepCertify, TwirlRoute) {
  Tolerance tol;
  Bipartite X(identity(9) - 0.25 * (omega_projector(3) + swap_operator(3)), 3, 3);
  auto c = sep_certify(X, tol);
  ASSERT_TRUE(c.holds());
  EXPECT_EQ(c.method, "twirl-cone hull");
  EXPECT_LE((twirled_decomposition_operator(*c.decomposition, 3) - X.matrix).norm(), tol.eps_sep);
  Bipartite W(identity(9) - swap_operator(3) / 3.0, 3, 3);
  auto w = sep_certify(W, tol);
  ASSERT_TRUE(w.holds());
  EXPECT_EQ(w.method, "twirl-cone hull");
}

TEST(SepCertify, LowDimensionalPptIsExact) {
  Tolerance tol;
  Rng rng(7);
  Bipartite X = random_separable(2, 3, 8, rng);
  auto c = sep_certify(X, tol);
  ASSERT_TRUE(c.holds());
  EXPECT_EQ(c.method, "Peres-Horodecki exact");
  EXPECT_TRUE(c.analytic_without_decomposition);
  EXPECT_FALSE(c.decomposition.has_value());
}

TEST(SepCertify, LocalSupportReduction) {
  Tolerance tol;
  Rng rng(8);
  // Separable state on 4 (x) 4 whose local supports are 2 (x) 3.
  Matrix SA = random_unitary(4, rng).leftCols(2), SB = random_unitary(4, rng).leftCols(3);
  Bipartite small = random_separable(2, 3, 6, rng);
  Matrix L = kron(SA, SB);
  Bipartite X(L * small.matrix * L.adjoint(), 4, 4);
  auto c = sep_certify(X, tol);
  ASSERT_TRUE(c.holds());
  EXPECT_EQ(c.method, "Peres-Horodecki exact");
}

TEST(SepCertify, ProductPursuitDecompositionsReverify) {
  Tolerance tol;
  Rng rng(9);
  int pursued = 0;
  for (int terms : {4, 5, 9, 12}) {
    Bipartite X = random_separable(3, 3, terms, rng);
    auto c = sep_certify(X, tol);
    ASSERT_TRUE(c.holds()) << terms;
    if (c.method != "product pursuit") continue;
    ++pursued;
    ASSERT_TRUE(c.decomposition.has_value());
    Matrix sum = Matrix::Zero(9, 9);
    for (const auto& [A, B] : c.decomposition->terms) {
      EXPECT_GE(min_eigenvalue(A, 1e-8), -tol.eps_psd);
      EXPECT_GE(min_eigenvalue(B, 1e-8), -tol.eps_psd);
      sum += kron(A, B);
    }
    EXPECT_LE((sum - X.matrix).norm(), tol.eps_sep);
    EXPECT_TRUE(verify_decomposition(X, *c.decomposition, tol));
    EXPECT_FALSE(sep_refute(X, tol).fails());
  }
  EXPECT_EQ(pursued, 4);
}

TEST(SepCertify, NeverContradictsRefutation) {
  Tolerance tol;
  Rng rng(10);
  for (int t = 0; t < 20; ++t) {
    const int d = 2 + t % 2;
    Bipartite X(random_psd(d * d, 1 + t % (d * d), rng), d, d);
    Certificate r = sep_refute(X, tol);
    SepCertifyOptions opt;
    opt.maxTerms = 60;
    Certificate c = sep_certify(X, tol, opt);
    EXPECT_FALSE(r.fails() && c.holds());
  }
}

TEST(SepCertify, EntangledStaysUncertified) {
  Tolerance tol;
  SepCertifyOptions opt;
  opt.maxTerms = 60;
  EXPECT_FALSE(sep_certify(Bipartite(omega_projector(3), 3, 3), tol, opt).holds());
}

TEST(EdgeWitness, RejectsSeparableAndFullRank) {
  Tolerance tol;
  Rng rng(11);
  EXPECT_FALSE(edge_witness(Bipartite(identity(8), 2, 4), tol).found);
  EXPECT_FALSE(edge_witness(random_separable(2, 4, 3, rng), tol).found);
}

TEST(EdgeWitness, BlockPositiveCertificate) {
  EXPECT_TRUE(certify_block_positive(Bipartite(swap_operator(2) + identity(4), 2, 2)));
  EXPECT_FALSE(certify_block_positive(Bipartite(identity(4) - 2.0 * omega_projector(2), 2, 2)));
}

TEST(QubitProductLowerBound, IsBelowSampledProductValues) {
  Rng rng(12);
  Matrix Z = random_hermitian(8, rng);
  double lb = qubit_product_lower_bound(Z, 4);
  for (int t = 0; t < 2000; ++t) {
    Vector v = kron(random_unit_vector(2, rng), random_unit_vector(4, rng));
    EXPECT_GE((v.adjoint() * Z * v)(0, 0).real(), lb - 1e-12);
  }
}

TEST(NnlsGram, MatchesKnownSolution) {
  Eigen::MatrixXd G(2, 2);
  G << 1, 0, 0, 1;
  Eigen::VectorXd h(2);
  h << 2, -1;
  Eigen::VectorXd x = detail::nnls_gram(G, h);
  EXPECT_NEAR(x(0), 2.0, 1e-12);
  EXPECT_NEAR(x(1), 0.0, 1e-12);
}

TEST(PptNon2EbFixture, IsPptButNotTwoEb) {
  Tolerance tol;
  ChannelRep phi = load_channel("ppt_non2eb_m4.json");
  ASSERT_EQ(phi.dim_in(), 4);
  ASSERT_EQ(phi.dim_out(), 4);
  EXPECT_TRUE(is_ppt_map(phi, tol).holds());
  EXPECT_TRUE(keb_certify(phi, 2, tol).verdict.unknown());
  auto r = keb_refute(phi, 2, tol);
  ASSERT_TRUE(r.verdict.fails());
  EXPECT_TRUE(reverify_keb_failure(phi, r, tol));
}

TEST(Fixtures, ChannelSpecsLoad) {
  Tolerance tol;
  EXPECT_LE(choi_distance(load_channel("werner_holevo_d3_l0.4.json"), werner_holevo(3, 0.4)), 1e-15);
  EXPECT_LE(choi_distance(load_channel("identity_d2.json"), identity_map(2)), 1e-15);
  EXPECT_LE(choi_distance(load_channel("trace_map_d3.json"), trace_map(3)), 1e-15);
  ChannelRep amp = load_channel("amplitude_damping_kraus.json");
  EXPECT_TRUE(is_cp(amp, tol).holds());
  EXPECT_TRUE(trace_preserving(amp, 1e-12));
}

}  // namespace
}  // namespace keb
