#include "symprod/fixtures.hpp"
#include "symprod/nnls.hpp"

#include <gtest/gtest.h>

using namespace symprod;

namespace {

VectorXd v(std::initializer_list<double> xs) {
  VectorXd out(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) out(i++) = x;
  return out;
}

MatrixXd m2(double a, double b, double c, double d) {
  MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

ConeSpec wedge() { return ConeSpec::generated(m2(1, 1, 0, 1)); }  // g1 = (1,0), g2 = (1,1)

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Schema;
}

}  // namespace

TEST(Member, Orthant) {
  const ConeSpec k = ConeSpec::orthant(2);
  EXPECT_TRUE(member(k, v({1, 2})).member);
  EXPECT_FALSE(member(k, v({1, -1})).member);
}

TEST(Member, GeneratedReturnsMultipliers) {
  const Membership m = member(wedge(), v({2, 1}));
  ASSERT_TRUE(m.member);
  EXPECT_TRUE(m.multipliers.isApprox(v({1, 1}), 1e-12));
  EXPECT_FALSE(member(wedge(), v({0, 1})).member);
}

TEST(Member, DimensionMismatch) {
  EXPECT_EQ(code_of([] { member(ConeSpec::orthant(2), v({1, 2, 3})); }), ErrorCode::DimensionMismatch);
}

TEST(ConeSpecValidation, RejectsBadGenerators) {
  EXPECT_EQ(code_of([] { ConeSpec::generated(m2(1, 0, 0, 0)); }), ErrorCode::InvalidCone);
  EXPECT_EQ(code_of([] { ConeSpec::generated(m2(1, -1, 0, 0)); }), ErrorCode::InvalidCone);
  MatrixXd line(2, 3);
  line << 1, -1, 0, 0, 0, 1;  // contains the line through e1
  EXPECT_EQ(code_of([&] { ConeSpec::generated(line); }), ErrorCode::InvalidCone);
  EXPECT_EQ(code_of([] { ConeSpec::orthant(0); }), ErrorCode::InvalidCone);
}

TEST(Unisigned, Examples) {
  const ConeSpec k = ConeSpec::orthant(2);
  EXPECT_EQ(is_unisigned(k, v({0, 0})), Sign::Both);
  EXPECT_EQ(is_unisigned(k, v({-1, -3})), Sign::Minus);
  EXPECT_EQ(is_unisigned(k, v({1, -1})), Sign::Neither);
  EXPECT_EQ(is_unisigned(k, v({2, 0})), Sign::Plus);
}

TEST(PositiveDecomposableTest, Examples) {
  const ConeSpec k = ConeSpec::orthant(2);
  const PositiveDecomposable a = is_positive_decomposable(k, SymMat::from_matrix(m2(4, 2, 2, 1)));
  ASSERT_TRUE(a.x);
  EXPECT_TRUE(a.x->isApprox(v({2, 1}), 1e-12));
  const PositiveDecomposable b = is_positive_decomposable(k, SymMat::from_matrix(m2(-1, 0, 0, 0)));
  EXPECT_FALSE(b.x);
  EXPECT_EQ(b.reason, DecomposableReason::NegativeLambda);
  const PositiveDecomposable c = is_positive_decomposable(k, SymMat::from_matrix(m2(1, -1, -1, 1)));
  EXPECT_FALSE(c.x);
  EXPECT_EQ(c.reason, DecomposableReason::NotInCone);
  EXPECT_EQ(is_positive_decomposable(k, SymMat::identity(2)).reason, DecomposableReason::NotRankOne);
}

TEST(PositiveDecomposableTest, NegativeVectorFlipsIntoCone) {
  const PositiveDecomposable a = is_positive_decomposable(ConeSpec::orthant(3), sym_outer(v({-1, -2, 0})));
  ASSERT_TRUE(a.x);
  EXPECT_TRUE(a.x->isApprox(v({1, 2, 0}), 1e-12));
}

TEST(Copositive, Examples) {
  EXPECT_TRUE(is_strictly_copositive(SymMat::identity(2)));
  EXPECT_NEAR(simplex_minimum(MatrixXd::Identity(2, 2)).value, 0.5, 1e-14);
  EXPECT_NEAR(simplex_minimum(MatrixXd::Identity(4, 4)).value, 0.25, 1e-14);

  const SymMat semi = SymMat::from_matrix(m2(1, -1, -1, 1));
  EXPECT_TRUE(is_copositive(semi));
  EXPECT_FALSE(is_strictly_copositive(semi));
  const SimplexMinimum sm = simplex_minimum(semi.matrix());
  EXPECT_NEAR(sm.argmin(0), 0.5, 1e-12);
  EXPECT_NEAR(sm.argmin(1), 0.5, 1e-12);

  const SymMat neg = SymMat::from_matrix(m2(0, -1, -1, 0));
  EXPECT_FALSE(is_copositive(neg));
  EXPECT_NEAR(simplex_minimum(neg.matrix()).value, -0.5, 1e-14);
}

TEST(Copositive, HornMatrixIsCopositiveNotPsd) {
  MatrixXd h(5, 5);
  h << 1, -1, 1, 1, -1, -1, 1, -1, 1, 1, 1, -1, 1, -1, 1, 1, 1, -1, 1, -1, -1, 1, 1, -1, 1;
  EXPECT_TRUE(is_copositive(SymMat::from_matrix(h)));
  EXPECT_FALSE(is_strictly_copositive(SymMat::from_matrix(h)));
  EXPECT_LT(Eigen::SelfAdjointEigenSolver<MatrixXd>(h).eigenvalues()(0), 0.0);
}

TEST(Copositive, TooLarge) {
  EXPECT_EQ(code_of([] { is_copositive(SymMat::identity(13)); }), ErrorCode::TooLarge);
}

TEST(Copositive, OverGeneratedCone) {
  // U = [[0,-1],[-1,1]]: g2^T U g2 = -1
  EXPECT_FALSE(cone_simplex_minimum(wedge(), SymMat::from_matrix(m2(0, -1, -1, 1))).copositive);
  // U = diag(1, -1/2) is negative at e2, which the wedge never reaches.
  const SymMat u = SymMat::from_matrix(m2(1, 0, 0, -0.5));
  EXPECT_FALSE(is_copositive(u));
  const SimplexMinimum over = cone_simplex_minimum(wedge(), u);
  EXPECT_TRUE(over.copositive);
  EXPECT_TRUE(over.strictly_copositive);
}

TEST(CpMembershipTest, RankOneCertificate) {
  const VectorXd x = v({1, 2, 3});
  const CpMembership m = cp_membership(sym_outer(x));
  ASSERT_EQ(m.verdict, CpVerdict::Yes);
  ASSERT_TRUE(m.certificate);
  ASSERT_EQ(m.certificate->factors.size(), 1u);
  EXPECT_TRUE(m.certificate->factors[0].isApprox(x, 1e-12));
}

TEST(CpMembershipTest, IdentityCertificate) {
  const CpMembership m = cp_membership(SymMat::identity(2));
  ASSERT_EQ(m.verdict, CpVerdict::Yes);
  ASSERT_TRUE(m.certificate);
  EXPECT_EQ(m.certificate->factors.size(), 2u);
  EXPECT_LE((m.certificate->reconstruct(2) - MatrixXd::Identity(2, 2)).norm(), 1e-12);
}

TEST(CpMembershipTest, NegativeEntryIsNo) {
  EXPECT_EQ(cp_membership(SymMat::from_matrix(m2(1, -1, -1, 1))).verdict, CpVerdict::No);
}

TEST(CpMembershipTest, Dnn4CertificateFound) {
  MatrixXd a(4, 4);
  a << 2, 1, 0, 1, 1, 2, 1, 0, 0, 1, 2, 1, 1, 0, 1, 2;
  const CpMembership m = cp_membership(SymMat::from_matrix(a));
  EXPECT_EQ(m.verdict, CpVerdict::Yes);
  if (m.certificate) {
    EXPECT_LE(m.certificate->residual, kCpResidualTol);
    for (const VectorXd& u : m.certificate->factors) EXPECT_GE(u.minCoeff(), 0.0);
  }
}

TEST(CpRankTest, Examples) {
  const CpRank r1 = cp_rank(sym_outer(v({1, 0, 2})));
  ASSERT_TRUE(r1.rank);
  EXPECT_EQ(*r1.rank, 1);
  const CpRank r2 = cp_rank(SymMat::identity(2));
  ASSERT_TRUE(r2.rank);
  EXPECT_EQ(*r2.rank, 2);
  EXPECT_TRUE(r2.meets_lower_bound);
  EXPECT_EQ(code_of([] { cp_rank(SymMat::zero(2)); }), ErrorCode::Zero);
}

TEST(CpRankTest, AtLeastTensorRank) {
  auto rng = fixtures::instance_rng(21, 0, 0);
  for (int t = 0; t < 20; ++t) {
    const int n = fixtures::uniform_int(rng, 2, 4);
    const int k = fixtures::uniform_int(rng, 1, n);
    const MatrixXd w = fixtures::nonnegative(rng, n, k);
    const SymMat a = SymMat::from_matrix(w * w.transpose());
    const CpRank r = cp_rank(a, 3);
    ASSERT_TRUE(r.rank);
    EXPECT_GE(*r.rank, tensor_rank(a));
    EXPECT_LE(r.certificate->residual, kCpResidualTol);
  }
}

TEST(Extremal, SingleSupport) {
  const ExtremalityReport r = check_extremal_cp(v({1, 0}), 8, 1);
  EXPECT_TRUE(r.passed);
  EXPECT_GT(r.certificates_found, 0);
  EXPECT_LE(r.max_collinearity_defect, 1e-8);
}

TEST(Extremal, AllOnes) {
  const ExtremalityReport r = check_extremal_cp(v({1, 1}), 8, 2);
  EXPECT_TRUE(r.passed);
  EXPECT_GT(r.certificates_found, 0);
  EXPECT_GT(r.functionals_checked, 0);
  EXPECT_LE(r.max_functional_defect, 1e-8);
}

TEST(Extremal, ZeroIsDegenerate) {
  const ExtremalityReport r = check_extremal_cp(v({0, 0}), 8, 3);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.trials, 0);
}

TEST(Nnls, RecoversNonnegativeSolution) {
  MatrixXd a(3, 2);
  a << 1, 0, 0, 1, 1, 1;
  const NnlsResult r = nnls(a, a * v({2, 0.5}));
  EXPECT_TRUE(r.converged);
  EXPECT_TRUE(r.x.isApprox(v({2, 0.5}), 1e-12));
  const NnlsResult clipped = nnls(MatrixXd::Identity(2, 2), v({1, -1}));
  EXPECT_TRUE(clipped.x.isApprox(v({1, 0}), 1e-14));
}

TEST(ConeProperties, Pointedness) {
  auto rng = fixtures::instance_rng(22, 0, 0);
  const ConeSpec k = wedge();
  for (int t = 0; t < 100; ++t) {
    const VectorXd x = fixtures::gaussian_vector(rng, 2);
    EXPECT_FALSE(member(k, x).member && member(k, -x).member);
  }
  EXPECT_TRUE(member(k, VectorXd::Zero(2)).member && member(k, -VectorXd::Zero(2)).member);
}

TEST(ConeProperties, CopositivityChain) {
  auto rng = fixtures::instance_rng(23, 0, 0);
  for (int t = 0; t < 100; ++t) {
    const int n = fixtures::uniform_int(rng, 1, 6);
    const SymMat s = fixtures::strictly_copositive(rng, n);
    EXPECT_TRUE(is_strictly_copositive(s));
    EXPECT_TRUE(is_copositive(s));
    const MatrixXd g = fixtures::gaussian(rng, n, n);
    EXPECT_TRUE(is_copositive(SymMat::from_matrix(g * g.transpose())));
    const SymMat merely = fixtures::merely_copositive(rng, n);
    EXPECT_TRUE(is_copositive(merely));
    EXPECT_FALSE(is_strictly_copositive(merely));
  }
}
