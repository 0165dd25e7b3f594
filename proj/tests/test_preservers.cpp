#include "symprod/exact.hpp"
#include "symprod/fixtures.hpp"
#include "symprod/preservers.hpp"

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

/// T([[a,b],[b,d]]) = [[a, b + d], [b + d, 0]]
LinOp rank_two_producer() {
  MatrixXd cols(3, 3);
  for (int c = 0; c < 3; ++c) {
    const MatrixXd a = smat(VectorXd::Unit(3, c));
    cols.col(c) = svec(m2(a(0, 0), a(0, 1) + a(1, 1), a(0, 1) + a(1, 1), 0));
  }
  return LinOp(2, cols);
}

const ConeSpec kOrthant2 = ConeSpec::orthant(2);

}  // namespace

TEST(P2Of, Identity) { EXPECT_TRUE(p2_of(VecMap::identity(3)).mat().isApprox(MatrixXd::Identity(6, 6), 1e-15)); }

TEST(P2Of, HandExample) {
  const LinOp t = p2_of(VecMap(m2(1, 1, 0, 1)));
  EXPECT_TRUE(t(sym_outer(v({1, 1}))).matrix().isApprox(m2(4, 2, 2, 1), 1e-14));
}

TEST(P2Of, ZeroMapAndZeroScale) {
  EXPECT_EQ(linalg::max_abs(p2_of(VecMap(MatrixXd::Zero(2, 2))).mat()), 0.0);
  EXPECT_EQ(code_of([] { p2_of(VecMap::identity(2), 0.0); }), ErrorCode::ZeroScale);
}

TEST(P2Of, MatchesConjugation) {
  auto rng = fixtures::instance_rng(31, 0, 0);
  const MatrixXd f = fixtures::gaussian(rng, 4, 4);
  const SymMat a = fixtures::random_symmat(rng, 4);
  EXPECT_TRUE(p2_of(VecMap(f), -2.0)(a).matrix().isApprox(-2.0 * f * a.matrix() * f.transpose(), 1e-12));
}

TEST(FunctionalMap, TraceMap) {
  const LinOp t = functional_map(SymMat::identity(3), sym_outer(VectorXd::Ones(3)));
  auto rng = fixtures::instance_rng(32, 0, 0);
  const SymMat a = fixtures::random_symmat(rng, 3);
  EXPECT_TRUE(t(a).matrix().isApprox(a.matrix().trace() * MatrixXd::Ones(3, 3), 1e-12));
}

TEST(FunctionalMap, Examples) {
  EXPECT_EQ(linalg::max_abs(functional_map(SymMat::zero(2), SymMat::identity(2)).mat()), 0.0);
  const LinOp t = functional_map(sym_outer(v({1, 0})), sym_outer(v({0, 1})));
  EXPECT_TRUE(t(SymMat::from_matrix(m2(3, 0, 0, 5))).matrix().isApprox(m2(0, 0, 0, 3), 1e-15));
}

TEST(RankOneTest, SecondPowersAndFunctionalsHold) {
  auto rng = fixtures::instance_rng(33, 0, 0);
  for (int n = 1; n <= 5; ++n) {
    EXPECT_TRUE(is_rank_one_nonincreasing(p2_of(VecMap(fixtures::gaussian(rng, n, n)), -1.0)).holds);
    const LinOp f = functional_map(fixtures::random_symmat(rng, n), sym_outer(fixtures::gaussian_vector(rng, n)));
    EXPECT_TRUE(is_rank_one_nonincreasing(f).holds);
  }
  EXPECT_TRUE(is_rank_one_nonincreasing(LinOp::identity(2)).holds);
}

TEST(RankOneTest, RankTwoProducer) {
  const LinOp t = rank_two_producer();
  EXPECT_TRUE(t(sym_outer(v({0, 1}))).matrix().isApprox(m2(0, 1, 1, 0), 1e-15));
  const RankOneCheck r = is_rank_one_nonincreasing(t);
  EXPECT_FALSE(r.holds);
  ASSERT_TRUE(r.witness);
  EXPECT_GE(tensor_rank(t(sym_outer(*r.witness))), 2);
  ASSERT_TRUE(r.minor);
}

TEST(RankOneTest, RandomizedModeAgreesAndReportsBound) {
  PitOptions opts;
  opts.mode = PitMode::Randomized;
  opts.seed = 9;
  const RankOneCheck bad = is_rank_one_nonincreasing(rank_two_producer(), opts);
  EXPECT_FALSE(bad.holds);
  const RankOneCheck good = is_rank_one_nonincreasing(p2_of(VecMap(m2(1, 2, 3, 4))), opts);
  EXPECT_TRUE(good.holds);
  EXPECT_LT(good.failure_probability, 1e-100);
  EXPECT_EQ(good.points_evaluated, 64u);
}

TEST(RankOneTest, ExactGridTooLarge) {
  EXPECT_EQ(code_of([] { is_rank_one_nonincreasing(LinOp::identity(9)); }), ErrorCode::TooLarge);
  PitOptions opts;
  opts.mode = PitMode::Randomized;
  opts.trials = 4;
  EXPECT_TRUE(is_rank_one_nonincreasing(LinOp::identity(9), opts).holds);
}

TEST(RankOneTest, RationalMode) {
  using exact::Rational;
  const auto f = exact::Dense<Rational>::from_rows({{Rational(1, 3), 2}, {Rational(-1), Rational(5, 2)}});
  EXPECT_TRUE(exact::is_rank_one_nonincreasing(exact::p2_of(f, Rational(1))).holds);
  const auto id = exact::Dense<Rational>::identity(2);
  const auto t = exact::functional_map(id, id);  // A -> tr(A) I
  const RankOneCheck r = exact::is_rank_one_nonincreasing(t);
  EXPECT_FALSE(r.holds);
  EXPECT_FALSE(exact::is_rank_one_nonincreasing(t, PitMode::Randomized, 8, 1).holds);
}

TEST(Classify, SecondPowerRoundTrip) {
  const PreserverForm form = classify_preserver(p2_of(VecMap(m2(1, 1, 0, 1))));
  const auto* sp = std::get_if<SecondPower>(&form);
  ASSERT_NE(sp, nullptr);
  EXPECT_EQ(sp->c, 1.0);
  EXPECT_TRUE(sp->f.mat.isApprox(m2(1, 1, 0, 1), 1e-12));
  EXPECT_LE(sp->residual, 1e-9);
}

TEST(Classify, GaugeFixesSign) {
  const PreserverForm form = classify_preserver(p2_of(VecMap(m2(-1, 2, -3, 1)), -4.0));
  const auto* sp = std::get_if<SecondPower>(&form);
  ASSERT_NE(sp, nullptr);
  EXPECT_EQ(sp->c, -1.0);
  EXPECT_TRUE(sp->f.mat.isApprox(2.0 * m2(1, -2, 3, -1), 1e-12));
}

TEST(Classify, TraceMapIsFunctional) {
  const int n = 3;
  const PreserverForm form = classify_preserver(functional_map(SymMat::identity(n), sym_outer(VectorXd::Ones(n))));
  const auto* fn = std::get_if<Functional>(&form);
  ASSERT_NE(fn, nullptr);
  // gauge: B = y y^T with |y| = 1, scale moved into U
  EXPECT_TRUE(fn->b.matrix().isApprox(MatrixXd::Ones(n, n) / 3.0, 1e-12));
  EXPECT_TRUE(fn->u.matrix().isApprox(3.0 * MatrixXd::Identity(n, n), 1e-12));
}

TEST(Classify, ZeroOperator) {
  const PreserverForm form = classify_preserver(LinOp::zero(3));
  const auto* fn = std::get_if<Functional>(&form);
  ASSERT_NE(fn, nullptr);
  EXPECT_EQ(fn->u.norm(), 0.0);
}

TEST(Classify, NotPreserverWitness) {
  const PreserverForm form = classify_preserver(rank_two_producer());
  const auto* np = std::get_if<NotPreserver>(&form);
  ASSERT_NE(np, nullptr);
  EXPECT_TRUE(np->witness.isApprox(v({0, 1}), 1e-15));
  EXPECT_EQ(np->image_rank, 2);
}

TEST(Classify, DegenerateColumns) {
  MatrixXd f(3, 3);
  f << 1, 0, 2, 0, 0, 1, 3, 0, 1;  // zero second column
  const PreserverForm form = classify_preserver(p2_of(VecMap(f)));
  const auto* sp = std::get_if<SecondPower>(&form);
  ASSERT_NE(sp, nullptr);
  EXPECT_LE(linalg::max_abs(p2_of(sp->f, sp->c).mat() - p2_of(VecMap(f)).mat()), 1e-12);
}

TEST(UnisignedRangeTest, Examples) {
  EXPECT_EQ(check_unisigned_range(VecMap(m2(1, 2, 3, 4)), kOrthant2).kind, UnisignedRange::Kind::PositiveOp);
  EXPECT_EQ(check_unisigned_range(VecMap(-m2(1, 2, 3, 4)), kOrthant2).kind, UnisignedRange::Kind::NegativeOp);

  const UnisignedRange r1 = check_unisigned_range(VecMap(v({1, 1}) * v({1, -1}).transpose()), kOrthant2);
  ASSERT_EQ(r1.kind, UnisignedRange::Kind::RankOne);
  EXPECT_TRUE(r1.u.isApprox(v({1, 1}), 1e-12));
  EXPECT_TRUE(r1.psi.isApprox(v({1, -1}), 1e-12));

  const UnisignedRange bad = check_unisigned_range(VecMap(m2(1, 0, 0, -1)), kOrthant2);
  ASSERT_EQ(bad.kind, UnisignedRange::Kind::Fails);
  EXPECT_TRUE(bad.witness.isApprox(v({1, 1}), 1e-12));
}

TEST(UnisignedRangeTest, WitnessFromSegment) {
  // Generators map into K and -K respectively, only a mixture leaves both.
  MatrixXd f(3, 3);
  f << 1, -1, 0, 1, -2, 0, 0, 0, 1;
  const UnisignedRange r = check_unisigned_range(VecMap(f), ConeSpec::orthant(3));
  ASSERT_EQ(r.kind, UnisignedRange::Kind::Fails);
  EXPECT_GE(r.witness.minCoeff(), 0.0);
  EXPECT_EQ(is_unisigned(ConeSpec::orthant(3), f * r.witness), Sign::Neither);
}

TEST(PositiveDecomposables, Examples) {
  EXPECT_TRUE(preserves_positive_decomposables(p2_of(VecMap(m2(1, 2, 0, 3))), kOrthant2).holds);

  const LinOp fn = functional_map(SymMat::from_matrix(m2(1, -1, -1, 1)), sym_outer(v({1, 1})));
  EXPECT_TRUE(preserves_positive_decomposables(fn, kOrthant2).holds);

  const ConeDecision bad = preserves_positive_decomposables(p2_of(VecMap(m2(1, 0, 0, -1))), kOrthant2);
  EXPECT_FALSE(bad.holds);
  ASSERT_TRUE(bad.witness);
  EXPECT_TRUE(bad.witness->isApprox(v({1, 1}), 1e-12));
}

TEST(PositiveDecomposables, NegativeScaleAndNonCopositive) {
  EXPECT_FALSE(preserves_positive_decomposables(p2_of(VecMap(m2(1, 2, 0, 3)), -1.0), kOrthant2).holds);
  const LinOp fn = functional_map(SymMat::from_matrix(m2(0, -1, -1, 0)), sym_outer(v({1, 1})));
  const ConeDecision d = preserves_positive_decomposables(fn, kOrthant2);
  EXPECT_FALSE(d.holds);
  ASSERT_TRUE(d.witness);
  EXPECT_LT(SymMat::from_matrix(m2(0, -1, -1, 0)).quadratic(*d.witness), 0.0);
}

TEST(PositiveDecomposables, DimensionMismatch) {
  EXPECT_EQ(code_of([] { preserves_positive_decomposables(LinOp::identity(3), kOrthant2); }),
            ErrorCode::DimensionMismatch);
}

TEST(Cp1, Examples) {
  const Cp1Decision a = classify_cp1_preserver(p2_of(VecMap(m2(1, 1, 0, 1))), kOrthant2);
  EXPECT_EQ(a.kind, Cp1Decision::Kind::FormI);
  ASSERT_TRUE(a.f);

  const Cp1Decision b = classify_cp1_preserver(functional_map(SymMat::identity(2), sym_outer(v({1, 1}))), kOrthant2);
  EXPECT_EQ(b.kind, Cp1Decision::Kind::FormII);

  const LinOp zero_col = p2_of(VecMap(m2(1, 0, 0, 0)));
  const Cp1Decision c = classify_cp1_preserver(zero_col, kOrthant2);
  EXPECT_EQ(c.kind, Cp1Decision::Kind::No);
  ASSERT_TRUE(c.witness);
  EXPECT_TRUE(c.witness->isApprox(v({0, 1}), 1e-12));
  EXPECT_EQ(zero_col(sym_outer(*c.witness)).norm(), 0.0);
}

TEST(Cp1, MerelyCopositiveIsNo) {
  const LinOp t = functional_map(SymMat::from_matrix(m2(1, -1, -1, 1)), sym_outer(v({1, 2})));
  const Cp1Decision d = classify_cp1_preserver(t, kOrthant2);
  EXPECT_EQ(d.kind, Cp1Decision::Kind::No);
  ASSERT_TRUE(d.witness);
  EXPECT_LE(t(sym_outer(*d.witness)).norm(), 1e-12);
}

TEST(AutCp, Examples) {
  const AutDecision a = is_aut_cp(p2_of(VecMap(m2(2, 0, 0, 3))), kOrthant2);
  EXPECT_TRUE(a.yes);
  ASSERT_TRUE(a.f);
  EXPECT_TRUE(a.f->mat.isApprox(m2(2, 0, 0, 3), 1e-12));

  EXPECT_TRUE(is_aut_cp(p2_of(VecMap(m2(0, 1, 1, 0))), kOrthant2).yes);

  const AutDecision c = is_aut_cp(p2_of(VecMap(m2(1, 1, 0, 1))), kOrthant2);
  EXPECT_FALSE(c.yes);
  EXPECT_EQ(c.reason, AutDecision::Reason::InverseNotPositive);
}

TEST(AutCp, SignGaugeAndReasons) {
  const AutDecision neg = is_aut_cp(p2_of(VecMap(-m2(0, 2, 5, 0))), kOrthant2);
  EXPECT_TRUE(neg.yes);
  EXPECT_TRUE(neg.f->mat.isApprox(m2(0, 2, 5, 0), 1e-12));
  EXPECT_EQ(is_aut_cp(p2_of(VecMap(m2(2, 0, 0, 3)), -1.0), kOrthant2).reason, AutDecision::Reason::NegativeScale);
  EXPECT_EQ(is_aut_cp(p2_of(VecMap(m2(1, 0, 0, -1))), kOrthant2).reason, AutDecision::Reason::NotPositive);
  EXPECT_EQ(is_aut_cp(LinOp::zero(2), kOrthant2).reason, AutDecision::Reason::Singular);
  EXPECT_EQ(is_aut_cp(functional_map(SymMat::identity(2), SymMat::identity(2)), kOrthant2).reason,
            AutDecision::Reason::Singular);
}

TEST(AutCp, OneDimensional) {
  const LinOp t(1, MatrixXd::Constant(1, 1, 4.0));
  const AutDecision a = is_aut_cp(t, ConeSpec::orthant(1));
  EXPECT_TRUE(a.yes);
  EXPECT_NEAR(a.f->mat(0, 0), 2.0, 1e-15);
  EXPECT_EQ(is_aut_cp(t * -1.0, ConeSpec::orthant(1)).reason, AutDecision::Reason::NegativeScale);
}

TEST(AutCp, GeneratedCone) {
  const ConeSpec wedge = ConeSpec::generated(m2(1, 1, 0, 1));
  // swaps the generators (1,0) and (1,1)
  const MatrixXd g = m2(1, 1, 0, 1);
  MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  const MatrixXd f = g * swap * g.inverse();
  EXPECT_TRUE(is_aut_cp(p2_of(VecMap(f)), wedge).yes);
  EXPECT_FALSE(is_aut_cp(p2_of(VecMap(swap)), wedge).yes);
}
