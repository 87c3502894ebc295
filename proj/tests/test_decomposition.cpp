#include <gtest/gtest.h>

#include "melonic/decomposition.hpp"

using namespace melonic;

namespace {

Monomial lam_n(int hl, int hn) {
  Monomial m;
  m.hl = hl;
  m.hn = hn;
  return m;
}

std::size_t binom(int n, int k) {
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST(YOperator, LevelCounts) {
  EXPECT_EQ(y_level_size(build_Y(2, 1), 1), 2U);
  EXPECT_EQ(y_level_size(build_Y(3, 1), 2), 6U);
  for (int D : {2, 3, 4})
    for (int m = 1; m <= 4; ++m) EXPECT_EQ(y_level_size(build_Y(D, 2), m), binom(m + D - 1, D - 1));
  const DiffOp y = build_Y(3, 2);
  for (const auto& [k, c] : y.terms()) {
    EXPECT_GE(k.first.hl, 1);
    EXPECT_EQ(powers_degree(k.second), 3);
  }
}

TEST(YOperator, CoefficientAtLevelOne) {
  // q = (1,0): (+1)/N^2 * (-i) * sqrt(lambda/2) d_{t1_1} d_{t2_0}
  const DiffOp y = build_Y(2, 1);
  Monomial m = lam_n(1, -4);
  m.h2 = 1;
  const GaussRat c(0, mpq_class(-1, 2));
  const VarPowers d = {{tvar(1, 1).key(), 1}, {tvar(2, 0).key(), 1}};
  ASSERT_TRUE(y.terms().count({m, d}));
  EXPECT_EQ(y.terms().at({m, d}), c);
}

TEST(XOperator, TotalDegreeGrading) {
  const DiffOp x = build_X(3, 4);
  for (const auto& b : basis_monomials(3, 4, 2)) {
    const Series s = Series::from_monomial(b);
    EXPECT_EQ(apply(x, s), s * GaussRat(-b.time_degree()));
  }
}

TEST(Decomposition, LambdaZero) {
  MelonicModel m;
  m.K = 0;
  const auto r = decomposition_residual(m);
  EXPECT_EQ(r.direct, Series::constant(1));
  EXPECT_TRUE(r.pass());
}

TEST(Decomposition, D3FirstOrderValue) {
  MelonicModel m;
  m.D = 3;
  m.K = 1;
  const auto r = decomposition_residual(m);
  EXPECT_EQ(r.direct.coeff_of(lam_n(2, 6)), GaussRat(mpq_class(-3, 4)));
  EXPECT_EQ(r.direct.coeff_of(lam_n(2, 4)), GaussRat(mpq_class(-3, 4)));
  EXPECT_EQ(r.direct.size(), 3U);
  EXPECT_TRUE(r.r1.is_zero());
  EXPECT_TRUE(r.r2.is_zero());
}

TEST(Decomposition, ThreeRoutesAgree) {
  for (auto [D, K] : {std::pair{2, 2}, {2, 3}, {3, 2}, {4, 1}}) {
    MelonicModel m;
    m.D = D;
    m.K = K;
    const auto r = decomposition_residual(m);
    EXPECT_TRUE(r.pass()) << "D=" << D << " K=" << K << "\n" << r.r1.str() << r.r2.str();
  }
}

TEST(Decomposition, IndexSumOracles) {
  for (auto [D, K] : {std::pair{3, 1}, {2, 2}}) {
    MelonicModel m;
    m.D = D;
    m.K = K;
    const Series sym = direct_tensor_z(m);
    for (int n : {1, 2}) {
      EXPECT_EQ(direct_tensor_z(m, n), evaluate_N(sym, n)) << D << " " << n;
      EXPECT_EQ(intermediate_field_z(m, n), evaluate_N(sym, n)) << D << " " << n;
    }
  }
}

TEST(Decomposition, DegreeGrading) {
  MelonicModel m;
  m.D = 3;
  m.K = 2;
  const auto g = degree_grading(m);
  EXPECT_TRUE(g.pass);
  EXPECT_EQ(g.hn_seen.back(), 6);
  m.D = 2;
  EXPECT_TRUE(degree_grading(m).pass);
}

TEST(Commutator, XYEqualsDY) {
  for (int D : {2, 3, 4}) {
    const auto r = commutator_residual(D, 4, 3, 2);
    EXPECT_TRUE(r.pass()) << D;
    EXPECT_TRUE(r.plus_sign_gives_minus_DY) << D;
  }
  EXPECT_THROW(commutator_residual(3, 2, 2, 2), std::invalid_argument);
}

TEST(Commutator, SpotMonomial) {
  const DiffOp x = build_X(3, 4);
  const DiffOp y = build_Y(3, 2);
  Monomial b = Monomial::time(tvar(1, 2)) * Monomial::time(tvar(2, 1)) * Monomial::time(tvar(3, 1));
  TruncSpec t;
  t.max_hl = 4;
  const Series s = Series::from_monomial(b, 1, t);
  const Series lhs = apply(x, apply(y, s)) - apply(y, apply(x, s));
  EXPECT_FALSE(lhs.is_zero());
  EXPECT_EQ(lhs, apply(y, s) * GaussRat(3));
  EXPECT_TRUE(apply(commutator(x, y), Series::constant(1, t)).is_zero());
}

TEST(Bch, SeriesAgree) {
  const auto r = bch_series_check(8);
  ASSERT_TRUE(r.pass());
  ASSERT_EQ(r.matrix_log.size(), 9U);
  EXPECT_EQ(r.matrix_log[0], 1);
  EXPECT_EQ(r.matrix_log[1], mpq_class(1, 2));
  EXPECT_EQ(r.matrix_log[2], mpq_class(1, 12));
  EXPECT_EQ(r.matrix_log[3], 0);
  EXPECT_EQ(r.matrix_log[4], mpq_class(-1, 720));
  EXPECT_TRUE(bch_series_check(20).pass());
}
