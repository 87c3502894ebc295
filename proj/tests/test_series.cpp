#include <gtest/gtest.h>

#include <random>

#include "melonic/series.hpp"

using namespace melonic;

namespace {

Monomial mono(int hl, int hn, std::vector<std::pair<TimeVar, int>> ts = {}, int zexp = 0) {
  Monomial m;
  m.hl = hl;
  m.hn = hn;
  m.zexp = zexp;
  for (auto [v, e] : ts) m = m * Monomial::time(v, e);
  return m;
}

TruncSpec small_trunc() {
  TruncSpec t;
  t.max_hl = 4;
  t.max_time_deg = 3;
  t.p_max = 3;
  return t;
}

Series random_series(std::mt19937& rng, const TruncSpec& t, bool nilpotent) {
  std::uniform_int_distribution<int> coeff(-5, 5);
  std::uniform_int_distribution<int> hl(0, 2);
  std::uniform_int_distribution<int> hn(-2, 2);
  std::uniform_int_distribution<int> tcount(0, 2);
  std::uniform_int_distribution<int> color(1, 2);
  std::uniform_int_distribution<int> idx(0, 3);
  Series s(t);
  for (int i = 0; i < 6; ++i) {
    Monomial m = mono(hl(rng), hn(rng));
    const int nt = tcount(rng);
    for (int j = 0; j < nt; ++j) m = m * Monomial::time(tvar(color(rng), idx(rng)));
    if (nilpotent && m.hl == 0 && m.times.empty()) m.hl = 1;
    s.add_term(m, GaussRat(mpq_class(coeff(rng), 1 + (i % 3)), mpq_class(coeff(rng) % 2)));
  }
  return s;
}

}  // namespace

TEST(GaussRat, FieldOperations) {
  const GaussRat i = GaussRat::i();
  EXPECT_EQ(i * i, GaussRat(-1));
  EXPECT_EQ(GaussRat::i_pow(3), -i);
  EXPECT_EQ(GaussRat::i_pow(-1), -i);
  const GaussRat a(mpq_class(1, 2), mpq_class(3));
  EXPECT_EQ(a / a, GaussRat(1));
  EXPECT_EQ((a * a.conj()).im(), 0);
  EXPECT_THROW(a / GaussRat(0), std::domain_error);
}

TEST(GaussRat, StringRoundTrip) {
  const GaussRat a(mpq_class(-7, 3), mpq_class(2, 5));
  EXPECT_EQ(a.str(), "(-7/3)/(2/5)");
  EXPECT_EQ(GaussRat::parse(a.str()), a);
  EXPECT_THROW(GaussRat::parse("1/2"), ParseError);
}

TEST(Series, DifferenceOfSquares) {
  const TimeVar t11 = tvar(1, 1);
  Series a = Series::constant(1) + Series::from_monomial(mono(1, 0, {{t11, 1}}));
  Series b = Series::constant(1) - Series::from_monomial(mono(1, 0, {{t11, 1}}));
  Series expect = Series::constant(1) - Series::from_monomial(mono(2, 0, {{t11, 2}}));
  EXPECT_EQ(a * b, expect);
}

TEST(Series, ZExponentsCancel) {
  Series a = Series::from_monomial(mono(0, 1, {}, 1));
  Series b = Series::from_monomial(mono(0, 1, {}, -1));
  EXPECT_EQ(a * b, Series::from_monomial(mono(0, 2)));
}

TEST(Series, Sqrt2Reduction) {
  Monomial m;
  m.h2 = 3;
  Series s = Series::from_monomial(m);
  Monomial r;
  r.h2 = 1;
  EXPECT_EQ(s.coeff_of(r), GaussRat(2));
  m.h2 = -1;
  Series s2 = Series::from_monomial(m);
  EXPECT_EQ(s2.coeff_of(r), GaussRat(mpq_class(1, 2)));
  EXPECT_EQ((s2 * s2).constant_term(), GaussRat(mpq_class(1, 2)));
}

TEST(Series, ExpTaylor) {
  TruncSpec t;
  t.max_hl = 2;
  const TimeVar t12 = tvar(1, 2);
  Series a = Series::from_monomial(mono(1, 1, {{t12, 1}}), 1, t);
  Series e = exp_trunc(a);
  Series expect(t);
  expect.add_term(Monomial::one(), 1);
  expect.add_term(mono(1, 1, {{t12, 1}}), 1);
  expect.add_term(mono(2, 2, {{t12, 2}}), GaussRat(mpq_class(1, 2)));
  EXPECT_EQ(e, expect);
  EXPECT_EQ(exp_trunc(Series(t)), Series::constant(1, t));
}

TEST(Series, ExpByTimeDegree) {
  TruncSpec t;
  t.max_time_deg = 2;
  Series e = exp_trunc(Series::variable(tvar(1, 1), t));
  EXPECT_EQ(e.size(), 3U);
  EXPECT_EQ(e.coeff_of(Monomial::time(tvar(1, 1), 2)), GaussRat(mpq_class(1, 2)));
}

TEST(Series, ExpRejectsConstant) {
  EXPECT_THROW(exp_trunc(Series::constant(2)), IllPosedExpansion);
  Monomial m;
  m.hn = 2;
  EXPECT_THROW(exp_trunc(Series::from_monomial(m)), IllPosedExpansion);
}

TEST(Series, CoeffOf) {
  TruncSpec t;
  t.max_hl = 2;
  Series s = Series::constant(1, t) + Series::from_monomial(mono(1, 0), 2, t);
  EXPECT_EQ(s.coeff_of(mono(1, 0)), GaussRat(2));
  Series n = Series::from_monomial(mono(0, 2)) + Series::from_monomial(mono(0, -2));
  EXPECT_EQ(n.coeff_of(mono(0, 2)), GaussRat(1));
  EXPECT_THROW(s.coeff_of(mono(3, 0)), TruncationError);
}

TEST(Series, DeriveBasics) {
  const TimeVar t12 = tvar(1, 2);
  Series cube = Series::from_monomial(Monomial::time(t12, 3));
  EXPECT_EQ(derive(cube, t12), Series::from_monomial(Monomial::time(t12, 2), 3));
  EXPECT_TRUE(derive(Series::variable(tvar(1, 1)), tvar(2, 1)).is_zero());
  TruncSpec t;
  t.max_time_deg = 4;
  Series e = exp_trunc(Series::variable(tvar(1, 1), t));
  TruncSpec t3 = t;
  t3.max_time_deg = 3;
  EXPECT_EQ(derive(e, tvar(1, 1)).truncated(t3), e.truncated(t3));
}

TEST(Series, RingAxiomsRandomized) {
  std::mt19937 rng(7);
  const TruncSpec t = small_trunc();
  for (int trial = 0; trial < 20; ++trial) {
    Series a = random_series(rng, t, false);
    Series b = random_series(rng, t, false);
    Series c = random_series(rng, t, false);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
  }
}

TEST(Series, ExpInverseRandomized) {
  std::mt19937 rng(11);
  const TruncSpec t = small_trunc();
  for (int trial = 0; trial < 10; ++trial) {
    Series a = random_series(rng, t, true);
    EXPECT_EQ(exp_trunc(a) * exp_trunc(-a), Series::constant(1, t));
    EXPECT_EQ(log_trunc(exp_trunc(a)), a);
    Series u = Series::constant(3, t) + a;
    EXPECT_EQ(u * inverse(u), Series::constant(1, t));
  }
}

TEST(Series, LeibnizRandomized) {
  std::mt19937 rng(3);
  const TruncSpec t = small_trunc();
  for (int trial = 0; trial < 20; ++trial) {
    Series a = random_series(rng, t, false);
    Series b = random_series(rng, t, false);
    const TimeVar v = tvar(1 + trial % 2, trial % 4);
    // Differentiation lowers the degree, so compare on the degree-2 part.
    TruncSpec t2 = t;
    t2.max_time_deg = 2;
    EXPECT_EQ(derive(a * b, v).truncated(t2), (derive(a, v) * b + a * derive(b, v)).truncated(t2));
  }
}

TEST(Series, TextRoundTrip) {
  std::mt19937 rng(5);
  const TruncSpec t = small_trunc();
  for (int trial = 0; trial < 10; ++trial) {
    Series a = random_series(rng, t, false);
    a += Series::from_monomial(mono(1, -3, {{tvar(2, 1, 1), 2}}, -4), GaussRat(mpq_class(1, 3), mpq_class(-2)), t);
    EXPECT_EQ(Series::parse(a.str(), t), a);
    EXPECT_EQ(Series::parse(a.str(), t).str(), a.str());
  }
  EXPECT_TRUE(Series::parse("0\n").is_zero());
  EXPECT_THROW(Series::parse("(1)/(0) * q^2"), ParseError);
}

TEST(Series, ZWindowMarksBand) {
  TruncSpec t;
  t.z_min = -2;
  t.z_max = 2;
  Series a = Series::from_monomial(Monomial::z(1), 1, t) + Series::from_monomial(Monomial::z(-1), 1, t);
  Series p = pow(a, 3);  // z^3 and z^-3 fall outside
  EXPECT_EQ(p.exact_z_lo(), -2);
  EXPECT_EQ(p.exact_z_hi(), 2);
  EXPECT_EQ(p.coeff_of(Monomial::z(1)), GaussRat(3));
  Series q = p * Series::from_monomial(Monomial::z(1), 1, t);
  // z^-3 was lost from p, so z^-2 of q is not trustworthy.
  EXPECT_THROW(q.coeff_of(Monomial::z(-2)), TruncationError);
  EXPECT_EQ(q.coeff_of(Monomial::z(0)), GaussRat(3));
}

TEST(Series, EvaluateN) {
  Series s = Series::from_monomial(mono(0, 2)) + Series::from_monomial(mono(0, -2)) +
             Series::from_monomial(mono(0, 1));
  Series at4 = evaluate_N(s, 4);
  EXPECT_EQ(at4.constant_term(), GaussRat(mpq_class(4 + 2) + mpq_class(1, 4)));
  Series at2 = evaluate_N(s, 2);
  Monomial r2;
  r2.h2 = 1;
  EXPECT_EQ(at2.coeff_of(r2), GaussRat(1));
  EXPECT_THROW(evaluate_N(s, 3), std::domain_error);
}
