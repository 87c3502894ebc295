#include <gtest/gtest.h>

#include <functional>
#include <vector>

#include "melonic/bilinear.hpp"
#include "melonic/matrix_model.hpp"

using namespace melonic;

namespace {

mpq_class gaussian_moment(int k) {
  if (k % 2 != 0) return 0;
  mpq_class r = 1;
  for (int i = k - 1; i > 1; i -= 2) r *= i;
  return r;
}

mpq_class fact(int n) {
  mpq_class r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

TEST(Residue, Basics) {
  EXPECT_TRUE(residue_z(Series::constant(1)).is_zero());
  Series s;
  s.add_term(Monomial::z(-1) * Monomial::time(tvar(1, 1)), 1);
  EXPECT_EQ(residue_z(s), Series::variable(tvar(1, 1)));
  Series t;
  t.add_term(Monomial::z(2), 1);
  t.add_term(Monomial::z(-2), 1);
  EXPECT_TRUE(residue_z(t).is_zero());
}

TEST(Residue, WindowInsufficient) {
  TruncSpec tr;
  tr.z_min = -3;
  tr.z_max = 3;
  Series a(tr);
  a.add_term(Monomial::z(-3), 1);
  Series b(tr);
  b.add_term(Monomial::z(-2), 1);
  b.add_term(Monomial::z(3), 1);
  // z^-5 is dropped, so everything at or below z^-5 + 3 is unreliable.
  const Series p = a * b;
  EXPECT_NO_THROW(residue_z(p));
  Series c(tr);
  c.add_term(Monomial::z(-3), 1);
  c.add_term(Monomial::z(1), 1);
  Series d(tr);
  d.add_term(Monomial::z(-2), 1);
  d.add_term(Monomial::z(3), 1);
  EXPECT_THROW(residue_z(c * d * d), WindowInsufficient);
  TruncSpec positive;
  positive.z_min = 0;
  EXPECT_THROW(residue_z(Series(positive)), WindowInsufficient);
}

TEST(Vertex, ChargeAtGaussianPoint) {
  for (int n : {1, 2, 3}) {
    VertexOp v;
    v.nsize = n;
    TruncSpec out;
    out.max_time_deg = 2;
    const Series r = vertex_apply(v, Series::constant(1, out), out).set_all_times_zero();
    EXPECT_EQ(r, Series::from_monomial(Monomial::z(-n)));
    v.sign = -1;
    EXPECT_EQ(vertex_apply(v, Series::constant(1, out), out).set_all_times_zero(), Series::from_monomial(Monomial::z(n)));
  }
}

TEST(Vertex, PartsSeparately) {
  VertexOp v;
  v.nsize = 2;
  const Series one = Series::constant(1);
  EXPECT_EQ(apply_exp(vertex_b_part(v), one), one);
  TruncSpec t;
  t.max_time_deg = 2;
  const Series a = exp_trunc(vertex_a_series(v, t));
  EXPECT_EQ(a.coeff_of(Monomial::time(tvar(1, 1)) * Monomial::z(1)), GaussRat(2));
  EXPECT_EQ(a.coeff_of(Monomial::time(tvar(1, 0), 2)), GaussRat(2));
}

// At N = 1 with derivatives d_1..d_3, z^-1 e^{B} Z = < e^{-sum t_p x^p} z^-1 E(x/z) >
// over a unit Gaussian, where E(y) = exp(y + y^2/2 + y^3/3).
TEST(Vertex, OneDimensionalOracle) {
  OneMatrixModel mm;
  mm.nsize = 1;
  mm.p_max = 3;
  mm.max_deg = 10;
  mm.max_weight = 8;
  TruncSpec t = mm.trunc();
  t.z_min = -12;
  t.z_max = 12;
  Series z(t);
  const Series raw = z1mm_series(mm);
  for (const auto& [m, c] : raw.terms()) z.add_term(m, c);
  VertexOp v;
  v.nsize = 1;
  v.a_pmax = -1;
  v.b_pmax = 3;
  const Series f = vertex_apply(v, z, t);
  std::vector<mpq_class> e_coef(9, 0);
  e_coef[0] = 1;
  // k e_k = sum_{n=1}^{3} e_{k-n}
  for (int k = 1; k <= 8; ++k) {
    for (int n = 1; n <= 3 && n <= k; ++n) e_coef[k] += e_coef[k - n];
    e_coef[k] /= k;
  }
  int checked = 0;
  std::function<void(int, int, int, Monomial, mpq_class)> rec = [&](int p, int deg, int w, Monomial m, mpq_class c) {
    if (p > 3) {
      for (int k = 0; k + w <= 8; ++k) {
        EXPECT_EQ(f.coeff_of(m * Monomial::z(-1 - k)), GaussRat(c * e_coef[k] * gaussian_moment(k + w))) << m.str() << " k=" << k;
        ++checked;
      }
      return;
    }
    for (int e = 0; deg + e <= 2 && w + p * e <= 8; ++e) {
      const mpq_class ce = c * (e % 2 == 0 ? 1 : -1) / fact(e);
      rec(p + 1, deg + e, w + p * e, e == 0 ? m : m * Monomial::time(tvar(1, p), e), ce);
    }
  };
  rec(0, 0, 0, Monomial::one(), 1);
  EXPECT_GT(checked, 50);
}

TEST(Hirota, OneMatrixVanishes) {
  for (int n : {1, 2})
    for (int d : {0, 1, 2}) {
      const auto r = hirota_residual_1mm(n, d, 4);
      EXPECT_TRUE(r.pass()) << "N=" << n << " d=" << d << "\n" << r.residual.str();
      EXPECT_FALSE(r.plus_factor.is_zero());
    }
  EXPECT_TRUE(hirota_residual_1mm(3, 1, 3).pass());
}

TEST(Hirota, LiteralScaleFailsAtTwo) {
  EXPECT_TRUE(hirota_residual_1mm(1, 2, 4, true).pass());
  EXPECT_FALSE(hirota_residual_1mm(2, 1, 4, true).pass());
}

TEST(Hirota, BadConfiguration) {
  EXPECT_THROW(hirota_residual_1mm(0, 1, 4), std::invalid_argument);
  EXPECT_THROW(tensor_bilinear_residual(4, 3, 1, 1, 1, 4), std::invalid_argument);
}

TEST(Conjugation, ClosedFormMatches) {
  for (int D : {2, 3})
    for (int sign : {1, -1}) {
      const auto r = conjugation_residual(1, sign, D, 1, 4, 2);
      EXPECT_TRUE(r.b_commutes);
      EXPECT_TRUE(r.t0_commutes);
      EXPECT_TRUE(r.ad2_vanishes);
      EXPECT_TRUE(r.closed_matches_compose);
      EXPECT_TRUE(r.sandwich_vs_closed.is_zero()) << D << " " << sign;
      EXPECT_TRUE(r.parts_vs_closed.is_zero()) << D << " " << sign;
    }
  EXPECT_TRUE(conjugation_residual(2, 1, 2, 2, 4, 1).pass());
}

TEST(Conjugation, CommutatorIsPureDerivative) {
  const DiffOp ay = a_y_commutator(2, 3, 1, 0, 4);
  EXPECT_FALSE(ay.is_zero());
  for (const auto& [k, c] : ay.terms()) {
    EXPECT_TRUE(k.first.times.empty());
    EXPECT_EQ(powers_degree(k.second), 2);
    for (const auto& [key, e] : k.second) EXPECT_NE(TimeVar::from_key(key).color, 2);
  }
}

TEST(TensorBilinear, D3K1) {
  for (int c : {1, 2, 3}) {
    const auto r = tensor_bilinear_residual(c, 3, 1, 1, 1, 4);
    EXPECT_TRUE(r.pass()) << c << "\n" << r.residual.str();
  }
}

TEST(TensorBilinear, LambdaZeroReducesToOneMatrix) {
  const auto t = tensor_bilinear_residual(1, 3, 0, 2, 2, 4);
  const auto h = hirota_residual_1mm(2, 2, 4);
  auto spectator = [](TimeVar v) { return v.color != 1; };
  EXPECT_EQ(t.plus_factor.set_times_zero(spectator), h.plus_factor);
  EXPECT_EQ(t.minus_factor.set_times_zero(spectator), h.minus_factor);
  EXPECT_EQ(t.residual.set_times_zero(spectator), h.residual);
}
