#include "melonic/bilinear.hpp"

#include <map>
#include <stdexcept>

#include "melonic/decomposition.hpp"
#include "melonic/matrix_model.hpp"

namespace melonic {

namespace {

Series widen(const Series& s, const TruncSpec& t) {
  Series out(t);
  for (const auto& [m, c] : s.terms()) out.add_term(m, c);
  out.set_exact_band(std::max(out.exact_z_lo(), s.exact_z_lo()), std::min(out.exact_z_hi(), s.exact_z_hi()));
  return out;
}

GaussRat kappa_coeff(const VertexOp& v, Monomial& m) {
  if (v.literal_scale) return 1;
  if (v.nsize > 0) return v.nsize;
  m.hn += 2;
  return 1;
}

std::vector<int> color_degrees(const Monomial& m, int D) {
  std::vector<int> deg(D + 1, 0);
  for (const auto& [key, e] : m.times) {
    const int c = TimeVar::from_key(key).color;
    if (c >= 1 && c <= D) deg[c] += e;
  }
  return deg;
}

int t0_degree(const Monomial& m, int color) {
  int d = 0;
  for (const auto& [key, e] : m.times) {
    const TimeVar v = TimeVar::from_key(key);
    if (v.index == 0 && (color == 0 || v.color == color)) d += e;
  }
  return d;
}

struct FactorSpec {
  int color = 1;
  int D = 1;
  int K = 0;
  int nsize = 1;
  int sign = +1;
  int set = 0;
  int max_deg = 2;
  int p_max = 4;
  int window = 0;
  bool literal_scale = false;
};

int default_window(const FactorSpec& f) { return f.max_deg * f.p_max + f.nsize + 2 * f.K + 2; }

// V^c_sign(z, lambda) e^Y prod_c' Z^c' in the times of `set`, using
// e^{A} e^{-sign [A,Y]} e^Y e^{B} (B commutes with Y). Inputs are built to
// time weight d*p_max + 2K + 1, which is every term that can reach the z^-1
// coefficient at joint weight <= d*p_max: weight + hl - zexp is conserved by
// every factor except the charge.
Series deformed_factor(const FactorSpec& f) {
  const int w_out = f.max_deg * f.p_max;
  const int w_in = w_out + 2 * f.K + 1;
  const int t0_cap = f.max_deg + 2 * f.K;
  const int window = f.window > 0 ? f.window : default_window(f);

  TruncSpec t_in;
  t_in.max_hl = 2 * f.K;
  t_in.p_max = w_in;
  t_in.max_time_weight = w_in;
  t_in.max_time_deg = f.D * t0_cap + w_in;
  t_in.z_min = -window;
  t_in.z_max = window;

  auto t0_ok = [&](const Monomial& m) {
    for (int c = 1; c <= f.D; ++c)
      if (t0_degree(m, c) > t0_cap) return false;
    return true;
  };
  auto z1mm = [&](int c) {
    OneMatrixModel mm;
    mm.p_max = w_in;
    mm.max_deg = w_in + t0_cap;
    mm.max_weight = w_in;
    mm.color = c;
    mm.set = f.set;
    mm.nsize = f.nsize;
    return widen(z1mm_series(mm), t_in).filter(t0_ok);
  };

  VertexOp v;
  v.sign = f.sign;
  v.color = f.color;
  v.set = f.set;
  v.nsize = f.nsize;
  v.a_pmax = f.p_max;
  v.b_pmax = w_in;
  v.literal_scale = f.literal_scale;

  Series prod = apply_exp(vertex_b_part(v), z1mm(f.color)).times_monomial(vertex_charge(v));
  for (int c = 1; c <= f.D; ++c)
    if (c != f.color) prod = (prod * z1mm(c)).filter(t0_ok);

  if (f.K > 0) {
    const int max_hl = 2 * f.K;
    const int D = f.D;
    auto keep = [w_out, max_hl, D, deg = f.max_deg](const Monomial& m) {
      const int budget = max_hl - m.hl;
      if (m.time_weight() > w_out + budget) return false;
      const auto cd = color_degrees(m, D);
      for (int c = 1; c <= D; ++c)
        if (cd[c] > deg + budget) return false;
      return true;
    };
    prod = apply_exp(build_Y(f.D, f.K, f.set), prod, keep);
    prod = apply_exp(a_y_commutator(f.color, f.D, f.K, f.nsize, f.p_max, f.set) * GaussRat(-f.sign), prod, keep);
  }

  TruncSpec t_out;
  t_out.max_hl = 2 * f.K;
  t_out.max_time_deg = f.max_deg;
  t_out.p_max = f.p_max;
  t_out.z_min = -window;
  t_out.z_max = window;
  const Series g = widen(prod, t_out);
  return exp_trunc(vertex_a_series(v, t_out)) * g;
}

BilinearReport bilinear_residual(FactorSpec f) {
  if (f.nsize < 1) throw std::invalid_argument("bilinear identities need a concrete size");
  if (f.max_deg < 0 || f.p_max < 1) throw std::invalid_argument("bilinear identities: bad truncation");
  BilinearReport r;
  r.z_window = f.window > 0 ? f.window : default_window(f);
  f.sign = +1;
  f.set = 0;
  r.plus_factor = deformed_factor(f);
  f.sign = -1;
  f.set = 1;
  r.minus_factor = deformed_factor(f);
  const Series res = residue_z(r.plus_factor * r.minus_factor);
  r.residual = evaluate_N(res, f.nsize);
  r.convention = std::string("A-part scale ") + (f.literal_scale ? "1" : "N") +
                 "; V_+ carries z^-N, V_- carries z^+N; equal sizes";
  return r;
}

}  // namespace

Series residue_z(const Series& s) {
  const TruncSpec& t = s.trunc();
  if (t.z_min > -1 || t.z_max < -1 || s.exact_z_lo() > -1 || s.exact_z_hi() < -1)
    throw WindowInsufficient(s.exact_z_lo() > s.exact_z_hi()
                                 ? std::string("z^-1 coefficient is not exact: no z power is exact")
                                 : "z^-1 coefficient is not exact: exact band [" + std::to_string(s.exact_z_lo()) +
                                       ", " + std::to_string(s.exact_z_hi()) + "]");
  TruncSpec out = t;
  out.z_min = -TruncSpec::kUnbounded;
  out.z_max = TruncSpec::kUnbounded;
  Series r(out);
  for (const auto& [m, c] : s.terms()) {
    if (m.zexp != -1) continue;
    Monomial k = m;
    k.zexp = 0;
    r.add_term(k, c);
  }
  return r;
}

Series vertex_a_series(const VertexOp& v, TruncSpec trunc) {
  Series s(trunc);
  for (int n = 0; n <= v.a_pmax; ++n) {
    Monomial m = Monomial::time(tvar(v.color, n, v.set)) * Monomial::z(n);
    const GaussRat k = kappa_coeff(v, m);
    s.add_term(m, k * GaussRat(v.sign));
  }
  return s;
}

DiffOp vertex_b_part(const VertexOp& v) {
  DiffOp b;
  for (int n = 1; n <= v.b_pmax; ++n) {
    Monomial m = Monomial::z(-n);
    mpq_class c(-v.sign, n);
    if (v.nsize > 0)
      c /= v.nsize;
    else
      m.hn = -2;
    b.add_term(m, {{tvar(v.color, n, v.set).key(), 1}}, GaussRat(c));
  }
  return b;
}

Monomial vertex_charge(const VertexOp& v) {
  if (v.nsize < 1) throw std::invalid_argument("charge factor needs a concrete size");
  return Monomial::z(-v.sign * v.nsize);
}

Series vertex_apply(const VertexOp& v, const Series& s, const TruncSpec& out) {
  const Series b = apply_exp(vertex_b_part(v), s).times_monomial(vertex_charge(v));
  return exp_trunc(vertex_a_series(v, out)) * widen(b, out);
}

BilinearReport hirota_residual_1mm(int nsize, int max_deg, int p_max, bool literal_scale, int z_window) {
  FactorSpec f;
  f.window = z_window;
  f.nsize = nsize;
  f.max_deg = max_deg;
  f.p_max = p_max;
  f.literal_scale = literal_scale;
  return bilinear_residual(f);
}

BilinearReport tensor_bilinear_residual(int color, int D, int K, int nsize, int max_deg, int p_max, int z_window) {
  if (color < 1 || color > D) throw std::invalid_argument("color out of range");
  FactorSpec f;
  f.window = z_window;
  f.color = color;
  f.D = D;
  f.K = K;
  f.nsize = nsize;
  f.max_deg = max_deg;
  f.p_max = p_max;
  return bilinear_residual(f);
}

DiffOp a_y_commutator(int color, int D, int K, int nsize, int a_pmax, int set) {
  const DiffOp y = build_Y(D, K, set);
  DiffOp out(y.trunc());
  const std::uint32_t ckey_base = tvar(color, 0, set).key();
  for (const auto& [k, c] : y.terms()) {
    VarPowers rest;
    int qc = -1;
    for (const auto& [key, e] : k.second) {
      if ((key & ~0xffffU) == ckey_base)
        qc = static_cast<int>(key & 0xffffU);
      else
        rest.emplace_back(key, e);
    }
    if (qc < 0 || qc > a_pmax) continue;
    Monomial m = k.first * Monomial::z(qc);
    GaussRat coeff = -c;
    if (nsize > 0)
      coeff *= GaussRat(nsize);
    else
      m.hn += 2;
    out.add_term(m, rest, coeff);
  }
  return out;
}

ConjugationReport conjugation_residual(int color, int sign, int D, int K, int p_max, int max_deg) {
  if (2 * K > p_max) throw std::invalid_argument("conjugation check needs p_max >= 2K");
  if (color < 1 || color > D) throw std::invalid_argument("color out of range");
  VertexOp v;
  v.sign = sign;
  v.color = color;
  v.nsize = 0;
  v.a_pmax = p_max;
  v.b_pmax = p_max;

  const int max_hl = 2 * K;
  const int deg_cap = max_deg + max_hl;
  const int window = p_max * (deg_cap + max_deg) + max_hl + 2;
  TruncSpec work;
  work.max_hl = max_hl;
  work.p_max = p_max;
  work.max_time_deg = D * deg_cap;
  work.z_min = -window;
  work.z_max = window;
  TruncSpec out = work;
  out.max_time_deg = max_deg;

  const DiffOp y = build_Y(D, K);
  const Series a = vertex_a_series(v, work);
  const DiffOp a_op = DiffOp::multiply(a, work);
  const DiffOp b = vertex_b_part(v);
  const DiffOp ay = a_y_commutator(color, D, K, 0, p_max);

  ConjugationReport r;
  r.b_commutes = commutator(b, y).is_zero();
  r.t0_commutes = commutator(DiffOp::deriv(tvar(color, 0)), y).is_zero();
  const DiffOp ay_compose = commutator(a_op, y);
  r.ad2_vanishes = commutator(a_op, ay_compose).is_zero();
  r.closed_matches_compose = ay_compose == ay * GaussRat(sign);

  // Every remaining step lowers each color degree by at most one per unit of hl.
  auto keep = [D, max_deg, max_hl](const Monomial& m) {
    const auto cd = color_degrees(m, D);
    for (int c = 1; c <= D; ++c)
      if (cd[c] > max_deg + max_hl - m.hl) return false;
    return true;
  };
  TruncSpec small = work;
  small.max_time_deg = deg_cap;
  const Series exp_a = widen(exp_trunc(widen(a, small)), work).filter(keep);
  const DiffOp conj_a = conjugate_exp(y, a_op);
  const DiffOp conj_b = conjugate_exp(y, b);
  const DiffOp minus_y = y * GaussRat(-1);
  const DiffOp closed_mid = ay * GaussRat(-sign);

  auto accumulate = [](Series& into, const Series& diff, const Monomial& tag) {
    for (const auto& [m, c] : diff.terms()) into.add_term(m * tag, c);
  };
  const auto basis = basis_monomials(D, p_max, max_deg);
  r.monomials = basis.size();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Series m = Series::from_monomial(basis[i], 1, work);
    const Monomial tag = Monomial::time(tvar(1, static_cast<int>(i), 5));

    Series s1 = apply_exp(b, apply_exp(minus_y, m, keep), keep);
    s1 = apply_exp(y, (exp_a * s1).filter(keep), keep).truncated(out);

    const Series s2 = apply_exp(conj_a, apply_exp(conj_b, m, keep), keep).truncated(out);

    const Series mid = apply_exp(closed_mid, apply_exp(b, m, keep), keep).truncated(out);
    const Series s3 = (exp_trunc(vertex_a_series(v, out)) * mid).truncated(out);

    accumulate(r.sandwich_vs_closed, s1 - s3, tag);
    accumulate(r.parts_vs_closed, s2 - s3, tag);
  }
  return r;
}

}  // namespace melonic
