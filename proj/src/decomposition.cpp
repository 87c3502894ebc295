#include "melonic/decomposition.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <stdexcept>

#include "melonic/matrix_model.hpp"
#include "melonic/wick.hpp"

namespace melonic {

namespace {

mpz_class factorial(int n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

// All q in N^D with lo <= |q| <= hi.
void for_each_tuple(int D, int lo, int hi, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> q(D, 0);
  std::function<void(int, int)> rec = [&](int c, int used) {
    if (c == D) {
      if (used >= lo) fn(q);
      return;
    }
    for (int v = 0; used + v <= hi; ++v) {
      q[c] = v;
      rec(c + 1, used + v);
    }
    q[c] = 0;
  };
  rec(0, 0);
}

mpz_class multinomial(const std::vector<int>& q) {
  int total = 0;
  mpz_class den = 1;
  for (int v : q) {
    total += v;
    den *= factorial(v);
  }
  return factorial(total) / den;
}

// (-i)^|q|/|q| multinomial(q) a^|q| with a = sqrt(lambda/(2 N^{D-2})).
std::pair<Monomial, GaussRat> log_det_coefficient(const std::vector<int>& q, int D) {
  int s = 0;
  for (int v : q) s += v;
  Monomial m;
  m.hl = s;
  m.hn = -s * (D - 2);
  m.h2 = -s;
  const GaussRat c = GaussRat::i_pow(-s) * GaussRat(mpq_class(multinomial(q), s));
  return {m, c};
}

Series widen(const Series& s, const TruncSpec& t) {
  Series out(t);
  for (const auto& [m, c] : s.terms()) out.add_term(m, c);
  return out;
}

constexpr int kTraceSet = 7;

}  // namespace

TruncSpec MelonicModel::trunc() const {
  TruncSpec t;
  t.max_hl = 2 * K;
  return t;
}

void MelonicModel::validate() const {
  if (D < 2 || D > 8) throw std::invalid_argument("melonic model: D must lie in [2, 8]");
  if (K < 0) throw std::invalid_argument("melonic model: K must be nonnegative");
  if (threads < 1) throw std::invalid_argument("melonic model: threads must be positive");
}

DiffOp build_Y(int D, int K, int set) {
  TruncSpec t;
  t.max_hl = 2 * K;
  DiffOp y(t);
  for_each_tuple(D, 1, 2 * K, [&](const std::vector<int>& q) {
    auto [m, c] = log_det_coefficient(q, D);
    m.hn -= 2 * D;
    VarPowers d;
    for (int c_i = 0; c_i < D; ++c_i) d.emplace_back(tvar(c_i + 1, q[c_i], set).key(), 1);
    y.add_term(m, d, D % 2 == 0 ? c : -c);
  });
  return y;
}

DiffOp build_X(int D, int p_max, int sign) {
  DiffOp x;
  for (int c = 1; c <= D; ++c)
    for (int p = 0; p <= p_max; ++p) x.add_term(Monomial::time(tvar(c, p)), {{tvar(c, p).key(), 1}}, sign);
  return x;
}

std::size_t y_level_size(const DiffOp& y, int m) {
  std::size_t n = 0;
  for (const auto& [k, c] : y.terms()) n += k.first.hl == m ? 1 : 0;
  return n;
}

Series direct_tensor_z(const MelonicModel& model, int oracle_n) {
  model.validate();
  const int D = model.D;
  Series z(model.trunc());
  for (int n = 0; n <= model.K; ++n) {
    // Color multiplicities m_1..m_D with sum n; ordered sequences counted by n!/prod m_c!.
    for_each_tuple(D, n, n, [&](const std::vector<int>& mult) {
      TensorContraction c;
      c.D = D;
      c.black_of_white.assign(D, {});
      mpz_class den = 1;
      for (int a = 0; a < D; ++a) {
        den *= factorial(mult[a]);
        for (int r = 0; r < mult[a]; ++r) c = c * quartic_melonic(D, a + 1);
      }
      const GaussRat coeff(mpq_class(n % 2 == 0 ? 1 : -1, den * (mpz_class(1) << (2 * n))));
      Monomial base;
      base.hl = 2 * n;
      base.hn = 2 * (D - 1) * n;
      if (oracle_n > 0) {
        z.add_term(base, coeff * GaussRat(tensor_oracle(c, oracle_n)));
        return;
      }
      for (const auto& [e, v] : tensor_moment_laurent(c, model.threads).coeffs) {
        Monomial m = base;
        m.hn += 2 * e;
        z.add_term(m, coeff * GaussRat(mpq_class(v)));
      }
    });
  }
  return oracle_n > 0 ? evaluate_N(z, oracle_n) : z;
}

Series intermediate_field_z(const MelonicModel& model, int oracle_n) {
  model.validate();
  const int D = model.D;
  const TruncSpec t = model.trunc();
  // Tr sigma_c^p is stored as the time t[c,p] of an otherwise unused set.
  Series s(t);
  for_each_tuple(D, 1, 2 * model.K, [&](const std::vector<int>& q) {
    auto [m, c] = log_det_coefficient(q, D);
    for (int a = 0; a < D; ++a) {
      if (q[a] == 0)
        m.hn += 2;  // Tr 1 = N
      else
        m = m * Monomial::time(tvar(a + 1, q[a], kTraceSet));
    }
    s.add_term(m, c);
  });
  const Series e = exp_trunc(s);

  std::map<TraceWord, mpq_class> oracle_cache;
  Series z(t);
  for (const auto& [m, c] : e.terms()) {
    std::vector<TraceWord> words(D);
    for (const auto& [key, ex] : m.times) {
      const TimeVar v = TimeVar::from_key(key);
      words[v.color - 1].insert(words[v.color - 1].end(), ex, v.index);
    }
    Monomial scalar = m.scalar_part();
    if (oracle_n > 0) {
      mpq_class value = 1;
      for (const auto& w : words) {
        auto it = oracle_cache.find(w);
        if (it == oracle_cache.end()) it = oracle_cache.emplace(w, hermitian_oracle(w, oracle_n)).first;
        value *= it->second;
      }
      z.add_term(scalar, c * GaussRat(value));
      continue;
    }
    LaurentN prod = LaurentN::monomial(0);
    for (const auto& w : words) {
      prod = prod * hermitian_moment_laurent(w);
      if (prod.is_zero()) break;
    }
    for (const auto& [ex, v] : prod.coeffs) {
      Monomial r = scalar;
      r.hn += 2 * ex;
      z.add_term(r, c * GaussRat(mpq_class(v)));
    }
  }
  return oracle_n > 0 ? evaluate_N(z, oracle_n) : z;
}

Series givental_z(const MelonicModel& model) {
  model.validate();
  const int D = model.D;
  const int levels = 2 * model.K;
  TruncSpec t = model.trunc();
  t.p_max = levels;
  t.max_time_deg = D * levels;
  // Each Y term lowers the time weight by |q| and raises hl by |q|, so only
  // monomials with weight <= 2K - hl can reach t = 0.
  t.max_time_weight = levels;
  Series prod = Series::constant(1, t);
  for (int c = 1; c <= D; ++c) {
    OneMatrixModel mm;
    mm.p_max = levels;
    mm.max_deg = levels;
    mm.max_weight = levels;
    mm.color = c;
    prod = prod * widen(z1mm_series(mm), t);
  }
  const int max_hl = levels;
  auto keep = [D, max_hl](const Monomial& m) {
    return m.time_weight() <= max_hl - m.hl && m.time_degree() <= D * (max_hl - m.hl);
  };
  const Series out = apply_exp(build_Y(D, model.K), prod, keep).set_all_times_zero();
  return widen(out, model.trunc());
}

DecompositionReport decomposition_residual(const MelonicModel& model) {
  DecompositionReport r;
  r.direct = direct_tensor_z(model);
  r.intermediate = intermediate_field_z(model);
  r.givental = givental_z(model);
  r.r1 = r.givental - r.intermediate;
  r.r2 = r.intermediate - r.direct;
  return r;
}

std::vector<Monomial> basis_monomials(int D, int p_max, int max_deg, int set) {
  std::vector<TimeVar> vars;
  for (int c = 1; c <= D; ++c)
    for (int p = 0; p <= p_max; ++p) vars.push_back(tvar(c, p, set));
  std::vector<Monomial> out;
  std::function<void(std::size_t, int, Monomial)> rec = [&](std::size_t i, int deg, Monomial m) {
    if (i == vars.size()) {
      out.push_back(m);
      return;
    }
    for (int e = 0; deg + e <= max_deg; ++e) rec(i + 1, deg + e, e == 0 ? m : m * Monomial::time(vars[i], e));
  };
  rec(0, 0, Monomial::one());
  return out;
}

CommutatorReport commutator_residual(int D, int p_max, int max_deg, int K) {
  if (2 * K > p_max) throw std::invalid_argument("commutator check needs p_max >= 2K");
  const DiffOp x = build_X(D, p_max, -1);
  const DiffOp y = build_Y(D, K);
  const DiffOp defect = commutator(x, y) - y * GaussRat(D);
  const DiffOp plus_defect = commutator(build_X(D, p_max, +1), y) + y * GaussRat(D);

  CommutatorReport r;
  TruncSpec t;
  t.max_hl = 2 * K;
  r.residual = Series(t);
  r.sequential_residual = Series(t);
  r.plus_sign_gives_minus_DY = true;
  const auto basis = basis_monomials(D, p_max, max_deg);
  r.monomials = basis.size();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Series m = Series::from_monomial(basis[i], 1, t);
    const Monomial tag = Monomial::z(static_cast<int>(i));
    r.residual += apply(defect, m).times_monomial(tag);
    const Series ym = apply(y, m);
    const Series seq = apply(x, ym) - apply(y, apply(x, m)) - ym * GaussRat(D);
    r.sequential_residual += seq.times_monomial(tag);
    if (!apply(plus_defect, m).is_zero()) r.plus_sign_gives_minus_DY = false;
  }
  return r;
}

namespace {

using Poly = std::vector<mpq_class>;  // power series in D, truncated

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; i + j < a.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Poly poly_inverse(const Poly& a) {
  if (a[0] == 0) throw std::domain_error("power series with zero constant term");
  Poly r(a.size(), 0);
  r[0] = 1 / a[0];
  for (std::size_t n = 1; n < a.size(); ++n) {
    mpq_class s = 0;
    for (std::size_t k = 1; k <= n; ++k) s += a[k] * r[n - k];
    r[n] = -s / a[0];
  }
  return r;
}

Poly exp_scaled(int size, const mpq_class& scale) {
  Poly r(size, 0);
  mpq_class term = 1;
  for (int k = 0; k < size; ++k) {
    r[k] = term;
    term = term * scale / (k + 1);
  }
  return r;
}

using Mat = std::array<std::array<Poly, 2>, 2>;

Mat mat_zero(int size) {
  Mat m;
  for (auto& row : m)
    for (auto& e : row) e.assign(size, 0);
  return m;
}

Mat mat_mul(const Mat& a, const Mat& b) {
  const int size = static_cast<int>(a[0][0].size());
  Mat r = mat_zero(size);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        const Poly p = poly_mul(a[i][k], b[k][j]);
        for (int n = 0; n < size; ++n) r[i][j][n] += p[n];
      }
  return r;
}

Mat mat_exp(const Mat& a, int terms) {
  const int size = static_cast<int>(a[0][0].size());
  Mat result = mat_zero(size);
  result[0][0][0] = result[1][1][0] = 1;
  Mat power = result;
  for (int k = 1; k <= terms; ++k) {
    power = mat_mul(power, a);
    for (auto& row : power)
      for (auto& e : row)
        for (auto& v : e) v /= k;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int n = 0; n < size; ++n) result[i][j][n] += power[i][j][n];
  }
  return result;
}

}  // namespace

BchReport bch_series_check(int order) {
  if (order < 0) throw std::invalid_argument("bch order must be nonnegative");
  const int size = order + 1;
  Mat x = mat_zero(size);
  if (size > 1) x[0][0][1] = 1;
  Mat y = mat_zero(size);
  y[0][1][0] = 1;
  const Mat m = mat_mul(mat_exp(x, size + 1), mat_exp(y, 2));
  // log M = sum_k (-1)^{k+1} (M - 1)^k / k; the (0,1) entry of (M-1)^k is O(D^{k-1}).
  Mat a = m;
  a[0][0][0] -= 1;
  a[1][1][0] -= 1;
  Mat log_m = mat_zero(size);
  Mat power = a;
  for (int k = 1; k <= size + 1; ++k) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int n = 0; n < size; ++n) log_m[i][j][n] += power[i][j][n] * (k % 2 == 1 ? 1 : -1) / k;
    power = mat_mul(power, a);
  }
  BchReport r;
  r.matrix_log = log_m[0][1];
  // The other entries must reproduce X itself.
  Poly expect_x(size, 0);
  if (size > 1) expect_x[1] = 1;
  if (log_m[0][0] != expect_x || log_m[1][0] != Poly(size, 0) || log_m[1][1] != Poly(size, 0))
    r.matrix_log.assign(size, 0);

  // Bernoulli numbers with B_1 = +1/2: D/(1 - e^{-D}) = sum B_n D^n / n!.
  std::vector<mpq_class> b(size, 0);
  b[0] = 1;
  for (int n = 1; n < size; ++n) {
    mpq_class s = 0;
    for (int k = 0; k < n; ++k) {
      mpz_class binom;
      mpz_bin_uiui(binom.get_mpz_t(), n + 1, k);
      s += mpq_class(binom) * b[k];
    }
    b[n] = -s / (n + 1);
  }
  if (size > 1) b[1] = mpq_class(1, 2);
  r.bernoulli.resize(size);
  for (int n = 0; n < size; ++n) r.bernoulli[n] = b[n] / mpq_class(factorial(n));

  // sinh(D/2)/(D/2) = sum (D/2)^{2k}/(2k+1)!
  Poly sh(size, 0);
  for (int k = 0; 2 * k < size; ++k) {
    mpz_class den = factorial(2 * k + 1) << (2 * k);
    sh[2 * k] = mpq_class(1, den);
  }
  r.sinh_form = poly_mul(exp_scaled(size, mpq_class(1, 2)), poly_inverse(sh));
  return r;
}

GradingReport degree_grading(const MelonicModel& model) {
  GradingReport r;
  const Series f = log_trunc(direct_tensor_z(model));
  const mpz_class fact = factorial(model.D - 1);
  for (const auto& [m, c] : f.terms()) {
    if (r.hn_seen.empty() || r.hn_seen.back() != m.hn) r.hn_seen.push_back(m.hn);
    if (m.hn % 2 != 0 || m.h2 != 0) {
      r.pass = false;
      continue;
    }
    const mpz_class twice_w = (model.D - m.hn / 2) * fact;
    if (twice_w < 0 || twice_w % 2 != 0) r.pass = false;
  }
  std::sort(r.hn_seen.begin(), r.hn_seen.end());
  r.hn_seen.erase(std::unique(r.hn_seen.begin(), r.hn_seen.end()), r.hn_seen.end());
  return r;
}

}  // namespace melonic
