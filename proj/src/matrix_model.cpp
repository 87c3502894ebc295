#include "melonic/matrix_model.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace melonic {

namespace {

mpz_class factorial(int n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

mpz_class double_factorial(int n) {
  mpz_class r = 1;
  for (int i = n; i > 1; i -= 2) r *= i;
  return r;
}

Monomial n_power(int e) {
  Monomial m;
  m.hn = 2 * e;
  return m;
}

Series maybe_evaluate(const Series& s, int nsize) { return nsize > 0 ? evaluate_N(s, nsize) : s; }

TruncSpec g_trunc(int order) {
  TruncSpec t;
  t.max_time_deg = order;
  return t;
}

Monomial g_power(int j) { return j == 0 ? Monomial::one() : Monomial::time(quartic_coupling(), j); }

// < word * (Tr M^4)^j > weighted by (-N/4)^j / j!, summed over j <= order.
Series quartic_insertions(const TraceWord& word, int order) {
  Series s(g_trunc(order));
  for (int j = 0; j <= order; ++j) {
    TraceWord w = word;
    w.insert(w.end(), j, 4);
    const LaurentN mom = hermitian_moment_laurent(w);
    const GaussRat c(mpq_class((j % 2 == 0 ? 1 : -1), mpz_class(factorial(j) * (mpz_class(1) << (2 * j)))));
    for (const auto& [e, v] : mom.coeffs) s.add_term(n_power(e + j) * g_power(j), c * GaussRat(mpq_class(v)));
  }
  return s;
}

}  // namespace

TruncSpec OneMatrixModel::trunc() const {
  TruncSpec t;
  t.max_time_deg = max_deg;
  t.p_max = p_max;
  t.max_time_weight = max_weight;
  return t;
}

Series z1mm_series(const OneMatrixModel& model) {
  if (model.p_max < 0 || model.max_deg < 0) throw std::invalid_argument("z1mm_series: negative truncation");
  Series out(model.trunc());
  std::vector<int> e(model.p_max + 1, 0);
  std::function<void(int, int, int)> rec = [&](int p, int deg, int weight) {
    if (p > model.p_max) {
      if (weight % 2 != 0) return;
      TraceWord word;
      mpz_class denom = 1;
      Monomial m;
      for (int q = 0; q <= model.p_max; ++q) {
        if (e[q] == 0) continue;
        word.insert(word.end(), e[q], q);
        denom *= factorial(e[q]);
        m = m * Monomial::time(tvar(model.color, q, model.set), e[q]);
      }
      const LaurentN mom = hermitian_moment_laurent(word);
      const GaussRat c(mpq_class(deg % 2 == 0 ? 1 : -1, denom));
      for (const auto& [ex, v] : mom.coeffs) out.add_term(m * n_power(ex + deg), c * GaussRat(mpq_class(v)));
      return;
    }
    for (int k = 0; deg + k <= model.max_deg && weight + k * p <= model.max_weight; ++k) {
      e[p] = k;
      rec(p + 1, deg + k, weight + k * p);
    }
    e[p] = 0;
  };
  rec(0, 0, 0);
  return maybe_evaluate(out, model.nsize);
}

TimeVar quartic_coupling() { return tvar(1, 4); }

Series quartic_partition_function(int order) { return quartic_insertions({}, order); }

Series quartic_free_energy(int order) {
  Series f = log_trunc(quartic_partition_function(order));
  for (const auto& [m, c] : f.terms()) {
    // N^{2-2g}: hn = 2 * (2 - 2g)
    if (m.hn % 4 != 0 || m.hn > 4)
      throw GradingViolation("free energy term '" + m.str() + "' has N exponent outside 2-2g");
  }
  return f;
}

GaussRat tutte_closed_form(int n) {
  mpz_class three_n;
  mpz_pow_ui(three_n.get_mpz_t(), mpz_class(3).get_mpz_t(), static_cast<unsigned long>(n));
  mpz_class binom;
  mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(2 * n), static_cast<unsigned long>(n));
  return GaussRat(mpq_class(2 * three_n * binom, mpz_class((n + 2) * (n + 1))));
}

TutteReport planar_two_point(int n_max) {
  TutteReport r;
  const Series a = quartic_insertions({2}, n_max);
  const Series z = quartic_partition_function(n_max);
  const Series g2 = (a * inverse(z)).times_monomial(n_power(-1));
  for (const auto& [m, c] : g2.terms())
    if (m.hn > 0) r.leading_order_ok = false;
  r.pass = r.leading_order_ok;
  for (int n = 0; n <= n_max; ++n) {
    const GaussRat raw = g2.coeff_of(g_power(n));
    const GaussRat sign(sgn(raw.re()));
    r.extracted.push_back(sign.is_zero() ? raw : raw * sign);
    r.signs.push_back(sign);
    r.closed_form.push_back(tutte_closed_form(n));
    if (!(r.extracted.back() == r.closed_form.back()) || !(sign == GaussRat(n % 2 == 0 ? 1 : -1))) r.pass = false;
  }
  return r;
}

DiffOp virasoro_operator(int n, int p_max_times, int color, int set) {
  if (n < -1) throw std::invalid_argument("Virasoro index must be >= -1");
  DiffOp op;
  auto key = [&](int p) { return tvar(color, p, set).key(); };
  for (int k = 0; k <= n; ++k) {
    const int l = n - k;
    if (k > p_max_times || l > p_max_times) continue;
    VarPowers d = k == l ? VarPowers{{key(k), 2}} : VarPowers{{key(std::min(k, l)), 1}, {key(std::max(k, l)), 1}};
    op.add_term(n_power(-2), std::move(d), 1);
  }
  for (int p = 1; p <= p_max_times; ++p) {
    if (p + n < 0 || p + n > p_max_times) continue;
    op.add_term(Monomial::time(tvar(color, p, set)), {{key(p + n), 1}}, p);
  }
  if (n + 2 <= p_max_times) op.add_term(Monomial::one(), {{key(n + 2), 1}}, 1);
  return op;
}

Series virasoro_residual(int n, const OneMatrixModel& model) {
  const int base_weight =
      model.max_weight >= TruncSpec::kUnbounded ? model.max_deg * model.p_max : model.max_weight;
  OneMatrixModel big = model;
  big.p_max = model.p_max + n + 2;
  big.max_deg = model.max_deg + 2;
  big.max_weight = base_weight + n + 2;
  const Series z = z1mm_series(big);
  const DiffOp l = virasoro_operator(n, big.p_max, model.color, model.set);
  TruncSpec out = model.trunc();
  out.max_time_weight = base_weight;
  return apply(l, z).truncated(out);
}

Series measure_moment(int k, int order, int nsize) {
  Series s(g_trunc(order));
  if (k < 0) throw std::invalid_argument("moment index must be nonnegative");
  if (k % 2 == 0) {
    for (int j = 0; j <= order; ++j) {
      const int m = (k + 4 * j) / 2;
      const GaussRat c(mpq_class(double_factorial(2 * m - 1) * (j % 2 == 0 ? 1 : -1),
                                 mpz_class(factorial(j) * (mpz_class(1) << (2 * j)))));
      s.add_term(n_power(j - m) * g_power(j), c);
    }
  }
  return maybe_evaluate(s, nsize);
}

std::string OrthoPoly::str() const {
  std::string out;
  for (int j = degree; j >= 0; --j) {
    out += "x^" + std::to_string(j) + ":\n";
    for (const auto& l : coeffs[j].lines()) out += "  " + l + "\n";
  }
  return out;
}

namespace {

using PowerSumPoly = std::map<TraceWord, mpq_class>;

// e_k in power sums via Newton: k e_k = sum_{i=1}^k (-1)^{i-1} e_{k-i} p_i.
std::vector<PowerSumPoly> elementary_in_power_sums(int n) {
  std::vector<PowerSumPoly> e(n + 1);
  e[0][{}] = 1;
  for (int k = 1; k <= n; ++k) {
    for (int i = 1; i <= k; ++i) {
      for (const auto& [word, c] : e[k - i]) {
        TraceWord w = word;
        w.push_back(i);
        std::sort(w.rbegin(), w.rend());
        e[k][w] += c * (i % 2 == 1 ? 1 : -1) / mpq_class(k);
      }
    }
    for (auto it = e[k].begin(); it != e[k].end();) it = it->second == 0 ? e[k].erase(it) : std::next(it);
  }
  return e;
}

Series inner_product(const OrthoPoly& a, const OrthoPoly& b, const std::vector<Series>& m) {
  Series s(m.front().trunc());
  for (int i = 0; i <= a.degree; ++i)
    for (int j = 0; j <= b.degree; ++j) s += a.coeffs[i] * b.coeffs[j] * m.at(i + j);
  return s;
}

std::vector<Series> moment_table(int max_k, int nsize, int order) {
  std::vector<Series> m;
  for (int k = 0; k <= max_k; ++k) m.push_back(measure_moment(k, order, nsize));
  return m;
}

}  // namespace

OrthoPoly charpoly_expectation(int nsize, int order) {
  if (nsize < 1) throw std::invalid_argument("charpoly_expectation: size must be positive");
  const auto e = elementary_in_power_sums(nsize);
  const Series zinv = inverse(evaluate_N(quartic_partition_function(order), nsize));
  OrthoPoly p;
  p.degree = nsize;
  p.coeffs.assign(nsize + 1, Series(g_trunc(order)));
  for (int k = 0; k <= nsize; ++k) {
    Series ek(g_trunc(order));
    for (const auto& [word, c] : e[k]) ek += evaluate_N(quartic_insertions(word, order), nsize) * GaussRat(c);
    ek = ek * zinv;
    p.coeffs[nsize - k] = k % 2 == 0 ? ek : -ek;
  }
  return p;
}

std::vector<OrthoPoly> gram_schmidt_polys(int n, int nsize, int order) {
  const auto m = moment_table(2 * n + 1, nsize, order);
  std::vector<OrthoPoly> polys;
  std::vector<Series> h_inv;
  for (int k = 0; k <= n; ++k) {
    OrthoPoly p;
    p.degree = k;
    p.coeffs.assign(k + 1, Series(g_trunc(order)));
    p.coeffs[k] = Series::constant(1, g_trunc(order));
    OrthoPoly xk = p;
    for (int i = 0; i < k; ++i) {
      const Series proj = inner_product(xk, polys[i], m) * h_inv[i];
      for (int j = 0; j <= i; ++j) p.coeffs[j] -= proj * polys[i].coeffs[j];
    }
    h_inv.push_back(inverse(inner_product(p, p, m)));
    polys.push_back(std::move(p));
  }
  return polys;
}

Series pairing_with_monomial(const OrthoPoly& p, int m, int nsize, int order) {
  Series s(g_trunc(order));
  for (int j = 0; j <= p.degree; ++j) s += p.coeffs[j] * measure_moment(j + m, order, nsize);
  return s;
}

Series orthogonality_residual(int nsize, int m, int order) {
  return pairing_with_monomial(charpoly_expectation(nsize, order), m, nsize, order);
}

Series eigenvalue_partition(int n, int nsize, int order) {
  if (n < 0) throw std::invalid_argument("eigenvalue_partition: negative size");
  // Expand prod_{i<j} (x_i - x_j)^2 as a polynomial; exponents keyed by variable.
  std::map<std::vector<int>, mpz_class> poly;
  poly[std::vector<int>(n, 0)] = 1;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int rep = 0; rep < 2; ++rep) {
        std::map<std::vector<int>, mpz_class> next;
        for (const auto& [ex, c] : poly) {
          std::vector<int> a = ex;
          ++a[i];
          next[a] += c;
          std::vector<int> b = ex;
          ++b[j];
          next[b] -= c;
        }
        poly.clear();
        for (auto& [ex, c] : next)
          if (c != 0) poly.emplace(ex, c);
      }
  // The integral depends only on the multiset of exponents.
  std::map<std::vector<int>, mpz_class> sym;
  for (const auto& [ex, c] : poly) {
    std::vector<int> s = ex;
    std::sort(s.begin(), s.end());
    sym[s] += c;
  }
  const auto m = moment_table(2 * std::max(n - 1, 0), nsize, order);
  Series z(g_trunc(order));
  for (const auto& [ex, c] : sym) {
    if (c == 0) continue;
    Series term = Series::constant(GaussRat(mpq_class(c)), g_trunc(order));
    for (int a : ex) term = term * m[a];
    z += term;
  }
  return z;
}

bool KnReport::pass() const {
  if (!kn_ratio_residual.is_zero() || !zn_product_residual.is_zero() || !charpoly_vs_gram_schmidt.is_zero())
    return false;
  return std::all_of(gaussian_ratio_residuals.begin(), gaussian_ratio_residuals.end(),
                     [](const GaussRat& r) { return r.is_zero(); });
}

KnReport kn_identity_residual(int nsize, int order) {
  const int n = nsize;
  KnReport r;
  const OrthoPoly pn = charpoly_expectation(n, order);
  const Series kn = pairing_with_monomial(pn, n, nsize, order);
  const Series zn = eigenvalue_partition(n, nsize, order);
  const Series zn1 = eigenvalue_partition(n + 1, nsize, order);
  r.kn_ratio_residual = kn - zn1 * inverse(zn) * GaussRat(mpq_class(1, n + 1));

  const auto gs = gram_schmidt_polys(n, nsize, order);
  const auto m = moment_table(2 * n + 1, nsize, order);
  Series prod = Series::constant(GaussRat(mpq_class(factorial(n))), g_trunc(order));
  std::vector<Series> h;
  for (int i = 0; i <= n; ++i) h.push_back(inner_product(gs[i], gs[i], m));
  for (int i = 0; i < n; ++i) prod = prod * h[i];
  r.zn_product_residual = zn - prod;

  TruncSpec xt = g_trunc(order);
  Series diff(xt);
  for (int j = 0; j <= n; ++j) diff += (pn.coeffs[j] - gs[n].coeffs[j]).times_monomial(Monomial::z(j));
  r.charpoly_vs_gram_schmidt = diff;

  const GaussRat h0 = h[0].constant_term();
  for (int i = 0; i <= n; ++i) {
    mpz_class npow;
    mpz_pow_ui(npow.get_mpz_t(), mpz_class(nsize).get_mpz_t(), static_cast<unsigned long>(i));
    r.gaussian_ratio_residuals.push_back(h[i].constant_term() / h0 - GaussRat(mpq_class(factorial(i), npow)));
  }
  return r;
}

}  // namespace melonic
