#include "melonic/diffop.hpp"

#include <algorithm>

namespace melonic {

namespace {

bool derivs_admitted(const VarPowers& d, const TruncSpec& t) {
  for (const auto& [k, e] : d)
    if (TimeVar::from_key(k).index > t.p_max) return false;
  return true;
}

// gamma!/(gamma-delta)!
mpz_class falling(int gamma, int delta) {
  mpz_class r = 1;
  for (int i = 0; i < delta; ++i) r *= gamma - i;
  return r;
}

mpz_class binom(int n, int k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

// Exponent of key in a VarPowers list.
int power_of(const VarPowers& v, std::uint32_t key) {
  auto it = std::lower_bound(v.begin(), v.end(), key, [](const auto& p, std::uint32_t k) { return p.first < k; });
  return (it != v.end() && it->first == key) ? it->second : 0;
}

VarPowers powers_minus(const VarPowers& a, const VarPowers& b) {
  VarPowers out;
  for (const auto& [k, e] : a) {
    const int r = e - power_of(b, k);
    if (r > 0) out.emplace_back(k, r);
  }
  return out;
}

bool powers_contains(const VarPowers& big, const VarPowers& small) {
  for (const auto& [k, e] : small)
    if (power_of(big, k) < e) return false;
  return true;
}

// All sub-multi-indices delta <= alpha restricted to keys also present in gamma.
void for_each_sub(const VarPowers& alpha, const VarPowers& gamma,
                  const std::function<void(const VarPowers&)>& fn) {
  std::vector<std::pair<std::uint32_t, int>> slots;
  for (const auto& [k, e] : alpha) {
    const int cap = std::min(e, power_of(gamma, k));
    if (cap > 0) slots.emplace_back(k, cap);
  }
  std::vector<int> cur(slots.size(), 0);
  while (true) {
    VarPowers delta;
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (cur[i] > 0) delta.emplace_back(slots[i].first, cur[i]);
    fn(delta);
    std::size_t i = 0;
    for (; i < slots.size(); ++i) {
      if (cur[i] < slots[i].second) {
        ++cur[i];
        break;
      }
      cur[i] = 0;
    }
    if (i == slots.size()) return;
  }
}

std::string derivs_str(const VarPowers& d) {
  std::string out;
  for (const auto& [k, e] : d) {
    if (!out.empty()) out += " * ";
    out += "d[" + TimeVar::from_key(k).str() + "]^" + std::to_string(e);
  }
  return out;
}

}  // namespace

DiffOp DiffOp::identity(TruncSpec trunc) { return term(Monomial::one(), {}, 1, trunc); }

DiffOp DiffOp::multiply(const Series& s, TruncSpec trunc) {
  DiffOp op(trunc);
  for (const auto& [m, c] : s.terms()) op.add_term(m, {}, c);
  return op;
}

DiffOp DiffOp::deriv(TimeVar v, int k, TruncSpec trunc) {
  return term(Monomial::one(), VarPowers{{v.key(), k}}, 1, trunc);
}

DiffOp DiffOp::term(const Monomial& m, const VarPowers& derivs, const GaussRat& c, TruncSpec trunc) {
  DiffOp op(trunc);
  op.add_term(m, derivs, c);
  return op;
}

void DiffOp::add_term(Monomial m, VarPowers derivs, const GaussRat& c) {
  if (c.is_zero()) return;
  // Reduce sqrt2 through a scratch series so the rule lives in one place.
  Series scratch;
  scratch.add_term(m, c);
  if (scratch.is_zero()) return;
  const auto& [mr, cr] = *scratch.terms().begin();
  if (!trunc_.admits(mr) || !derivs_admitted(derivs, trunc_)) return;
  auto [it, inserted] = terms_.try_emplace(Key{mr, std::move(derivs)}, cr);
  if (!inserted) {
    it->second += cr;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

DiffOp& DiffOp::operator+=(const DiffOp& o) {
  if (!(trunc_ == o.trunc_)) *this = truncated(o.trunc_);
  for (const auto& [k, c] : o.terms_) add_term(k.first, k.second, c);
  return *this;
}

DiffOp& DiffOp::operator-=(const DiffOp& o) {
  if (!(trunc_ == o.trunc_)) *this = truncated(o.trunc_);
  for (const auto& [k, c] : o.terms_) add_term(k.first, k.second, -c);
  return *this;
}

DiffOp& DiffOp::operator*=(const GaussRat& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, v] : terms_) v *= c;
  return *this;
}

DiffOp DiffOp::truncated(const TruncSpec& t) const {
  DiffOp out(trunc_.meet(t));
  for (const auto& [k, c] : terms_) out.add_term(k.first, k.second, c);
  return out;
}

DiffOp DiffOp::filter(const std::function<bool(const Monomial&, const VarPowers&)>& keep) const {
  DiffOp out(trunc_);
  for (const auto& [k, c] : terms_)
    if (keep(k.first, k.second)) out.terms_.emplace_hint(out.terms_.end(), k, c);
  return out;
}

std::string DiffOp::str() const {
  if (terms_.empty()) return "0\n";
  std::string out;
  for (const auto& [k, c] : terms_) {
    std::string line = c.str();
    const std::string ms = k.first.str();
    if (!ms.empty()) line += " * " + ms;
    const std::string ds = derivs_str(k.second);
    if (!ds.empty()) line += " * " + ds;
    out += line + "\n";
  }
  return out;
}

DiffOp compose(const DiffOp& a, const DiffOp& b) {
  DiffOp out(a.trunc().meet(b.trunc()));
  for (const auto& [ka, ca] : a.terms()) {
    const auto& [ma, alpha] = ka;
    for (const auto& [kb, cb] : b.terms()) {
      const auto& [mb, beta] = kb;
      const GaussRat cab = ca * cb;
      for_each_sub(alpha, mb.times, [&](const VarPowers& delta) {
        mpz_class factor = 1;
        for (const auto& [k, d] : delta) factor *= binom(power_of(alpha, k), d) * falling(power_of(mb.times, k), d);
        Monomial mbd = mb;
        mbd.times = powers_minus(mb.times, delta);
        out.add_term(ma * mbd, powers_product(powers_minus(alpha, delta), beta), cab * GaussRat(mpq_class(factor)));
      });
    }
  }
  return out;
}

DiffOp commutator(const DiffOp& a, const DiffOp& b) { return compose(a, b) - compose(b, a); }

Series apply(const DiffOp& op, const Series& s) {
  Series out(s.trunc());
  int lo = Series::kNegInf;
  int hi = Series::kPosInf;
  for (const auto& [k, c] : op.terms()) {
    lo = std::max(lo, band_add(s.exact_z_lo(), k.first.zexp));
    hi = std::min(hi, band_add_hi(s.exact_z_hi(), k.first.zexp));
  }
  out.set_exact_band(lo, hi);
  const TruncSpec& t = s.trunc();
  for (const auto& [ms, cs] : s.terms()) {
    for (const auto& [k, c] : op.terms()) {
      const auto& [m, d] = k;
      if (ms.hl + m.hl > t.max_hl) continue;
      if (!powers_contains(ms.times, d)) continue;
      mpz_class factor = 1;
      for (const auto& [key, e] : d) factor *= falling(power_of(ms.times, key), e);
      Monomial r = ms;
      r.times = powers_minus(ms.times, d);
      out.add_term(r * m, cs * c * GaussRat(mpq_class(factor)));
    }
  }
  return out;
}

Series apply_exp(const DiffOp& op, const Series& s, const SeriesPrune& keep, int cap) {
  auto prune = [&keep](const Series& x) { return keep ? x.filter(keep) : x; };
  Series result = prune(s);
  Series power = result;
  for (int n = 1; n <= cap; ++n) {
    power = prune(apply(op, power));
    if (power.is_zero()) return result;
    power *= GaussRat(mpq_class(1, n));
    result += power;
  }
  throw NilpotencyError("apply_exp: operator not nilpotent within " + std::to_string(cap) + " steps");
}

DiffOp ad_power(const DiffOp& a, const DiffOp& b, int k) {
  DiffOp cur = b;
  for (int i = 0; i < k && !cur.is_zero(); ++i) cur = commutator(a, cur);
  return cur;
}

DiffOp conjugate_exp(const DiffOp& a, const DiffOp& b, int cap) {
  DiffOp result = b;
  DiffOp cur = b;
  for (int k = 1; k <= cap; ++k) {
    cur = commutator(a, cur);
    if (cur.is_zero()) return result;
    cur *= GaussRat(mpq_class(1, k));
    result += cur;
  }
  throw NilpotencyError("conjugate_exp: ad_A not nilpotent within " + std::to_string(cap) + " steps");
}

}  // namespace melonic
