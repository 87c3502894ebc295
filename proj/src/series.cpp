#include "melonic/series.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace melonic {

// ---------------------------------------------------------------------------
// GaussRat

GaussRat GaussRat::i_pow(long k) {
  switch (((k % 4) + 4) % 4) {
    case 0:
      return {1, 0};
    case 1:
      return {0, 1};
    case 2:
      return {-1, 0};
    default:
      return {0, -1};
  }
}

GaussRat& GaussRat::operator*=(const GaussRat& o) {
  if (sgn(im_) == 0 && sgn(o.im_) == 0) {
    re_ *= o.re_;
    return *this;
  }
  mpq_class re = re_ * o.re_ - im_ * o.im_;
  mpq_class im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

GaussRat& GaussRat::operator/=(const GaussRat& o) {
  if (o.is_zero()) throw std::domain_error("GaussRat: division by zero");
  if (sgn(o.im_) == 0) {
    re_ /= o.re_;
    im_ /= o.re_;
    return *this;
  }
  const mpq_class norm = o.re_ * o.re_ + o.im_ * o.im_;
  *this *= o.conj();
  re_ /= norm;
  im_ /= norm;
  return *this;
}

std::string GaussRat::str() const { return "(" + re_.get_str() + ")/(" + im_.get_str() + ")"; }

namespace {

mpq_class parse_rational(std::string_view s) {
  std::string text(s);
  text.erase(std::remove_if(text.begin(), text.end(), [](unsigned char ch) { return std::isspace(ch); }),
             text.end());
  if (text.empty()) throw ParseError("empty rational");
  mpq_class q;
  if (q.set_str(text, 10) != 0) throw ParseError("bad rational '" + text + "'");
  if (q.get_den() == 0) throw ParseError("zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

}  // namespace

GaussRat GaussRat::parse(std::string_view text) {
  // "(re)/(im)"
  auto open1 = text.find('(');
  auto close1 = text.find(')', open1 == std::string_view::npos ? 0 : open1);
  if (open1 == std::string_view::npos || close1 == std::string_view::npos)
    throw ParseError("coefficient must look like (re)/(im): '" + std::string(text) + "'");
  auto open2 = text.find('(', close1);
  auto close2 = text.find(')', open2 == std::string_view::npos ? close1 : open2);
  if (open2 == std::string_view::npos || close2 == std::string_view::npos)
    throw ParseError("coefficient must look like (re)/(im): '" + std::string(text) + "'");
  return {parse_rational(text.substr(open1 + 1, close1 - open1 - 1)),
          parse_rational(text.substr(open2 + 1, close2 - open2 - 1))};
}

// ---------------------------------------------------------------------------
// TimeVar / Monomial

std::string TimeVar::str() const {
  return std::string(set == 0 ? "t" : "t~") + "[" + std::to_string(color) + "," + std::to_string(index) +
         "]";
}

int powers_degree(const VarPowers& v) {
  int d = 0;
  for (const auto& [k, e] : v) d += e;
  return d;
}

VarPowers powers_product(const VarPowers& a, const VarPowers& b) {
  VarPowers out;
  out.reserve(a.size() + b.size());
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      out.push_back(*ia++);
    } else if (ia == a.end() || ib->first < ia->first) {
      out.push_back(*ib++);
    } else {
      out.emplace_back(ia->first, ia->second + ib->second);
      ++ia;
      ++ib;
    }
  }
  return out;
}

int Monomial::time_weight() const {
  int w = 0;
  for (const auto& [k, e] : times) w += TimeVar::from_key(k).index * e;
  return w;
}

int Monomial::exponent(TimeVar v) const {
  const auto key = v.key();
  auto it = std::lower_bound(times.begin(), times.end(), key,
                             [](const auto& p, std::uint32_t k) { return p.first < k; });
  return (it != times.end() && it->first == key) ? it->second : 0;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial m;
  m.hl = a.hl + b.hl;
  m.hn = a.hn + b.hn;
  m.h2 = a.h2 + b.h2;
  m.zexp = a.zexp + b.zexp;
  if (a.times.empty()) {
    m.times = b.times;
  } else if (b.times.empty()) {
    m.times = a.times;
  } else {
    m.times = powers_product(a.times, b.times);
  }
  return m;
}

std::string Monomial::str() const {
  std::vector<std::string> parts;
  if (hl != 0) parts.push_back("sqrtLam^" + std::to_string(hl));
  if (hn != 0) parts.push_back("sqrtN^" + std::to_string(hn));
  if (h2 != 0) parts.push_back("sqrt2^" + std::to_string(h2));
  if (zexp != 0) parts.push_back("z^" + std::to_string(zexp));
  for (const auto& [k, e] : times) parts.push_back(TimeVar::from_key(k).str() + "^" + std::to_string(e));
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i != 0) out += " * ";
    out += parts[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// TruncSpec

bool TruncSpec::admits_ignoring_z(const Monomial& m) const {
  if (m.hl < 0 || m.hl > max_hl) return false;
  if (m.times.empty()) return true;
  int deg = 0;
  int weight = 0;
  for (const auto& [k, e] : m.times) {
    const int p = TimeVar::from_key(k).index;
    if (p > p_max) return false;
    deg += e;
    weight += p * e;
  }
  return deg <= max_time_deg && weight <= max_time_weight;
}

bool TruncSpec::admits(const Monomial& m) const {
  return m.zexp >= z_min && m.zexp <= z_max && admits_ignoring_z(m);
}

TruncSpec TruncSpec::meet(const TruncSpec& o) const {
  TruncSpec t;
  t.max_hl = std::min(max_hl, o.max_hl);
  t.max_time_deg = std::min(max_time_deg, o.max_time_deg);
  t.p_max = std::min(p_max, o.p_max);
  t.max_time_weight = std::min(max_time_weight, o.max_time_weight);
  t.z_min = std::max(z_min, o.z_min);
  t.z_max = std::min(z_max, o.z_max);
  if (t.z_min > t.z_max) t.z_max = t.z_min - 1;  // empty window; admits nothing
  return t;
}

void TruncSpec::validate() const {
  if (max_hl < 0 || max_time_deg < 0 || p_max < 0 || max_time_weight < 0)
    throw TruncationError("TruncSpec: negative cutoff");
  if (z_min > z_max + 1) throw TruncationError("TruncSpec: z_min > z_max");
}

std::string TruncSpec::str() const {
  auto b = [](int v) { return v >= kUnbounded ? std::string("inf") : std::to_string(v); };
  auto lo = [](int v) { return v <= -kUnbounded ? std::string("-inf") : std::to_string(v); };
  return "hl<=" + b(max_hl) + " deg<=" + b(max_time_deg) + " p<=" + b(p_max) + " weight<=" +
         b(max_time_weight) + " z in [" + lo(z_min) + "," + b(z_max) + "]";
}

// ---------------------------------------------------------------------------
// Series

int band_add(int a, int b) {
  // kNegInf dominates (nothing missing below), then kPosInf.
  if (a <= Series::kNegInf || b <= Series::kNegInf) return Series::kNegInf;
  if (a >= Series::kPosInf || b >= Series::kPosInf) return Series::kPosInf;
  return std::clamp(a + b, Series::kNegInf, Series::kPosInf);
}

int band_add_hi(int a, int b) {
  if (a >= Series::kPosInf || b >= Series::kPosInf) return Series::kPosInf;
  if (a <= Series::kNegInf || b <= Series::kNegInf) return Series::kNegInf;
  return std::clamp(a + b, Series::kNegInf, Series::kPosInf);
}

namespace {

void normalize_sqrt2(Monomial& m, GaussRat& c) {
  if (m.h2 == 0 || m.h2 == 1) return;
  // sqrt2^h2 = 2^k * sqrt2^(h2 - 2k), k = floor(h2 / 2)
  const int k = (m.h2 >= 0) ? m.h2 / 2 : -((-m.h2 + 1) / 2);
  m.h2 -= 2 * k;
  mpz_class two_k = 1;
  mpz_mul_2exp(two_k.get_mpz_t(), two_k.get_mpz_t(), static_cast<unsigned long>(k >= 0 ? k : -k));
  if (k >= 0) {
    c *= GaussRat(mpq_class(two_k));
  } else {
    c /= GaussRat(mpq_class(two_k));
  }
}

}  // namespace

Series Series::constant(const GaussRat& c, TruncSpec trunc) {
  Series s(trunc);
  s.add_term(Monomial::one(), c);
  return s;
}

Series Series::from_monomial(const Monomial& m, const GaussRat& c, TruncSpec trunc) {
  Series s(trunc);
  s.add_term(m, c);
  return s;
}

Series Series::variable(TimeVar v, TruncSpec trunc) { return from_monomial(Monomial::time(v), 1, trunc); }

int Series::min_zexp() const {
  int lo = kPosInf;
  for (const auto& [m, c] : terms_) lo = std::min(lo, m.zexp);
  return lo;
}

int Series::max_zexp() const {
  int hi = kNegInf;
  for (const auto& [m, c] : terms_) hi = std::max(hi, m.zexp);
  return hi;
}

void Series::add_term(Monomial m, const GaussRat& c) {
  if (c.is_zero()) return;
  GaussRat coeff = c;
  normalize_sqrt2(m, coeff);
  if (!trunc_.admits_ignoring_z(m)) return;
  if (m.zexp < trunc_.z_min) {
    z_lo_ = std::max(z_lo_, trunc_.z_min);
    return;
  }
  if (m.zexp > trunc_.z_max) {
    z_hi_ = std::min(z_hi_, trunc_.z_max);
    return;
  }
  auto [it, inserted] = terms_.try_emplace(std::move(m), coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

GaussRat Series::coeff_of(const Monomial& query) const {
  Monomial m = query;
  GaussRat scale = 1;
  normalize_sqrt2(m, scale);
  if (!trunc_.admits(m)) throw TruncationError("coeff_of: monomial '" + query.str() + "' outside " + trunc_.str());
  if (m.zexp < z_lo_ || m.zexp > z_hi_)
    throw TruncationError("coeff_of: z^" + std::to_string(m.zexp) + " outside the exact band");
  auto it = terms_.find(m);
  if (it == terms_.end()) return 0;
  return it->second / scale;
}

GaussRat Series::constant_term() const {
  auto it = terms_.find(Monomial::one());
  return it == terms_.end() ? GaussRat(0) : it->second;
}

Series Series::truncated(const TruncSpec& t) const {
  Series out(trunc_.meet(t));
  out.z_lo_ = z_lo_;
  out.z_hi_ = z_hi_;
  for (const auto& [m, c] : terms_) out.add_term(m, c);
  return out;
}

Series Series::filter(const std::function<bool(const Monomial&)>& keep) const {
  Series out(trunc_);
  out.z_lo_ = z_lo_;
  out.z_hi_ = z_hi_;
  for (const auto& [m, c] : terms_)
    if (keep(m)) out.terms_.emplace_hint(out.terms_.end(), m, c);
  return out;
}

Series Series::set_times_zero(const std::function<bool(TimeVar)>& pred) const {
  return filter([&](const Monomial& m) {
    for (const auto& [k, e] : m.times)
      if (pred(TimeVar::from_key(k))) return false;
    return true;
  });
}

Series Series::set_all_times_zero() const {
  return filter([](const Monomial& m) { return m.times.empty(); });
}

Series& Series::operator+=(const Series& o) {
  if (!(trunc_ == o.trunc_)) *this = truncated(o.trunc_);
  z_lo_ = std::max(z_lo_, o.z_lo_);
  z_hi_ = std::min(z_hi_, o.z_hi_);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Series& Series::operator-=(const Series& o) {
  if (!(trunc_ == o.trunc_)) *this = truncated(o.trunc_);
  z_lo_ = std::max(z_lo_, o.z_lo_);
  z_hi_ = std::min(z_hi_, o.z_hi_);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Series& Series::operator*=(const GaussRat& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

Series Series::operator-() const {
  Series out = *this;
  for (auto& [m, v] : out.terms_) v = -v;
  return out;
}

Series Series::times_monomial(const Monomial& m, const GaussRat& c) const {
  Series out(trunc_);
  out.z_lo_ = band_add(z_lo_, m.zexp);
  out.z_hi_ = band_add_hi(z_hi_, m.zexp);
  for (const auto& [t, v] : terms_) out.add_term(t * m, v * c);
  return out;
}

std::vector<std::string> Series::lines() const {
  std::vector<std::string> out;
  out.reserve(terms_.size());
  for (const auto& [m, c] : terms_) {
    std::string line = c.str();
    const std::string ms = m.str();
    if (!ms.empty()) line += " * " + ms;
    out.push_back(std::move(line));
  }
  return out;
}

std::string Series::str() const {
  if (terms_.empty()) return "0\n";
  std::string out;
  for (const auto& l : lines()) out += l + "\n";
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

int parse_int(std::string_view s) {
  s = trim(s);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad integer '" + std::string(s) + "'");
  return v;
}

void parse_factor(std::string_view f, Monomial& m) {
  f = trim(f);
  const auto caret = f.rfind('^');
  if (caret == std::string_view::npos) throw ParseError("factor without exponent: '" + std::string(f) + "'");
  const std::string_view base = trim(f.substr(0, caret));
  const int e = parse_int(f.substr(caret + 1));
  if (base == "sqrtLam") {
    m.hl += e;
  } else if (base == "sqrtN") {
    m.hn += e;
  } else if (base == "sqrt2") {
    m.h2 += e;
  } else if (base == "z") {
    m.zexp += e;
  } else if (base.starts_with("t[") || base.starts_with("t~[")) {
    const int set = base.starts_with("t~[") ? 1 : 0;
    const auto open = base.find('[');
    const auto comma = base.find(',');
    const auto close = base.find(']');
    if (comma == std::string_view::npos || close == std::string_view::npos)
      throw ParseError("bad time variable '" + std::string(base) + "'");
    const int c = parse_int(base.substr(open + 1, comma - open - 1));
    const int p = parse_int(base.substr(comma + 1, close - comma - 1));
    if (e <= 0) throw ParseError("time exponent must be positive");
    m = m * Monomial::time(tvar(c, p, set), e);
  } else {
    throw ParseError("unknown factor '" + std::string(base) + "'");
  }
}

}  // namespace

Series Series::parse(std::string_view text, TruncSpec trunc) {
  Series out(trunc);
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty() || line == "0") continue;
    // Coefficient ends at the first " * " after the closing parenthesis of im.
    const auto im_close = line.find(')', line.find('(', line.find(')') + 1));
    if (im_close == std::string_view::npos) throw ParseError("bad term '" + std::string(line) + "'");
    const GaussRat c = GaussRat::parse(line.substr(0, im_close + 1));
    Monomial m;
    std::string_view rest = trim(line.substr(im_close + 1));
    while (!rest.empty()) {
      if (rest.front() != '*') throw ParseError("expected '*' in '" + std::string(line) + "'");
      rest = trim(rest.substr(1));
      auto next = rest.find('*');
      parse_factor(rest.substr(0, next), m);
      rest = next == std::string_view::npos ? std::string_view{} : trim(rest.substr(next));
    }
    out.add_term(m, c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Arithmetic

namespace {

int true_zmax(const Series& s) { return s.exact_z_hi() >= Series::kPosInf ? s.max_zexp() : Series::kPosInf; }
int true_zmin(const Series& s) { return s.exact_z_lo() <= Series::kNegInf ? s.min_zexp() : Series::kNegInf; }

}  // namespace

Series mul(const Series& a, const Series& b) {
  Series out(a.trunc_.meet(b.trunc_));
  out.z_lo_ = std::max(band_add(a.z_lo_, true_zmax(b)), band_add(b.z_lo_, true_zmax(a)));
  out.z_hi_ = std::min(band_add_hi(a.z_hi_, true_zmin(b)), band_add_hi(b.z_hi_, true_zmin(a)));
  const TruncSpec& t = out.trunc_;
  for (const auto& [ma, ca] : a.terms_) {
    if (ma.hl > t.max_hl) break;  // terms are ordered by hl first
    const int deg_a = ma.time_degree();
    for (const auto& [mb, cb] : b.terms_) {
      if (ma.hl + mb.hl > t.max_hl) break;
      if (deg_a + mb.time_degree() > t.max_time_deg) continue;
      out.add_term(ma * mb, ca * cb);
    }
  }
  return out;
}

namespace {

void require_nilpotent(const Series& a, const char* who) {
  bool z_pos = false;
  bool z_neg = false;
  for (const auto& [m, c] : a.terms()) {
    if (m.hl > 0 || m.time_degree() > 0) continue;
    if (m.zexp > 0) {
      z_pos = true;
    } else if (m.zexp < 0) {
      z_neg = true;
    } else {
      throw IllPosedExpansion(std::string(who) + ": non-nilpotent constant part '" + m.str() + "'");
    }
  }
  const auto& t = a.trunc();
  if ((z_pos && (z_neg || t.z_max >= TruncSpec::kUnbounded)) ||
      (z_neg && t.z_min <= -TruncSpec::kUnbounded))
    throw IllPosedExpansion(std::string(who) + ": pure z terms are not nilpotent under this window");
}

constexpr int kMaxSeriesIterations = 100000;

}  // namespace

Series exp_trunc(const Series& a) {
  require_nilpotent(a, "exp_trunc");
  Series result = Series::constant(1, a.trunc());
  Series power = Series::constant(1, a.trunc());
  for (int k = 1; k < kMaxSeriesIterations; ++k) {
    power = mul(power, a);
    if (power.is_zero()) return result;
    power *= GaussRat(mpq_class(1, k));
    result += power;
  }
  throw NilpotencyError("exp_trunc: iteration cap reached");
}

Series log_trunc(const Series& a) {
  if (!(a.constant_term() == GaussRat(1))) throw IllPosedExpansion("log_trunc: constant term must be 1");
  Series r = a - Series::constant(1, a.trunc());
  require_nilpotent(r, "log_trunc");
  Series result(a.trunc());
  Series power = Series::constant(1, a.trunc());
  for (int k = 1; k < kMaxSeriesIterations; ++k) {
    power = mul(power, r);
    if (power.is_zero()) return result;
    result += power * GaussRat(mpq_class(k % 2 == 1 ? 1 : -1, k));
  }
  throw NilpotencyError("log_trunc: iteration cap reached");
}

Series inverse(const Series& a) {
  const GaussRat c0 = a.constant_term();
  if (c0.is_zero()) throw IllPosedExpansion("inverse: zero constant term");
  Series r = a - Series::constant(c0, a.trunc());
  require_nilpotent(r, "inverse");
  const GaussRat inv_c0 = GaussRat(1) / c0;
  Series q = r * (-inv_c0);
  Series result = Series::constant(1, a.trunc());
  Series power = Series::constant(1, a.trunc());
  for (int k = 1; k < kMaxSeriesIterations; ++k) {
    power = mul(power, q);
    if (power.is_zero()) return result * inv_c0;
    result += power;
  }
  throw NilpotencyError("inverse: iteration cap reached");
}

Series pow(const Series& a, int k) {
  if (k < 0) return pow(inverse(a), -k);
  Series result = Series::constant(1, a.trunc());
  for (int i = 0; i < k; ++i) result = mul(result, a);
  return result;
}

Series derive(const Series& a, TimeVar v) {
  Series out(a.trunc());
  out.set_exact_band(a.exact_z_lo(), a.exact_z_hi());
  const auto key = v.key();
  for (const auto& [m, c] : a.terms()) {
    const int e = m.exponent(v);
    if (e == 0) continue;
    Monomial d = m;
    for (auto it = d.times.begin(); it != d.times.end(); ++it) {
      if (it->first != key) continue;
      if (--it->second == 0) d.times.erase(it);
      break;
    }
    out.add_term(std::move(d), c * GaussRat(e));
  }
  return out;
}

Series evaluate_N(const Series& a, int n) {
  if (n <= 0) throw std::invalid_argument("evaluate_N: N must be positive");
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), mpz_class(n).get_mpz_t());
  const bool square = root * root == n;
  Series out(a.trunc());
  out.set_exact_band(a.exact_z_lo(), a.exact_z_hi());
  for (const auto& [m, c] : a.terms()) {
    Monomial r = m;
    r.hn = 0;
    GaussRat v = c;
    auto scale_by = [&v](const mpz_class& base, int e) {
      mpz_class p;
      mpz_pow_ui(p.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(e >= 0 ? e : -e));
      if (e >= 0) {
        v *= GaussRat(mpq_class(p));
      } else {
        v /= GaussRat(mpq_class(p));
      }
    };
    if (m.hn % 2 == 0) {
      scale_by(mpz_class(n), m.hn / 2);
    } else if (square) {
      scale_by(root, m.hn);
    } else if (n == 2) {
      r.h2 += m.hn;
    } else {
      throw std::domain_error("evaluate_N: odd power of sqrt(N) at N=" + std::to_string(n));
    }
    out.add_term(std::move(r), v);
  }
  return out;
}

}  // namespace melonic
