#pragma once

// Exact truncated multivariate Laurent/power series over the Gaussian
// rationals Q(i).
//
// A monomial is sqrtLam^hl * sqrtN^hn * sqrt2^h2 * z^zexp * prod t[c,p]^e.
// Half-integer powers of lambda, N and 2 are carried as integer exponents of
// their square roots; sqrt2 is kept reduced to h2 in {0, 1}.

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace melonic {

class TruncationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IllPosedExpansion : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NilpotencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exact complex rational re + i*im.
class GaussRat {
 public:
  GaussRat() = default;
  GaussRat(long v) : re_(v) {}  // NOLINT(google-explicit-constructor)
  GaussRat(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  static GaussRat i() { return {0, 1}; }
  /// i^k for any integer k.
  static GaussRat i_pow(long k);

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }
  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }
  GaussRat conj() const { return {re_, -im_}; }

  GaussRat& operator+=(const GaussRat& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussRat& operator-=(const GaussRat& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussRat& operator*=(const GaussRat& o);
  GaussRat& operator/=(const GaussRat& o);

  friend GaussRat operator+(GaussRat a, const GaussRat& b) { return a += b; }
  friend GaussRat operator-(GaussRat a, const GaussRat& b) { return a -= b; }
  friend GaussRat operator*(GaussRat a, const GaussRat& b) { return a *= b; }
  friend GaussRat operator/(GaussRat a, const GaussRat& b) { return a /= b; }
  friend GaussRat operator-(const GaussRat& a) { return {-a.re_, -a.im_}; }
  friend bool operator==(const GaussRat& a, const GaussRat& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  /// "(re)/(im)", each part a reduced rational p or p/q.
  std::string str() const;
  static GaussRat parse(std::string_view text);

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

/// A time variable t^c_p. `set` distinguishes independent copies of the
/// times (0 = t, 1 = t~ used by bilinear identities).
struct TimeVar {
  int color = 1;
  int index = 0;
  int set = 0;

  std::uint32_t key() const {
    return (static_cast<std::uint32_t>(set) << 24) | (static_cast<std::uint32_t>(color) << 16) |
           static_cast<std::uint32_t>(index);
  }
  static TimeVar from_key(std::uint32_t k) {
    return {static_cast<int>((k >> 16) & 0xffU), static_cast<int>(k & 0xffffU),
            static_cast<int>(k >> 24)};
  }
  std::string str() const;
  friend bool operator==(const TimeVar& a, const TimeVar& b) { return a.key() == b.key(); }
  friend auto operator<=>(const TimeVar& a, const TimeVar& b) { return a.key() <=> b.key(); }
};

inline TimeVar tvar(int color, int index, int set = 0) { return {color, index, set}; }

/// Sorted (key, exponent) list, exponents strictly positive.
using VarPowers = std::vector<std::pair<std::uint32_t, int>>;

int powers_degree(const VarPowers& v);
VarPowers powers_product(const VarPowers& a, const VarPowers& b);

struct Monomial {
  int hl = 0;    // exponent of sqrt(lambda)
  int hn = 0;    // exponent of sqrt(N)
  int h2 = 0;    // exponent of sqrt(2)
  int zexp = 0;  // exponent of z
  VarPowers times;

  static Monomial one() { return {}; }
  static Monomial time(TimeVar v, int e = 1) {
    Monomial m;
    m.times.emplace_back(v.key(), e);
    return m;
  }
  static Monomial z(int e) {
    Monomial m;
    m.zexp = e;
    return m;
  }

  int time_degree() const { return powers_degree(times); }
  /// Sum of index * exponent over the times (number of matrix slots).
  int time_weight() const;
  int exponent(TimeVar v) const;
  bool has_times() const { return !times.empty(); }
  /// Same monomial without the time part.
  Monomial scalar_part() const { return {hl, hn, h2, zexp, {}}; }

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend auto operator<=>(const Monomial&, const Monomial&) = default;

  std::string str() const;
};

struct TruncSpec {
  static constexpr int kUnbounded = 1 << 28;

  int max_hl = kUnbounded;
  int max_time_deg = kUnbounded;
  int p_max = kUnbounded;
  /// Cap on sum of index * exponent over times.
  int max_time_weight = kUnbounded;
  int z_min = -kUnbounded;
  int z_max = kUnbounded;

  bool admits(const Monomial& m) const;
  /// admits() ignoring the z window.
  bool admits_ignoring_z(const Monomial& m) const;
  TruncSpec meet(const TruncSpec& o) const;
  void validate() const;
  std::string str() const;

  friend bool operator==(const TruncSpec&, const TruncSpec&) = default;
};

/// Sparse series. Coefficients in [exact_z_lo, exact_z_hi] are exact; outside
/// that band terms may have been lost to the z window.
class Series {
 public:
  using TermMap = std::map<Monomial, GaussRat>;
  static constexpr int kNegInf = -(1 << 29);
  static constexpr int kPosInf = 1 << 29;

  Series() = default;
  explicit Series(TruncSpec trunc) : trunc_(trunc) { trunc_.validate(); }

  static Series constant(const GaussRat& c, TruncSpec trunc = {});
  static Series from_monomial(const Monomial& m, const GaussRat& c = 1, TruncSpec trunc = {});
  static Series variable(TimeVar v, TruncSpec trunc = {});

  const TermMap& terms() const { return terms_; }
  const TruncSpec& trunc() const { return trunc_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  int exact_z_lo() const { return z_lo_; }
  int exact_z_hi() const { return z_hi_; }
  void set_exact_band(int lo, int hi) {
    z_lo_ = lo;
    z_hi_ = hi;
  }
  /// Lowest / highest z exponent present (kPosInf / kNegInf when empty).
  int min_zexp() const;
  int max_zexp() const;

  /// Adds c*m, reducing sqrt2 and dropping anything outside the truncation.
  void add_term(Monomial m, const GaussRat& c);

  /// Exact coefficient of m. Throws TruncationError when m lies outside the
  /// truncation or outside the exact z band.
  GaussRat coeff_of(const Monomial& m) const;
  GaussRat constant_term() const;

  /// Re-truncate to a stricter spec.
  Series truncated(const TruncSpec& t) const;
  Series filter(const std::function<bool(const Monomial&)>& keep) const;
  /// Set every time variable matching `pred` to zero.
  Series set_times_zero(const std::function<bool(TimeVar)>& pred) const;
  Series set_all_times_zero() const;

  Series& operator+=(const Series& o);
  Series& operator-=(const Series& o);
  Series& operator*=(const GaussRat& c);
  Series operator-() const;
  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  friend Series operator*(Series a, const GaussRat& c) { return a *= c; }
  friend Series operator*(const GaussRat& c, Series a) { return a *= c; }
  /// Multiply every term by a monomial.
  Series times_monomial(const Monomial& m, const GaussRat& c = 1) const;

  /// Terms equal (truncation specs are not compared).
  friend bool operator==(const Series& a, const Series& b) { return a.terms_ == b.terms_; }

  /// One term per line in canonical order; "0" for the zero series.
  std::string str() const;
  std::vector<std::string> lines() const;
  static Series parse(std::string_view text, TruncSpec trunc = {});

 private:
  friend Series mul(const Series& a, const Series& b);

  TermMap terms_;
  TruncSpec trunc_{};
  int z_lo_ = kNegInf;
  int z_hi_ = kPosInf;
};

/// Exact truncated product under the stricter of the two truncations.
Series mul(const Series& a, const Series& b);
inline Series operator*(const Series& a, const Series& b) { return mul(a, b); }

/// sum_k a^k / k!, truncated. `a` must be nilpotent under its truncation.
Series exp_trunc(const Series& a);
/// log(a) for a with constant term 1.
Series log_trunc(const Series& a);
/// 1/a for a with an invertible scalar constant term.
Series inverse(const Series& a);
Series pow(const Series& a, int k);

Series derive(const Series& a, TimeVar v);

/// Substitute a concrete positive integer for N (sqrtN -> sqrt(n)). Odd powers
/// of sqrtN are allowed only when n is a perfect square or n == 2.
Series evaluate_N(const Series& a, int n);

/// Saturating exponent adds for the exactness band. band_add treats an
/// infinite lower edge as absorbing, band_add_hi an infinite upper edge.
int band_add(int a, int b);
int band_add_hi(int a, int b);

}  // namespace melonic
