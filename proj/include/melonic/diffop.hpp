#pragma once

// Differential operators on the time ring in normal-ordered form:
//   sum_j c_j * m_j * d^{alpha_j}
// where m_j is a monomial (scalars, z and multiplication by times) and
// d^{alpha} a multi-derivative in the times. Derivatives act first.

#include <functional>
#include <map>
#include <string>
#include <utility>

#include "melonic/series.hpp"

namespace melonic {

class DiffOp {
 public:
  using Key = std::pair<Monomial, VarPowers>;
  using TermMap = std::map<Key, GaussRat>;

  DiffOp() = default;
  explicit DiffOp(TruncSpec trunc) : trunc_(trunc) {}

  static DiffOp identity(TruncSpec trunc = {});
  /// Multiplication by a series (no derivatives).
  static DiffOp multiply(const Series& s, TruncSpec trunc = {});
  static DiffOp deriv(TimeVar v, int k = 1, TruncSpec trunc = {});
  static DiffOp term(const Monomial& m, const VarPowers& derivs, const GaussRat& c, TruncSpec trunc = {});

  const TermMap& terms() const { return terms_; }
  const TruncSpec& trunc() const { return trunc_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Adds c*m*d^derivs, dropped when outside the truncation.
  void add_term(Monomial m, VarPowers derivs, const GaussRat& c);

  DiffOp& operator+=(const DiffOp& o);
  DiffOp& operator-=(const DiffOp& o);
  DiffOp& operator*=(const GaussRat& c);
  friend DiffOp operator+(DiffOp a, const DiffOp& b) { return a += b; }
  friend DiffOp operator-(DiffOp a, const DiffOp& b) { return a -= b; }
  friend DiffOp operator*(DiffOp a, const GaussRat& c) { return a *= c; }
  friend DiffOp operator*(const GaussRat& c, DiffOp a) { return a *= c; }
  DiffOp operator-() const { return *this * GaussRat(-1); }

  friend bool operator==(const DiffOp& a, const DiffOp& b) { return a.terms_ == b.terms_; }

  DiffOp truncated(const TruncSpec& t) const;
  DiffOp filter(const std::function<bool(const Monomial&, const VarPowers&)>& keep) const;

  std::string str() const;

 private:
  TermMap terms_;
  TruncSpec trunc_{};
};

/// a o b, normal ordered through the Leibniz rule.
DiffOp compose(const DiffOp& a, const DiffOp& b);
inline DiffOp operator*(const DiffOp& a, const DiffOp& b) { return compose(a, b); }
DiffOp commutator(const DiffOp& a, const DiffOp& b);

Series apply(const DiffOp& op, const Series& s);

/// Optional pruning hook applied to every intermediate series.
using SeriesPrune = std::function<bool(const Monomial&)>;

/// sum_n op^n(s)/n!. Stops when a power vanishes; throws NilpotencyError
/// after `cap` steps.
Series apply_exp(const DiffOp& op, const Series& s, const SeriesPrune& keep = {}, int cap = 256);

/// e^A B e^{-A} = sum_k ad_A^k(B)/k!.
DiffOp conjugate_exp(const DiffOp& a, const DiffOp& b, int cap = 64);

/// ad_A^k(B).
DiffOp ad_power(const DiffOp& a, const DiffOp& b, int k);

}  // namespace melonic
