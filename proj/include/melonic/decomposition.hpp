#pragma once

// Quartic melonic tensor model
//   Z = < exp(-N^{D-1} (lambda/4) sum_a (Tbar ._{hat a} T) ._a (Tbar ._{hat a} T)) >
// computed by direct tensor Wick expansion, by the intermediate matrix
// field expansion, and as e^Y acting on D copies of the one-matrix model.

#include <vector>

#include "melonic/diffop.hpp"
#include "melonic/series.hpp"

namespace melonic {

struct MelonicModel {
  int D = 3;
  /// Retain sqrt(lambda)^hl with hl <= 2K.
  int K = 1;
  int threads = 1;

  TruncSpec trunc() const;
  void validate() const;
};

/// Y = (-1)^D/N^D sum_{q != 0, |q| <= 2K} (-i)^|q|/|q| a^|q| multinomial(q)
///     d/dt^1_{q_1} ... d/dt^D_{q_D},   a = sqrt(lambda/(2 N^{D-2})).
DiffOp build_Y(int D, int K, int set = 0);
/// X = sign * sum_{c, 0 <= p <= p_max} t^c_p d/dt^c_p (sign -1 gives [X,Y] = D Y).
DiffOp build_X(int D, int p_max, int sign = -1);
/// Number of Y terms with |q| = m.
std::size_t y_level_size(const DiffOp& y, int m);

/// Each moment is computed symbolically; with oracle_n > 0 the Wick sums are
/// replaced by index sums at N = oracle_n and the result is evaluated there.
Series direct_tensor_z(const MelonicModel& model, int oracle_n = 0);
Series intermediate_field_z(const MelonicModel& model, int oracle_n = 0);
/// [e^Y prod_c Z_1MM(t^c)] at t = 0.
Series givental_z(const MelonicModel& model);

struct DecompositionReport {
  Series direct;
  Series intermediate;
  Series givental;
  Series r1;  // givental - intermediate
  Series r2;  // intermediate - direct
  bool pass() const { return r1.is_zero() && r2.is_zero(); }
};
DecompositionReport decomposition_residual(const MelonicModel& model);

struct CommutatorReport {
  Series residual;  // sum over basis monomials of ([X,Y] - D Y) m, one z power per monomial
  Series sequential_residual;  // same with X(Y m) - Y(X m) applied term by term
  std::size_t monomials = 0;
  /// With X = +sum t d, [X,Y] + D Y vanishes instead.
  bool plus_sign_gives_minus_DY = false;
  bool pass() const { return residual.is_zero() && sequential_residual.is_zero(); }
};
CommutatorReport commutator_residual(int D, int p_max, int max_deg, int K);

/// Monomials prod t^c_p^e over colors 1..D, indices 0..p_max, degree <= max_deg.
std::vector<Monomial> basis_monomials(int D, int p_max, int max_deg, int set = 0);

struct BchReport {
  std::vector<mpq_class> matrix_log;  // c(D) from log(e^X e^Y) in the 2x2 representation
  std::vector<mpq_class> bernoulli;   // D/(1 - e^{-D})
  std::vector<mpq_class> sinh_form;   // (D/2) e^{D/2} / sinh(D/2)
  bool pass() const { return matrix_log == bernoulli && bernoulli == sinh_form; }
};
BchReport bch_series_check(int order);

struct GradingReport {
  std::vector<int> hn_seen;  // sqrtN exponents present in log Z
  bool pass = true;
};
/// Every N exponent of log Z must be D - (2/(D-1)!) w with integer w >= 0.
GradingReport degree_grading(const MelonicModel& model);

}  // namespace melonic
