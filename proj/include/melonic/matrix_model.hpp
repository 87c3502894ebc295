#pragma once

// Hermitian one-matrix model
//   Z = < exp(-N sum_p t_p Tr M^p) >  under  exp(-(N/2) Tr M^2)
// as a formal series in the times, plus the quartic eigenvalue model
// exp(-N (x^2/2 + t4 x^4/4)) used for orthogonal polynomials.

#include <string>
#include <vector>

#include "melonic/diffop.hpp"
#include "melonic/series.hpp"
#include "melonic/wick.hpp"

namespace melonic {

class GradingViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OneMatrixModel {
  int p_max = 4;
  int max_deg = 3;
  /// Cap on sum of index * exponent (TruncSpec::kUnbounded for none).
  int max_weight = TruncSpec::kUnbounded;
  int color = 1;
  int set = 0;
  /// 0 keeps N symbolic; otherwise N is replaced by this integer.
  int nsize = 0;

  TruncSpec trunc() const;
};

/// Coefficient of prod t_p^{e_p} is (-N)^{sum e}/prod e_p! <prod (Tr M^p)^{e_p}>.
Series z1mm_series(const OneMatrixModel& model);

/// The single coupling g of the quartic model, stored as the time t[1,4].
TimeVar quartic_coupling();

/// Z = sum_n (-N/4)^n/n! <(Tr M^4)^n> g^n through g^order.
Series quartic_partition_function(int order);
/// log Z; throws GradingViolation if an N exponent is not 2-2g.
Series quartic_free_energy(int order);

struct TutteReport {
  std::vector<GaussRat> extracted;    // |N^0 coefficient| of (1/N)<Tr M^2> per order
  std::vector<GaussRat> signs;        // sign of the raw coefficient, (-1)^n expected
  std::vector<GaussRat> closed_form;  // 2*3^n/((n+2)(n+1)) * C(2n, n)
  bool leading_order_ok = true;       // no positive N exponents
  bool pass = false;
};
TutteReport planar_two_point(int n_max);
GaussRat tutte_closed_form(int n);

/// L_n with the Gaussian term folded into t_2:
///   (1/N^2) sum_{k=0}^{n} d_k d_{n-k} + sum_{p>=1} p t_p d_{p+n} + d_{n+2}.
/// Times up to `p_max_times` in (color, set); requires n >= -1.
DiffOp virasoro_operator(int n, int p_max_times, int color = 1, int set = 0);
/// L_n Z restricted to p <= model.p_max, degree <= model.max_deg. Z is built
/// on the enlarged truncation needed for the restriction to be exact.
Series virasoro_residual(int n, const OneMatrixModel& model);

/// Gaussian-normalized moments of exp(-N(x^2/2 + g x^4/4)) through g^order;
/// nsize = 0 keeps N symbolic.
Series measure_moment(int k, int order, int nsize = 0);

/// Monic polynomial: coeffs[j] is the coefficient of x^j, a series in g.
struct OrthoPoly {
  int degree = 0;
  std::vector<Series> coeffs;
  std::string str() const;
};

/// <det(x - M)> for the Nsize x Nsize quartic model, via Newton's identities
/// and Wick moments, through g^order.
OrthoPoly charpoly_expectation(int nsize, int order);
/// Monic orthogonal polynomials P_0..P_n from measure moments (Gram-Schmidt)
/// for the measure with parameter nsize.
std::vector<OrthoPoly> gram_schmidt_polys(int n, int nsize, int order);

/// int dmu P x^m with the moments of measure parameter nsize.
Series pairing_with_monomial(const OrthoPoly& p, int m, int nsize, int order);
Series orthogonality_residual(int nsize, int m, int order);

/// Z_n = int prod dmu(x_i) Delta(x)^2 by direct expansion of the Vandermonde
/// square, measure parameter nsize.
Series eigenvalue_partition(int n, int nsize, int order);

struct KnReport {
  Series kn_ratio_residual;    // K_N - Z_{N+1}/((N+1) Z_N)
  Series zn_product_residual;  // Z_N - N! prod_{i=0}^{N-1} K_i
  Series charpoly_vs_gram_schmidt;  // sum over coefficients of the difference
  std::vector<GaussRat> gaussian_ratio_residuals;  // h_n/h_0 - n!/N^n at g = 0
  bool pass() const;
};
KnReport kn_identity_residual(int nsize, int order);

}  // namespace melonic
