#pragma once

// Gaussian moments of Hermitian matrices and complex tensors.
//
// Hermitian covariance <M_ij M_kl> = delta_il delta_jk / N.
// Tensor covariance <T_I Tbar_J> = N^{1-D} prod_c delta(I_c, J_c).

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "melonic/series.hpp"

namespace melonic {

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Laurent polynomial in N with integer coefficients (exponent -> coefficient).
struct LaurentN {
  std::map<int, mpz_class> coeffs;

  static LaurentN monomial(int exp, const mpz_class& c = 1);
  bool is_zero() const { return coeffs.empty(); }
  void add(int exp, const mpz_class& c);
  LaurentN& operator+=(const LaurentN& o);
  LaurentN shifted(int by) const;
  LaurentN scaled(const mpz_class& c) const;
  friend LaurentN operator*(const LaurentN& a, const LaurentN& b);
  friend bool operator==(const LaurentN& a, const LaurentN& b) { return a.coeffs == b.coeffs; }

  /// sqrtN^(2e) monomials.
  Series to_series(TruncSpec trunc = {}) const;
  mpq_class evaluate(int n) const;
  std::string str() const;
};

/// Trace exponents p_1..p_k in <prod Tr M^{p_i}>. Zeros are allowed (Tr M^0 = N).
using TraceWord = std::vector<int>;

/// Pairing of 2n slots: partner[s] is the slot paired with s.
struct WickPattern {
  std::vector<int> partner;
  int n_exponent = 0;  // weight is N^n_exponent
};

/// Enumerates each perfect matching of `n_slots` slots once, in a fixed
/// lexicographic order. Returns the number of matchings visited.
std::uint64_t for_each_matrix_pairing(int n_slots, const std::function<void(const std::vector<int>&)>& fn);
/// Enumerates the k! matchings of k T's with k Tbar's (perm[w] = b).
std::uint64_t for_each_tensor_matching(int k, const std::function<void(const std::vector<int>&)>& fn);

/// All pairings of a trace word with their N exponents.
std::vector<WickPattern> matrix_patterns(const TraceWord& w);

/// Sum over pairings. Throws BudgetExceeded above `max_slots`.
LaurentN hermitian_moment_pairings(const TraceWord& w, int max_slots = 16, int threads = 1);
/// Loop-equation recursion on the first trace, memoized.
LaurentN hermitian_moment_recursive(const TraceWord& w);
/// Pairings for small words, recursion otherwise. Memoized and thread safe.
LaurentN hermitian_moment_laurent(const TraceWord& w);
Series hermitian_moment(const TraceWord& w, TruncSpec trunc = {});

/// Slot count at or below which hermitian_moment_laurent enumerates pairings.
void set_pairing_slot_limit(int slots);
int pairing_slot_limit();

/// Brute-force index sum at concrete N: independent real diagonal and complex
/// off-diagonal entries, moments from the one-variable Gaussian.
mpq_class hermitian_oracle(const TraceWord& w, int n, std::uint64_t budget = 50'000'000);

/// A product of tensor invariants: T's (white) and Tbar's (black);
/// black_of_white[c-1][w] is the Tbar whose color-c index is contracted with T_w.
/// Only balanced contractions (whites == blacks) have a nonzero moment.
struct TensorContraction {
  int D = 3;
  int whites = 0;
  int blacks = 0;
  std::vector<std::vector<int>> black_of_white;

  void validate() const;
  /// Disjoint union (product of invariants).
  TensorContraction operator*(const TensorContraction& o) const;
  /// Sum over colors c of cycles(beta_c^{-1} o pi) for the matching pi.
  int loops(const std::vector<int>& pi) const;
};

/// Tbar.T
TensorContraction tensor_dipole(int D);
/// The quartic melonic invariant (Tbar ._{hat a} T) ._a (Tbar ._{hat a} T).
TensorContraction quartic_melonic(int D, int color);

LaurentN tensor_moment_laurent(const TensorContraction& c, int threads = 1);
Series tensor_moment(const TensorContraction& c, TruncSpec trunc = {});
/// Sum over index assignments at concrete N.
mpq_class tensor_oracle(const TensorContraction& c, int n, std::uint64_t budget = 50'000'000);

}  // namespace melonic
