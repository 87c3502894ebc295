#pragma once

// Vertex operators, formal z residues and bilinear identities for the
// one-matrix model and for its e^Y deformation.
//
// Conventions (frozen so the Gaussian point gives a vanishing residue):
//   V_+ = e^{+kappa sum_{n>=0} z^n t_n} z^{-N} e^{-sum_{n>=1} z^{-n}/(nN) d/dt_n}
//   V_- = e^{-kappa sum_{n>=0} z^n t_n} z^{+N} e^{+sum_{n>=1} z^{-n}/(nN) d/dt_n}
// with kappa = N. The t_0 shift acts on Z ~ e^{-N^2 t_0} as the factor z^{-+N}.

#include <string>

#include "melonic/diffop.hpp"
#include "melonic/series.hpp"

namespace melonic {

class WindowInsufficient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coefficient of z^-1 (z exponent removed). Throws WindowInsufficient when
/// z^-1 lies outside the exactness band of s.
Series residue_z(const Series& s);

struct VertexOp {
  int sign = +1;
  int color = 1;
  int set = 0;
  /// Matrix size; 0 keeps N symbolic (the charge factor then needs a size).
  int nsize = 1;
  /// A-part times t_0..t_{a_pmax}; B-part derivatives d_1..d_{b_pmax}.
  int a_pmax = 4;
  int b_pmax = 4;
  /// Use kappa = 1 in the A-part instead of kappa = N.
  bool literal_scale = false;
};

/// sign * kappa * sum_{n=0}^{a_pmax} z^n t_n
Series vertex_a_series(const VertexOp& v, TruncSpec trunc = {});
/// -sign * sum_{n=1}^{b_pmax} z^{-n}/(nN) d/dt_n
DiffOp vertex_b_part(const VertexOp& v);
/// z^{-sign N}
Monomial vertex_charge(const VertexOp& v);

/// e^{A} z^{-sign N} e^{B} s, computed under s's truncation, then truncated to `out`.
Series vertex_apply(const VertexOp& v, const Series& s, const TruncSpec& out);

struct BilinearReport {
  Series residual;
  Series plus_factor;
  Series minus_factor;
  int z_window = 0;
  std::string convention;
  bool pass() const { return residual.is_zero(); }
};

/// res_z (V_+ Z[t]) (V_- Z[t~]) at equal sizes, joint time degree <= max_deg,
/// times t_0..t_{p_max}. z_window = 0 picks d*p_max + N + 2K + 2; a smaller
/// window throws WindowInsufficient when it no longer covers z^-1 exactly.
BilinearReport hirota_residual_1mm(int nsize, int max_deg, int p_max, bool literal_scale = false, int z_window = 0);

/// [A^c, Y] from the closed form: -kappa (-1)^D/N^D sum_q c_q z^{q_c} prod_{c' != c} d/dt^{c'}_{q_{c'}}.
DiffOp a_y_commutator(int color, int D, int K, int nsize, int a_pmax, int set = 0);

struct ConjugationReport {
  Series sandwich_vs_closed;  // e^Y V e^-Y against e^A e^{-[A,Y]} e^B, tagged per basis monomial
  Series parts_vs_closed;     // exp of conjugated parts against the same
  bool b_commutes = false;    // [B, Y] = 0
  bool t0_commutes = false;   // [d/dt_0, Y] = 0
  bool ad2_vanishes = false;  // [A, [A, Y]] = 0
  bool closed_matches_compose = false;
  std::size_t monomials = 0;
  bool pass() const {
    return sandwich_vs_closed.is_zero() && parts_vs_closed.is_zero() && b_commutes && t0_commutes &&
           ad2_vanishes && closed_matches_compose;
  }
};
/// Symbolic N. Basis: monomials in t^1..t^D with indices <= p_max and degree <= max_deg.
ConjugationReport conjugation_residual(int color, int sign, int D, int K, int p_max, int max_deg);

/// res_z (V^c_+(z,l) e^Y prod Z[t]) (V^c_-(z,l) e^Y prod Z[t~]) at size nsize.
BilinearReport tensor_bilinear_residual(int color, int D, int K, int nsize, int max_deg, int p_max,
                                        int z_window = 0);

}  // namespace melonic
