#include <gtest/gtest.h>

#include <algorithm>

#include "melonic/wick.hpp"

using namespace melonic;

namespace {

LaurentN L(std::initializer_list<std::pair<int, long>> terms) {
  LaurentN l;
  for (auto [e, c] : terms) l.add(e, c);
  return l;
}

// Every multiset of positive exponents with total <= max_total.
void words_up_to(int max_total, TraceWord& cur, int max_part, std::vector<TraceWord>& out) {
  int total = 0;
  for (int p : cur) total += p;
  if (!cur.empty()) out.push_back(cur);
  for (int p = std::min(max_part, max_total - total); p >= 1; --p) {
    cur.push_back(p);
    words_up_to(max_total, cur, p, out);
    cur.pop_back();
  }
}

std::vector<TraceWord> all_words(int max_total) {
  std::vector<TraceWord> out;
  TraceWord cur;
  words_up_to(max_total, cur, max_total, out);
  return out;
}

std::uint64_t double_factorial(int n) {
  std::uint64_t r = 1;
  for (int i = n; i > 1; i -= 2) r *= i;
  return r;
}

}  // namespace

TEST(Wick, BasicHermitianMoments) {
  EXPECT_EQ(hermitian_moment_laurent({2}), L({{1, 1}}));
  EXPECT_EQ(hermitian_moment_laurent({4}), L({{1, 2}, {-1, 1}}));
  EXPECT_EQ(hermitian_moment_laurent({2, 2}), L({{2, 1}, {0, 2}}));
  EXPECT_EQ(hermitian_moment_laurent({1, 1}), L({{0, 1}}));
  EXPECT_EQ(hermitian_moment_laurent({0}), L({{1, 1}}));
  EXPECT_TRUE(hermitian_moment_laurent({3}).is_zero());
  EXPECT_TRUE(hermitian_moment_laurent({2, 1}).is_zero());
}

TEST(Wick, OracleValues) {
  EXPECT_EQ(hermitian_oracle({2}, 2), 2);
  EXPECT_EQ(hermitian_oracle({4}, 1), 3);
  EXPECT_EQ(hermitian_oracle({4}, 2), mpq_class(9, 2));
  EXPECT_EQ(tensor_oracle(tensor_dipole(3), 2), 2);
  EXPECT_THROW(hermitian_oracle({8, 8}, 3, 1000), BudgetExceeded);
}

TEST(Wick, PairingCounts) {
  for (int n = 0; n <= 6; ++n) {
    EXPECT_EQ(for_each_matrix_pairing(2 * n, [](const std::vector<int>&) {}), double_factorial(2 * n - 1));
  }
  std::uint64_t f = 1;
  for (int k = 0; k <= 6; ++k) {
    if (k > 0) f *= k;
    EXPECT_EQ(for_each_tensor_matching(k, [](const std::vector<int>&) {}), f);
  }
  EXPECT_EQ(matrix_patterns({4}).size(), 3U);
  EXPECT_EQ(matrix_patterns({}).size(), 1U);
}

TEST(Wick, PatternsAreInvolutionsInOrder) {
  auto pats = matrix_patterns({2, 4});
  ASSERT_EQ(pats.size(), 15U);
  for (std::size_t i = 0; i < pats.size(); ++i) {
    for (int s = 0; s < 6; ++s) EXPECT_EQ(pats[i].partner[pats[i].partner[s]], s);
    if (i > 0) {
      EXPECT_LT(pats[i - 1].partner, pats[i].partner);
    }
  }
}

TEST(Wick, SymbolicMatchesOracleUpTo8Slots) {
  for (const auto& w : all_words(8)) {
    const LaurentN sym = hermitian_moment_pairings(w);
    for (int n : {1, 2}) EXPECT_EQ(sym.evaluate(n), hermitian_oracle(w, n)) << "word size " << w.size() << " N=" << n;
  }
}

TEST(Wick, RecursionMatchesPairings) {
  for (const auto& w : all_words(12)) EXPECT_EQ(hermitian_moment_recursive(w), hermitian_moment_pairings(w));
  EXPECT_EQ(hermitian_moment_recursive({0, 0, 2}), L({{3, 1}}));
}

TEST(Wick, NonnegativeIntegerCoefficients) {
  for (const auto& w : all_words(10))
    for (const auto& [e, c] : hermitian_moment_laurent(w).coeffs) EXPECT_GT(c, 0);
}

TEST(Wick, PermutationInvariance) {
  TraceWord w = {1, 2, 3, 4};
  const LaurentN ref = hermitian_moment_pairings(w);
  std::sort(w.begin(), w.end());
  do {
    EXPECT_EQ(hermitian_moment_pairings(w), ref);
  } while (std::next_permutation(w.begin(), w.end()));
}

TEST(Wick, ThreadedPairingsMatch) {
  EXPECT_EQ(hermitian_moment_pairings({4, 4, 2}, 16, 3), hermitian_moment_pairings({4, 4, 2}));
  const auto q = quartic_melonic(3, 1) * quartic_melonic(3, 2);
  EXPECT_EQ(tensor_moment_laurent(q, 3), tensor_moment_laurent(q));
}

TEST(Wick, TensorMoments) {
  EXPECT_EQ(tensor_moment_laurent(tensor_dipole(3)), L({{1, 1}}));
  EXPECT_EQ(tensor_moment_laurent(tensor_dipole(4)), L({{1, 1}}));
  EXPECT_EQ(tensor_moment_laurent(quartic_melonic(3, 1)), L({{1, 1}, {0, 1}}));
  TensorContraction unbalanced;
  unbalanced.D = 3;
  unbalanced.whites = 2;
  unbalanced.blacks = 1;
  EXPECT_TRUE(tensor_moment_laurent(unbalanced).is_zero());
  EXPECT_EQ(tensor_oracle(unbalanced, 2), 0);
}

TEST(Wick, TensorOracleAgreement) {
  std::vector<TensorContraction> cases = {tensor_dipole(3), quartic_melonic(3, 1), quartic_melonic(3, 3),
                                          tensor_dipole(3) * tensor_dipole(3), tensor_dipole(2) * quartic_melonic(2, 2)};
  for (const auto& c : cases)
    for (int n : {1, 2}) EXPECT_EQ(tensor_moment_laurent(c).evaluate(n), tensor_oracle(c, n));
}

TEST(Wick, TensorColorRelabeling) {
  const auto base = quartic_melonic(3, 1) * quartic_melonic(3, 2);
  const auto ref = tensor_moment_laurent(base);
  std::vector<int> perm = {0, 1, 2};
  do {
    TensorContraction r = base;
    for (int c = 0; c < 3; ++c) r.black_of_white[perm[c]] = base.black_of_white[c];
    EXPECT_EQ(tensor_moment_laurent(r), ref);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST(Wick, SeriesConversion) {
  Series s = hermitian_moment({4});
  Monomial n1;
  n1.hn = 2;
  Monomial nm1;
  nm1.hn = -2;
  EXPECT_EQ(s.coeff_of(n1), GaussRat(2));
  EXPECT_EQ(s.coeff_of(nm1), GaussRat(1));
}
