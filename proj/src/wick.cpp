#include "melonic/wick.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <numeric>
#include <thread>

namespace melonic {

// ---------------------------------------------------------------------------
// LaurentN

LaurentN LaurentN::monomial(int exp, const mpz_class& c) {
  LaurentN l;
  l.add(exp, c);
  return l;
}

void LaurentN::add(int exp, const mpz_class& c) {
  if (c == 0) return;
  auto [it, inserted] = coeffs.try_emplace(exp, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) coeffs.erase(it);
  }
}

LaurentN& LaurentN::operator+=(const LaurentN& o) {
  for (const auto& [e, c] : o.coeffs) add(e, c);
  return *this;
}

LaurentN LaurentN::shifted(int by) const {
  LaurentN out;
  for (const auto& [e, c] : coeffs) out.coeffs.emplace(e + by, c);
  return out;
}

LaurentN LaurentN::scaled(const mpz_class& c) const {
  LaurentN out;
  if (c == 0) return out;
  for (const auto& [e, v] : coeffs) out.coeffs.emplace(e, v * c);
  return out;
}

LaurentN operator*(const LaurentN& a, const LaurentN& b) {
  LaurentN out;
  for (const auto& [ea, ca] : a.coeffs)
    for (const auto& [eb, cb] : b.coeffs) out.add(ea + eb, ca * cb);
  return out;
}

Series LaurentN::to_series(TruncSpec trunc) const {
  Series s(trunc);
  for (const auto& [e, c] : coeffs) {
    Monomial m;
    m.hn = 2 * e;
    s.add_term(m, GaussRat(mpq_class(c)));
  }
  return s;
}

mpq_class LaurentN::evaluate(int n) const {
  mpq_class total = 0;
  for (const auto& [e, c] : coeffs) {
    mpz_class p;
    mpz_pow_ui(p.get_mpz_t(), mpz_class(n).get_mpz_t(), static_cast<unsigned long>(std::abs(e)));
    total += e >= 0 ? mpq_class(c * p) : mpq_class(c, p);
  }
  total.canonicalize();
  return total;
}

std::string LaurentN::str() const {
  if (coeffs.empty()) return "0";
  std::string out;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    if (!out.empty()) out += " + ";
    out += it->second.get_str() + "*N^" + std::to_string(it->first);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Enumerators

namespace {

void matrix_pairings_rec(std::vector<int>& partner, int first_free,
                         const std::function<void(const std::vector<int>&)>& fn, std::uint64_t& count) {
  const int n = static_cast<int>(partner.size());
  while (first_free < n && partner[first_free] >= 0) ++first_free;
  if (first_free == n) {
    fn(partner);
    ++count;
    return;
  }
  for (int j = first_free + 1; j < n; ++j) {
    if (partner[j] >= 0) continue;
    partner[first_free] = j;
    partner[j] = first_free;
    matrix_pairings_rec(partner, first_free + 1, fn, count);
    partner[first_free] = -1;
    partner[j] = -1;
  }
}

int count_cycles(const std::vector<int>& perm, std::vector<char>& seen) {
  const int n = static_cast<int>(perm.size());
  seen.assign(n, 0);
  int cycles = 0;
  for (int i = 0; i < n; ++i) {
    if (seen[i]) continue;
    ++cycles;
    for (int j = i; !seen[j]; j = perm[j]) seen[j] = 1;
  }
  return cycles;
}

struct WordLayout {
  std::vector<int> next;  // cyclic successor inside the same trace
  int zero_traces = 0;
  int slots = 0;
};

WordLayout layout(const TraceWord& w) {
  WordLayout l;
  for (int p : w) {
    if (p < 0) throw std::invalid_argument("trace exponent must be nonnegative");
    if (p == 0) {
      ++l.zero_traces;
      continue;
    }
    const int base = l.slots;
    for (int i = 0; i < p; ++i) l.next.push_back(base + (i + 1) % p);
    l.slots += p;
  }
  return l;
}

// Index loops of a pairing: cycles of next o partner.
int index_loops(const WordLayout& l, const std::vector<int>& partner, std::vector<int>& scratch,
                std::vector<char>& seen) {
  scratch.resize(partner.size());
  for (std::size_t s = 0; s < partner.size(); ++s) scratch[s] = l.next[partner[s]];
  return count_cycles(scratch, seen);
}

}  // namespace

std::uint64_t for_each_matrix_pairing(int n_slots, const std::function<void(const std::vector<int>&)>& fn) {
  if (n_slots % 2 != 0) return 0;
  std::vector<int> partner(n_slots, -1);
  std::uint64_t count = 0;
  matrix_pairings_rec(partner, 0, fn, count);
  return count;
}

std::uint64_t for_each_tensor_matching(int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::uint64_t count = 0;
  do {
    fn(perm);
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return count;
}

std::vector<WickPattern> matrix_patterns(const TraceWord& w) {
  const WordLayout l = layout(w);
  std::vector<WickPattern> out;
  std::vector<int> scratch;
  std::vector<char> seen;
  for_each_matrix_pairing(l.slots, [&](const std::vector<int>& partner) {
    const int loops = index_loops(l, partner, scratch, seen);
    out.push_back({partner, loops - l.slots / 2 + l.zero_traces});
  });
  return out;
}

// ---------------------------------------------------------------------------
// Hermitian moments

LaurentN hermitian_moment_pairings(const TraceWord& w, int max_slots, int threads) {
  const WordLayout l = layout(w);
  if (l.slots % 2 != 0) return {};
  if (l.slots > max_slots)
    throw BudgetExceeded("pairing enumeration over " + std::to_string(l.slots) + " slots exceeds budget");
  const int pairs = l.slots / 2;
  if (l.slots == 0) return LaurentN::monomial(l.zero_traces);

  // Split on the partner of slot 0; each branch is independent.
  const int branches = l.slots - 1;
  std::vector<std::vector<std::uint64_t>> hist(branches, std::vector<std::uint64_t>(l.slots + 2, 0));
  auto run_branch = [&](int b) {
    std::vector<int> partner(l.slots, -1);
    partner[0] = b + 1;
    partner[b + 1] = 0;
    std::vector<int> scratch;
    std::vector<char> seen;
    std::uint64_t count = 0;
    matrix_pairings_rec(
        partner, 1,
        [&](const std::vector<int>& p) { ++hist[b][index_loops(l, p, scratch, seen)]; }, count);
  };
  threads = std::max(1, threads);
  if (threads == 1) {
    for (int b = 0; b < branches; ++b) run_branch(b);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (int b = next++; b < branches; b = next++) run_branch(b);
      });
    for (auto& th : pool) th.join();
  }
  LaurentN out;
  for (int b = 0; b < branches; ++b)
    for (int loops = 0; loops < static_cast<int>(hist[b].size()); ++loops)
      if (hist[b][loops] != 0)
        out.add(loops - pairs + l.zero_traces, mpz_class(static_cast<unsigned long>(hist[b][loops])));
  return out;
}

namespace {

std::mutex g_memo_mutex;
std::map<TraceWord, LaurentN> g_memo;
std::atomic<int> g_pairing_limit{12};

TraceWord canonical_word(const TraceWord& w) {
  TraceWord c;
  int zeros = 0;
  for (int p : w) {
    if (p < 0) throw std::invalid_argument("trace exponent must be nonnegative");
    if (p == 0) {
      ++zeros;
    } else {
      c.push_back(p);
    }
  }
  std::sort(c.rbegin(), c.rend());
  c.insert(c.end(), zeros, 0);
  return c;
}

bool memo_lookup(const TraceWord& key, LaurentN& out) {
  std::lock_guard<std::mutex> lock(g_memo_mutex);
  auto it = g_memo.find(key);
  if (it == g_memo.end()) return false;
  out = it->second;
  return true;
}

void memo_store(const TraceWord& key, const LaurentN& v) {
  std::lock_guard<std::mutex> lock(g_memo_mutex);
  g_memo.emplace(key, v);
}

std::map<TraceWord, LaurentN> g_rec_memo;
std::mutex g_rec_mutex;

LaurentN recursive_impl(const TraceWord& word) {
  // word: canonical, positive entries only.
  if (word.empty()) return LaurentN::monomial(0);
  int total = 0;
  for (int p : word) total += p;
  if (total % 2 != 0) return {};
  {
    std::lock_guard<std::mutex> lock(g_rec_mutex);
    auto it = g_rec_memo.find(word);
    if (it != g_rec_memo.end()) return it->second;
  }
  const int k1 = word.front();
  const TraceWord rest(word.begin() + 1, word.end());
  LaurentN acc;
  auto sub = [](TraceWord w) {
    int zeros = 0;
    TraceWord pos;
    for (int p : w) (p == 0 ? ++zeros : (pos.push_back(p), 0));
    std::sort(pos.rbegin(), pos.rend());
    return std::make_pair(pos, zeros);
  };
  // The first matrix of Tr M^{k1} pairs with another matrix in the same trace.
  for (int j = 0; j <= k1 - 2; ++j) {
    TraceWord w = rest;
    w.push_back(j);
    w.push_back(k1 - 2 - j);
    auto [pos, zeros] = sub(w);
    acc += recursive_impl(pos).shifted(zeros);
  }
  // ... or with one of the k_i matrices of another trace.
  for (std::size_t i = 0; i < rest.size(); ++i) {
    TraceWord w;
    for (std::size_t j = 0; j < rest.size(); ++j)
      if (j != i) w.push_back(rest[j]);
    w.push_back(k1 + rest[i] - 2);
    auto [pos, zeros] = sub(w);
    acc += recursive_impl(pos).shifted(zeros).scaled(rest[i]);
  }
  LaurentN out = acc.shifted(-1);
  std::lock_guard<std::mutex> lock(g_rec_mutex);
  g_rec_memo.emplace(word, out);
  return out;
}

}  // namespace

LaurentN hermitian_moment_recursive(const TraceWord& w) {
  TraceWord c = canonical_word(w);
  int zeros = 0;
  while (!c.empty() && c.back() == 0) {
    c.pop_back();
    ++zeros;
  }
  return recursive_impl(c).shifted(zeros);
}

void set_pairing_slot_limit(int slots) { g_pairing_limit = slots; }
int pairing_slot_limit() { return g_pairing_limit; }

LaurentN hermitian_moment_laurent(const TraceWord& w) {
  const TraceWord key = canonical_word(w);
  LaurentN out;
  if (memo_lookup(key, out)) return out;
  int slots = 0;
  for (int p : key) slots += p;
  out = slots <= g_pairing_limit ? hermitian_moment_pairings(key, slots) : hermitian_moment_recursive(key);
  memo_store(key, out);
  return out;
}

Series hermitian_moment(const TraceWord& w, TruncSpec trunc) { return hermitian_moment_laurent(w).to_series(trunc); }

namespace {

mpz_class double_factorial(int n) {
  mpz_class r = 1;
  for (int i = n; i > 1; i -= 2) r *= i;
  return r;
}

mpz_class factorial(int n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

mpq_class n_power(int n, int e) {
  mpz_class p;
  mpz_pow_ui(p.get_mpz_t(), mpz_class(n).get_mpz_t(), static_cast<unsigned long>(std::abs(e)));
  return e >= 0 ? mpq_class(p) : mpq_class(1, p);
}

}  // namespace

mpq_class hermitian_oracle(const TraceWord& w, int n, std::uint64_t budget) {
  if (n <= 0) throw std::invalid_argument("oracle size must be positive");
  int slots = 0;
  int zeros = 0;
  for (int p : w) {
    if (p < 0) throw std::invalid_argument("trace exponent must be nonnegative");
    slots += p;
    zeros += p == 0;
  }
  mpz_class cost;
  mpz_pow_ui(cost.get_mpz_t(), mpz_class(n).get_mpz_t(), static_cast<unsigned long>(slots));
  if (cost > mpz_class(static_cast<unsigned long>(budget)))
    throw BudgetExceeded("explicit index sum of " + cost.get_str() + " assignments exceeds budget");

  // Entry M_{a b} with a = idx[s], b = idx[next(s)].
  std::vector<int> next;
  for (int p : w) {
    if (p == 0) continue;
    const int base = static_cast<int>(next.size());
    for (int i = 0; i < p; ++i) next.push_back(base + (i + 1) % p);
  }
  std::vector<int> idx(slots, 0);
  mpq_class total = 0;
  std::vector<int> diag(n), upper(n * n), lower(n * n);
  while (true) {
    std::fill(diag.begin(), diag.end(), 0);
    std::fill(upper.begin(), upper.end(), 0);
    std::fill(lower.begin(), lower.end(), 0);
    for (int s = 0; s < slots; ++s) {
      const int a = idx[s];
      const int b = idx[next[s]];
      if (a == b) {
        ++diag[a];
      } else if (a < b) {
        ++upper[a * n + b];
      } else {
        ++lower[b * n + a];
      }
    }
    // <x^k> = (k-1)!! / N^{k/2} for the real diagonal, <w^a wbar^b> = delta_ab a!/N^a.
    mpq_class term = 1;
    int n_exp = 0;
    for (int a = 0; a < n && term != 0; ++a) {
      if (diag[a] % 2 != 0) {
        term = 0;
        break;
      }
      term *= double_factorial(diag[a] - 1);
      n_exp -= diag[a] / 2;
    }
    for (int e = 0; e < n * n && term != 0; ++e) {
      if (upper[e] != lower[e]) {
        term = 0;
        break;
      }
      term *= factorial(upper[e]);
      n_exp -= upper[e];
    }
    if (term != 0) total += term * n_power(n, n_exp);
    int pos = 0;
    while (pos < slots && ++idx[pos] == n) idx[pos++] = 0;
    if (pos == slots) break;
  }
  return total * n_power(n, zeros);
}

// ---------------------------------------------------------------------------
// Tensors

void TensorContraction::validate() const {
  if (D < 1) throw std::invalid_argument("tensor rank must be positive");
  if (whites != blacks) return;
  if (static_cast<int>(black_of_white.size()) != D)
    throw std::invalid_argument("contraction needs one matching per color");
  for (const auto& beta : black_of_white) {
    if (static_cast<int>(beta.size()) != whites) throw std::invalid_argument("matching has wrong size");
    std::vector<char> hit(whites, 0);
    for (int b : beta) {
      if (b < 0 || b >= whites || hit[b]) throw std::invalid_argument("color matching is not a bijection");
      hit[b] = 1;
    }
  }
}

TensorContraction TensorContraction::operator*(const TensorContraction& o) const {
  if (D != o.D) throw std::invalid_argument("product of contractions with different ranks");
  TensorContraction out;
  out.D = D;
  out.whites = whites + o.whites;
  out.blacks = blacks + o.blacks;
  out.black_of_white.resize(D);
  for (int c = 0; c < D; ++c) {
    auto& beta = out.black_of_white[c];
    if (c < static_cast<int>(black_of_white.size())) beta = black_of_white[c];
    if (c < static_cast<int>(o.black_of_white.size()))
      for (int b : o.black_of_white[c]) beta.push_back(b + blacks);
  }
  return out;
}

int TensorContraction::loops(const std::vector<int>& pi) const {
  // Index loop of color c: T_w -> Tbar_{beta_c(w)} -> T_{pi^{-1}(beta_c(w))}.
  std::vector<int> pi_inv(whites);
  for (int w = 0; w < whites; ++w) pi_inv[pi[w]] = w;
  std::vector<int> perm(whites);
  std::vector<char> seen;
  int total = 0;
  for (const auto& beta : black_of_white) {
    for (int w = 0; w < whites; ++w) perm[w] = pi_inv[beta[w]];
    total += count_cycles(perm, seen);
  }
  return total;
}

TensorContraction tensor_dipole(int D) {
  TensorContraction c;
  c.D = D;
  c.whites = c.blacks = 1;
  c.black_of_white.assign(D, std::vector<int>{0});
  return c;
}

TensorContraction quartic_melonic(int D, int color) {
  if (color < 1 || color > D) throw std::invalid_argument("color out of range");
  TensorContraction c;
  c.D = D;
  c.whites = c.blacks = 2;
  c.black_of_white.assign(D, std::vector<int>{0, 1});
  c.black_of_white[color - 1] = {1, 0};
  return c;
}

LaurentN tensor_moment_laurent(const TensorContraction& c, int threads) {
  c.validate();
  if (c.whites != c.blacks) return {};
  const int k = c.whites;
  if (k > 10) throw BudgetExceeded("tensor Wick sum over " + std::to_string(k) + "! matchings exceeds budget");
  const int base = -k * (c.D - 1);
  std::vector<std::uint64_t> hist(static_cast<std::size_t>(c.D * k + 1), 0);
  if (threads <= 1 || k < 4) {
    for_each_tensor_matching(k, [&](const std::vector<int>& pi) { ++hist[c.loops(pi)]; });
  } else {
    // Partition by pi[0].
    std::vector<std::vector<std::uint64_t>> part(k, hist);
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (int first = next++; first < k; first = next++) {
          std::vector<int> rest;
          for (int b = 0; b < k; ++b)
            if (b != first) rest.push_back(b);
          std::vector<int> pi(k);
          pi[0] = first;
          do {
            std::copy(rest.begin(), rest.end(), pi.begin() + 1);
            ++part[first][c.loops(pi)];
          } while (std::next_permutation(rest.begin(), rest.end()));
        }
      });
    for (auto& th : pool) th.join();
    for (const auto& h : part)
      for (std::size_t i = 0; i < h.size(); ++i) hist[i] += h[i];
  }
  LaurentN out;
  for (std::size_t loops = 0; loops < hist.size(); ++loops)
    if (hist[loops] != 0) out.add(static_cast<int>(loops) + base, mpz_class(static_cast<unsigned long>(hist[loops])));
  return out;
}

Series tensor_moment(const TensorContraction& c, TruncSpec trunc) { return tensor_moment_laurent(c).to_series(trunc); }

mpq_class tensor_oracle(const TensorContraction& c, int n, std::uint64_t budget) {
  c.validate();
  if (n <= 0) throw std::invalid_argument("oracle size must be positive");
  if (c.whites != c.blacks) return 0;
  const int k = c.whites;
  const int D = c.D;
  mpz_class cost;
  mpz_pow_ui(cost.get_mpz_t(), mpz_class(n).get_mpz_t(), static_cast<unsigned long>(k * D));
  if (cost > mpz_class(static_cast<unsigned long>(budget)))
    throw BudgetExceeded("explicit tensor index sum of " + cost.get_str() + " assignments exceeds budget");
  // idx[w*D + c] is the color-(c+1) index of T_w; Tbar indices follow from the contraction.
  std::vector<int> idx(k * D, 0);
  std::vector<int> bar(k * D, 0);
  mpq_class total = 0;
  std::map<std::vector<int>, std::pair<int, int>> counts;
  while (true) {
    for (int cc = 0; cc < D; ++cc)
      for (int w = 0; w < k; ++w) bar[c.black_of_white[cc][w] * D + cc] = idx[w * D + cc];
    counts.clear();
    for (int w = 0; w < k; ++w) ++counts[std::vector<int>(idx.begin() + w * D, idx.begin() + (w + 1) * D)].first;
    for (int b = 0; b < k; ++b) ++counts[std::vector<int>(bar.begin() + b * D, bar.begin() + (b + 1) * D)].second;
    // Independent components: <T^a Tbar^b> = delta_ab a! N^{a(1-D)}.
    mpz_class term = 1;
    for (const auto& [tuple, ab] : counts) {
      if (ab.first != ab.second) {
        term = 0;
        break;
      }
      term *= factorial(ab.first);
    }
    total += term;
    int pos = 0;
    while (pos < k * D && ++idx[pos] == n) idx[pos++] = 0;
    if (pos == k * D) break;
  }
  return total * n_power(n, k * (1 - D));
}

}  // namespace melonic
