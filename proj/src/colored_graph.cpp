#include "melonic/colored_graph.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace melonic {

using nlohmann::json;

ColoredGraph ColoredGraph::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("graph JSON: ") + e.what());
  }
  ColoredGraph g;
  try {
    g.D = j.at("D").get<int>();
    g.white = j.at("white").get<int>();
    g.black = j.at("black").get<int>();
    const auto& edges = j.at("edges");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto& e = edges[i];
      if (!e.is_object() || !e.contains("w") || !e.contains("b") || !e.contains("c"))
        throw ParseError("graph JSON: edge " + std::to_string(i) + " needs w, b and c");
      g.edges.push_back({e["w"].get<int>(), e["b"].get<int>(), e["c"].get<int>()});
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("graph JSON: ") + e.what());
  }
  return g;
}

std::string ColoredGraph::to_json() const {
  json edges = json::array();
  for (const auto& e : this->edges) edges.push_back({{"w", e.w}, {"b", e.b}, {"c", e.c}});
  json j = {{"D", D}, {"white", white}, {"black", black}, {"edges", edges}};
  return j.dump();
}

ColoredGraph ColoredGraph::from_contraction(const TensorContraction& c) {
  c.validate();
  if (c.whites != c.blacks) throw std::invalid_argument("unbalanced contraction has no graph");
  ColoredGraph g;
  g.D = c.D;
  g.white = g.black = c.whites;
  for (int w = 0; w < c.whites; ++w)
    for (int col = 1; col <= c.D; ++col) g.edges.push_back({w, c.black_of_white[col - 1][w], col});
  return g;
}

TensorContraction ColoredGraph::to_contraction() const {
  const auto report = validate(*this);
  if (!report.ok) throw std::invalid_argument("invalid colored graph: " + report.message);
  TensorContraction c;
  c.D = D;
  c.whites = white;
  c.blacks = black;
  c.black_of_white.assign(D, std::vector<int>(white, -1));
  for (const auto& e : edges) c.black_of_white[e.c - 1][e.w] = e.b;
  return c;
}

ValidationReport validate(const ColoredGraph& g) {
  auto fail = [](int edge, std::string msg) { return ValidationReport{false, edge, std::move(msg)}; };
  if (g.D < 1) return fail(-1, "D must be positive");
  if (g.white < 0 || g.black < 0) return fail(-1, "negative vertex count");
  if (g.white != g.black) return fail(-1, "white and black vertex counts differ");
  std::vector<int> w_seen(static_cast<std::size_t>(g.white) * g.D, -1);
  std::vector<int> b_seen(static_cast<std::size_t>(g.black) * g.D, -1);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    const int idx = static_cast<int>(i);
    if (e.w < 0 || e.w >= g.white) return fail(idx, "edge " + std::to_string(i) + ": white vertex out of range");
    if (e.b < 0 || e.b >= g.black) return fail(idx, "edge " + std::to_string(i) + ": black vertex out of range");
    if (e.c < 1 || e.c > g.D) return fail(idx, "edge " + std::to_string(i) + ": color out of range");
    int& ws = w_seen[static_cast<std::size_t>(e.w) * g.D + e.c - 1];
    if (ws >= 0)
      return fail(idx, "edge " + std::to_string(i) + ": white vertex " + std::to_string(e.w) + " already has color " +
                           std::to_string(e.c) + " (edge " + std::to_string(ws) + ")");
    ws = idx;
    int& bs = b_seen[static_cast<std::size_t>(e.b) * g.D + e.c - 1];
    if (bs >= 0)
      return fail(idx, "edge " + std::to_string(i) + ": black vertex " + std::to_string(e.b) + " already has color " +
                           std::to_string(e.c) + " (edge " + std::to_string(bs) + ")");
    bs = idx;
  }
  for (int v = 0; v < g.white; ++v)
    for (int c = 1; c <= g.D; ++c)
      if (w_seen[static_cast<std::size_t>(v) * g.D + c - 1] < 0)
        return fail(-1, "white vertex " + std::to_string(v) + " has no edge of color " + std::to_string(c));
  for (int v = 0; v < g.black; ++v)
    for (int c = 1; c <= g.D; ++c)
      if (b_seen[static_cast<std::size_t>(v) * g.D + c - 1] < 0)
        return fail(-1, "black vertex " + std::to_string(v) + " has no edge of color " + std::to_string(c));
  return {};
}

namespace {

void require_valid(const ColoredGraph& g) {
  const auto r = validate(g);
  if (!r.ok) throw std::invalid_argument("invalid colored graph: " + r.message);
}

// edge index by (white, color) and (black, color)
struct Incidence {
  std::vector<int> at_white;
  std::vector<int> at_black;
  int D;
  int w(int v, int c) const { return at_white[static_cast<std::size_t>(v) * D + c - 1]; }
  int b(int v, int c) const { return at_black[static_cast<std::size_t>(v) * D + c - 1]; }
};

Incidence incidence(const ColoredGraph& g) {
  Incidence inc{std::vector<int>(static_cast<std::size_t>(g.white) * g.D),
                std::vector<int>(static_cast<std::size_t>(g.black) * g.D), g.D};
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    inc.at_white[static_cast<std::size_t>(e.w) * g.D + e.c - 1] = static_cast<int>(i);
    inc.at_black[static_cast<std::size_t>(e.b) * g.D + e.c - 1] = static_cast<int>(i);
  }
  return inc;
}

bool is_connected(const ColoredGraph& g) { return components(g).size() <= 1; }

}  // namespace

std::vector<std::vector<int>> jacket_cycles(int D) {
  if (D < 1) throw std::invalid_argument("D must be positive");
  if (D <= 2) {
    std::vector<int> c(D);
    std::iota(c.begin(), c.end(), 1);
    return {c};
  }
  std::vector<int> rest(D - 1);
  std::iota(rest.begin(), rest.end(), 2);
  std::vector<std::vector<int>> out;
  do {
    if (rest.front() < rest.back()) {
      std::vector<int> c = {1};
      c.insert(c.end(), rest.begin(), rest.end());
      out.push_back(std::move(c));
    }
  } while (std::next_permutation(rest.begin(), rest.end()));
  return out;
}

int jacket_faces_rotation(const ColoredGraph& g, const std::vector<int>& cycle) {
  const int D = static_cast<int>(cycle.size());
  const Incidence inc = incidence(g);
  std::vector<int> pos(g.D + 1, 0);
  for (int q = 0; q < D; ++q) pos[cycle[q]] = q;
  // Dart 2*e is the white end of edge e, 2*e+1 the black end.
  const int darts = 2 * static_cast<int>(g.edges.size());
  auto step = [&](int d) {
    const int e = d / 2;
    const bool at_white = d % 2 == 0;
    // alpha: move to the other end of the edge
    const bool now_white = !at_white;
    const int c = g.edges[e].c;
    const int q = pos[c];
    if (now_white) {
      const int nc = cycle[(q + 1) % D];
      return 2 * inc.w(g.edges[e].w, nc);
    }
    const int nc = cycle[(q + D - 1) % D];
    return 2 * inc.b(g.edges[e].b, nc) + 1;
  };
  std::vector<char> seen(darts, 0);
  int faces = 0;
  for (int d = 0; d < darts; ++d) {
    if (seen[d]) continue;
    ++faces;
    for (int x = d; !seen[x]; x = step(x)) seen[x] = 1;
  }
  return faces;
}

int jacket_faces_bicolored(const ColoredGraph& g, const std::vector<int>& cycle) {
  const int D = static_cast<int>(cycle.size());
  const Incidence inc = incidence(g);
  int faces = 0;
  for (int q = 0; q < D; ++q) {
    const int ci = cycle[q];
    const int cj = cycle[(q + 1) % D];
    // Walk: white --ci--> black --cj--> white ...
    std::vector<char> seen(g.white, 0);
    for (int w0 = 0; w0 < g.white; ++w0) {
      if (seen[w0]) continue;
      ++faces;
      int w = w0;
      do {
        seen[w] = 1;
        const int b = g.edges[inc.w(w, ci)].b;
        w = g.edges[inc.b(b, cj)].w;
      } while (w != w0);
    }
  }
  return faces;
}

std::vector<Jacket> jackets(const ColoredGraph& g) {
  require_valid(g);
  const bool conn = is_connected(g);
  std::vector<Jacket> out;
  for (const auto& cycle : jacket_cycles(g.D)) {
    Jacket j;
    j.cycle = cycle;
    j.vertices = g.white + g.black;
    j.edges = static_cast<int>(g.edges.size());
    j.faces = jacket_faces_rotation(g, cycle);
    j.connected = conn;
    out.push_back(std::move(j));
  }
  return out;
}

int genus(const Jacket& j) {
  if (!j.connected) throw std::logic_error("genus requires a connected jacket");
  const int chi = j.vertices - j.edges + j.faces;
  if (chi > 2 || (2 - chi) % 2 != 0)
    throw std::logic_error("jacket Euler characteristic " + std::to_string(chi) + " is inconsistent");
  return (2 - chi) / 2;
}

std::vector<ColoredGraph> components(const ColoredGraph& g) {
  require_valid(g);
  const int n = g.white + g.black;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : g.edges) parent[find(e.w)] = find(g.white + e.b);
  std::vector<int> comp_of_root(n, -1);
  std::vector<ColoredGraph> out;
  std::vector<int> new_white(g.white), new_black(g.black);
  auto comp_index = [&](int v) {
    const int r = find(v);
    if (comp_of_root[r] < 0) {
      comp_of_root[r] = static_cast<int>(out.size());
      ColoredGraph c;
      c.D = g.D;
      out.push_back(c);
    }
    return comp_of_root[r];
  };
  for (int w = 0; w < g.white; ++w) {
    const int ci = comp_index(w);
    new_white[w] = out[ci].white++;
  }
  for (int b = 0; b < g.black; ++b) {
    const int ci = comp_index(g.white + b);
    new_black[b] = out[ci].black++;
  }
  for (const auto& e : g.edges) out[comp_index(e.w)].edges.push_back({new_white[e.w], new_black[e.b], e.c});
  return out;
}

Degree degree(const ColoredGraph& g) {
  Degree d;
  const auto comps = components(g);
  d.components = static_cast<int>(comps.size());
  d.jackets = static_cast<int>(jacket_cycles(g.D).size());
  if (comps.size() > 1)
    d.notices.push_back("graph has " + std::to_string(comps.size()) + " connected components; degree summed per component");
  for (const auto& c : comps)
    for (const auto& j : jackets(c)) d.value += genus(j);
  return d;
}

int identity_matching_loops(const ColoredGraph& g) {
  require_valid(g);
  const Incidence inc = incidence(g);
  int loops = 0;
  for (int c = 1; c <= g.D; ++c) {
    // white w --color c--> black b --propagator--> white b
    std::vector<char> seen(g.white, 0);
    for (int w0 = 0; w0 < g.white; ++w0) {
      if (seen[w0]) continue;
      ++loops;
      for (int w = w0; !seen[w];) {
        seen[w] = 1;
        w = g.edges[inc.w(w, c)].b;
      }
    }
  }
  return loops;
}

std::vector<ColoredGraph> enumerate_patterns(int D, int p, std::uint64_t budget) {
  if (D < 1 || p < 0) throw std::invalid_argument("enumerate_patterns: bad arguments");
  mpz_class fact;
  mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(p));
  mpz_class total;
  mpz_pow_ui(total.get_mpz_t(), fact.get_mpz_t(), static_cast<unsigned long>(D));
  if (total > mpz_class(static_cast<unsigned long>(budget)))
    throw BudgetExceeded("enumerate_patterns: " + total.get_str() + " labelled patterns exceed budget");
  std::vector<std::vector<int>> perms;
  std::vector<int> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::vector<ColoredGraph> out;
  std::vector<std::size_t> choice(D, 0);
  while (true) {
    ColoredGraph g;
    g.D = D;
    g.white = g.black = p;
    for (int w = 0; w < p; ++w)
      for (int c = 1; c <= D; ++c) g.edges.push_back({w, perms[choice[c - 1]][w], c});
    out.push_back(std::move(g));
    int pos = D - 1;
    while (pos >= 0 && ++choice[pos] == perms.size()) choice[pos--] = 0;
    if (pos < 0) break;
  }
  return out;
}

ColoredGraph canonical_form(const ColoredGraph& g, std::uint64_t budget) {
  const TensorContraction c = g.to_contraction();
  const int p = c.whites;
  mpz_class fact;
  mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(p));
  if (fact * fact > mpz_class(static_cast<unsigned long>(budget)))
    throw BudgetExceeded("canonical_form: relabeling search exceeds budget");
  // beta_c -> rho o beta_c o sigma^{-1}; keep the lexicographically least.
  std::vector<std::vector<int>> best;
  std::vector<int> sigma(p), rho(p);
  std::iota(sigma.begin(), sigma.end(), 0);
  std::vector<std::vector<int>> cur(c.D, std::vector<int>(p));
  do {
    std::iota(rho.begin(), rho.end(), 0);
    do {
      for (int col = 0; col < c.D; ++col)
        for (int w = 0; w < p; ++w) cur[col][sigma[w]] = rho[c.black_of_white[col][w]];
      if (best.empty() || cur < best) best = cur;
    } while (std::next_permutation(rho.begin(), rho.end()));
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  TensorContraction out = c;
  if (!best.empty()) out.black_of_white = best;
  return ColoredGraph::from_contraction(out);
}

std::vector<PatternClass> pattern_classes(int D, int p) {
  std::vector<PatternClass> out;
  for (const auto& g : enumerate_patterns(D, p)) {
    ColoredGraph canon = canonical_form(g);
    auto it = std::find_if(out.begin(), out.end(), [&](const PatternClass& pc) { return pc.representative == canon; });
    if (it == out.end()) {
      out.push_back({std::move(canon), 1});
    } else {
      ++it->multiplicity;
    }
  }
  return out;
}

}  // namespace melonic
