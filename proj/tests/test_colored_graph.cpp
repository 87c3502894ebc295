#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "melonic/colored_graph.hpp"

using namespace melonic;

namespace {

ColoredGraph dipole(int D) { return ColoredGraph::from_contraction(tensor_dipole(D)); }

// W0-B0 color 1, W0-B1 colors 2,3, W1-B1 color 1, W1-B0 colors 2,3.
ColoredGraph quartic_example() {
  ColoredGraph g;
  g.D = 3;
  g.white = g.black = 2;
  g.edges = {{0, 0, 1}, {0, 1, 2}, {0, 1, 3}, {1, 1, 1}, {1, 0, 2}, {1, 0, 3}};
  return g;
}

// K_{3,3} with color c joining W_i to B_{(i+c) mod 3}.
ColoredGraph k33() {
  ColoredGraph g;
  g.D = 3;
  g.white = g.black = 3;
  for (int c = 1; c <= 3; ++c)
    for (int i = 0; i < 3; ++i) g.edges.push_back({i, (i + c) % 3, c});
  return g;
}

ColoredGraph relabel(const ColoredGraph& g, const std::vector<int>& wperm, const std::vector<int>& bperm,
                     const std::vector<int>& cperm) {
  ColoredGraph r = g;
  for (auto& e : r.edges) {
    e.w = wperm[e.w];
    e.b = bperm[e.b];
    e.c = cperm[e.c - 1];
  }
  return r;
}

}  // namespace

TEST(ColoredGraph, Validate) {
  EXPECT_TRUE(validate(dipole(3)).ok);
  ColoredGraph bad = dipole(3);
  bad.edges[1].c = 1;
  auto r = validate(bad);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.edge_index, 1);
  ColoredGraph empty;
  EXPECT_TRUE(validate(empty).ok);
  ColoredGraph missing = dipole(3);
  missing.edges.pop_back();
  EXPECT_FALSE(validate(missing).ok);
}

TEST(ColoredGraph, JacketCounts) {
  EXPECT_EQ(jacket_cycles(2).size(), 1U);
  EXPECT_EQ(jacket_cycles(3).size(), 1U);
  EXPECT_EQ(jacket_cycles(4).size(), 3U);
  EXPECT_EQ(jacket_cycles(5).size(), 12U);
  EXPECT_EQ(jacket_cycles(6).size(), 60U);
  // Cycles are pairwise distinct up to rotation and reversal.
  for (const auto& c : jacket_cycles(5)) {
    std::vector<int> rev = {1};
    rev.insert(rev.end(), c.rbegin(), c.rend() - 1);
    const auto all = jacket_cycles(5);
    EXPECT_EQ(std::count(all.begin(), all.end(), rev), 0);
  }
}

TEST(ColoredGraph, DipoleGenera) {
  for (int D : {3, 4}) {
    for (const auto& j : jackets(dipole(D))) {
      EXPECT_EQ(j.vertices, 2);
      EXPECT_EQ(j.edges, D);
      EXPECT_EQ(j.faces, D);
      EXPECT_EQ(genus(j), 0);
    }
    EXPECT_EQ(degree(dipole(D)).value, 0);
  }
}

TEST(ColoredGraph, QuarticMelonicDegreeZero) {
  const auto g = quartic_example();
  ASSERT_TRUE(validate(g).ok);
  EXPECT_EQ(genus(jackets(g).front()), 0);
  EXPECT_EQ(degree(g).value, 0);
  EXPECT_EQ(degree(ColoredGraph::from_contraction(quartic_melonic(4, 2))).value, 0);
}

TEST(ColoredGraph, NonMelonicExample) {
  const auto g = k33();
  ASSERT_TRUE(validate(g).ok);
  const auto j = jackets(g).front();
  EXPECT_EQ(j.faces, 3);
  EXPECT_EQ(genus(j), 1);
  EXPECT_EQ(degree(g).value, 1);
}

TEST(ColoredGraph, FaceCountsAgree) {
  for (int D : {2, 3, 4})
    for (int p : {1, 2, 3}) {
      if (D == 4 && p == 3) continue;
      for (const auto& g : enumerate_patterns(D, p)) {
        ASSERT_TRUE(validate(g).ok);
        for (const auto& cyc : jacket_cycles(D)) EXPECT_EQ(jacket_faces_rotation(g, cyc), jacket_faces_bicolored(g, cyc));
      }
    }
}

TEST(ColoredGraph, EulerParityAndBound) {
  for (const auto& g : enumerate_patterns(3, 3))
    for (const auto& comp : components(g))
      for (const auto& j : jackets(comp)) {
        const int chi = j.vertices - j.edges + j.faces;
        EXPECT_LE(chi, 2);
        EXPECT_EQ(chi % 2, 0);
      }
}

TEST(ColoredGraph, DegreeRelabelingInvariance) {
  const auto g = k33();
  const int ref = degree(g).value;
  std::vector<int> perm = {0, 1, 2};
  std::vector<int> cp = {1, 2, 3};
  do {
    EXPECT_EQ(degree(relabel(g, perm, {2, 0, 1}, cp)).value, ref);
    EXPECT_EQ(degree(relabel(g, {1, 2, 0}, perm, cp)).value, ref);
  } while (std::next_permutation(perm.begin(), perm.end()) && std::next_permutation(cp.begin(), cp.end()));
  for (const auto& p : enumerate_patterns(4, 2)) {
    const int d = degree(p).value;
    EXPECT_EQ(degree(relabel(p, {1, 0}, {0, 1}, {4, 3, 1, 2})).value, d);
  }
}

TEST(ColoredGraph, EnumerationCounts) {
  EXPECT_EQ(enumerate_patterns(3, 1).size(), 1U);
  EXPECT_EQ(enumerate_patterns(2, 1).size(), 1U);
  EXPECT_EQ(enumerate_patterns(3, 2).size(), 8U);
  EXPECT_EQ(enumerate_patterns(3, 3).size(), 216U);
  EXPECT_THROW(enumerate_patterns(5, 6, 1000), BudgetExceeded);
}

TEST(ColoredGraph, ConnectedD3QuarticPatternsAreMelonic) {
  int connected = 0;
  for (const auto& g : enumerate_patterns(3, 2)) {
    if (components(g).size() != 1) continue;
    ++connected;
    EXPECT_EQ(degree(g).value, 0);
  }
  EXPECT_EQ(connected, 6);
}

TEST(ColoredGraph, DisconnectedSummedWithNotice) {
  ColoredGraph g = ColoredGraph::from_contraction(tensor_dipole(3) * quartic_melonic(3, 1));
  const auto d = degree(g);
  EXPECT_EQ(d.components, 2);
  EXPECT_EQ(d.value, 0);
  EXPECT_FALSE(d.notices.empty());
  ColoredGraph two = ColoredGraph::from_contraction(ColoredGraph(k33()).to_contraction() * k33().to_contraction());
  EXPECT_EQ(degree(two).value, 2);
}

TEST(ColoredGraph, IdentityMatchingLoopsMatchWick) {
  for (int p : {1, 2})
    for (const auto& g : enumerate_patterns(3, p)) {
      const auto c = g.to_contraction();
      std::vector<int> id(p);
      std::iota(id.begin(), id.end(), 0);
      EXPECT_EQ(identity_matching_loops(g), c.loops(id));
    }
}

TEST(ColoredGraph, PatternClasses) {
  const auto classes = pattern_classes(3, 2);
  std::uint64_t total = 0;
  for (const auto& pc : classes) total += pc.multiplicity;
  EXPECT_EQ(total, 8U);
  // Two disconnected dipoles, and one quartic melonic class per distinguished color.
  EXPECT_EQ(classes.size(), 4U);
  EXPECT_EQ(canonical_form(relabel(k33(), {2, 0, 1}, {1, 2, 0}, {1, 2, 3})), canonical_form(k33()));
}

TEST(ColoredGraph, JsonRoundTrip) {
  const auto g = quartic_example();
  EXPECT_EQ(ColoredGraph::from_json(g.to_json()), g);
  EXPECT_EQ(ColoredGraph::from_json(R"({"D":3,"white":1,"black":1,"edges":[{"w":0,"b":0,"c":1},{"w":0,"b":0,"c":2},{"w":0,"b":0,"c":3}]})"),
            dipole(3));
  EXPECT_THROW(ColoredGraph::from_json("{\"D\":3}"), ParseError);
  EXPECT_THROW(ColoredGraph::from_json(R"({"D":3,"white":1,"black":1,"edges":[{"w":0}]})"), ParseError);
}
