#pragma once

// Bipartite D-regular properly edge-colored graphs, jackets and degree.

#include <cstdint>
#include <string>
#include <vector>

#include "melonic/wick.hpp"

namespace melonic {

struct ColoredEdge {
  int w = 0;
  int b = 0;
  int c = 1;
  friend bool operator==(const ColoredEdge&, const ColoredEdge&) = default;
};

struct ColoredGraph {
  int D = 3;
  int white = 0;
  int black = 0;
  std::vector<ColoredEdge> edges;

  static ColoredGraph from_json(const std::string& text);
  std::string to_json() const;
  static ColoredGraph from_contraction(const TensorContraction& c);
  /// Requires a valid graph.
  TensorContraction to_contraction() const;
  friend bool operator==(const ColoredGraph&, const ColoredGraph&) = default;
};

struct ValidationReport {
  bool ok = true;
  int edge_index = -1;  // offending edge, -1 when not edge specific
  std::string message;
};

ValidationReport validate(const ColoredGraph& g);

struct Jacket {
  std::vector<int> cycle;  // cyclic color order, starting at color 1
  int vertices = 0;
  int edges = 0;
  int faces = 0;
  bool connected = true;
};

/// Cyclic color orders up to reversal: (D-1)!/2 for D >= 3, one for D <= 2.
std::vector<std::vector<int>> jacket_cycles(int D);
std::vector<Jacket> jackets(const ColoredGraph& g);

/// Faces of the jacket counted as orbits of the rotation system (colors
/// advance along the cycle at white vertices and retreat at black ones).
int jacket_faces_rotation(const ColoredGraph& g, const std::vector<int>& cycle);
/// Faces counted as bicolored cycles for consecutive color pairs.
int jacket_faces_bicolored(const ColoredGraph& g, const std::vector<int>& cycle);

/// Genus from V - E + F = 2 - 2g; throws std::logic_error if inconsistent.
int genus(const Jacket& j);

struct Degree {
  int value = 0;
  int jackets = 0;     // jackets per component
  int components = 0;
  std::vector<std::string> notices;
};

/// Sum of jacket genera; disconnected graphs are summed per component.
Degree degree(const ColoredGraph& g);

/// Connected components as separate graphs (vertices renumbered in order).
std::vector<ColoredGraph> components(const ColoredGraph& g);

/// Index loops of the identity Wick matching (T_w with Tbar_w), counted
/// on the graph by walking color-c edges and propagator edges alternately.
int identity_matching_loops(const ColoredGraph& g);

/// All labelled patterns with p white and p black vertices: (p!)^D graphs.
std::vector<ColoredGraph> enumerate_patterns(int D, int p, std::uint64_t budget = 2'000'000);

/// Color-preserving canonical form by exhaustive white/black relabeling.
ColoredGraph canonical_form(const ColoredGraph& g, std::uint64_t budget = 10'000'000);

struct PatternClass {
  ColoredGraph representative;
  std::uint64_t multiplicity = 0;
};
/// Isomorphism classes of enumerate_patterns(D, p) with labelled counts.
std::vector<PatternClass> pattern_classes(int D, int p);

}  // namespace melonic
