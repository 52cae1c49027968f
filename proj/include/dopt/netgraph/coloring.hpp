#pragma once

#include <iosfwd>
#include <vector>

#include "dopt/netgraph/graph.hpp"

namespace dopt::netgraph {

struct Coloring {
  std::vector<int> color_of;              // 1..C per node
  std::vector<std::vector<int>> classes;  // classes[c-1], ascending node order
  int count() const { return static_cast<int>(classes.size()); }
};

// Greedy: largest degree first (ties by index), lowest feasible color.
Coloring color_graph(const Graph& g);

// Builds classes from color_of and checks properness against g.
Coloring make_coloring(const Graph& g, std::vector<int> color_of);
bool is_proper(const Graph& g, const Coloring& c);

// One "node color" line per node, 1-based.
void write_coloring(const Coloring& c, std::ostream& os);
Coloring read_coloring(const Graph& g, std::istream& is);

}  // namespace dopt::netgraph
