#include "dopt/netgraph/coloring.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "dopt/errors.hpp"

namespace dopt::netgraph {

Coloring color_graph(const Graph& g) {
  int P = g.node_count();
  std::vector<int> order(P);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return g.degree(a) > g.degree(b); });
  std::vector<int> color(P, 0);
  std::vector<char> used;
  for (int p : order) {
    used.assign(g.degree(p) + 2, 0);
    for (int j : g.neighbors(p))
      if (color[j] > 0 && color[j] < static_cast<int>(used.size())) used[color[j]] = 1;
    int c = 1;
    while (used[c]) ++c;
    color[p] = c;
  }
  return make_coloring(g, std::move(color));
}

Coloring make_coloring(const Graph& g, std::vector<int> color_of) {
  if (static_cast<int>(color_of.size()) != g.node_count())
    throw ArgumentError("coloring size differs from node count");
  Coloring c;
  int C = 0;
  for (int x : color_of) {
    if (x < 1) throw ArgumentError("colors must be >= 1");
    C = std::max(C, x);
  }
  c.classes.assign(C, {});
  for (int p = 0; p < g.node_count(); ++p) c.classes[color_of[p] - 1].push_back(p);
  for (const auto& cl : c.classes)
    if (cl.empty()) throw ArgumentError("color classes must be nonempty");
  c.color_of = std::move(color_of);
  if (!is_proper(g, c)) throw ArgumentError("coloring is not proper");
  return c;
}

bool is_proper(const Graph& g, const Coloring& c) {
  return std::all_of(g.edges().begin(), g.edges().end(),
                     [&](const Edge& e) { return c.color_of[e.first] != c.color_of[e.second]; });
}

void write_coloring(const Coloring& c, std::ostream& os) {
  for (std::size_t p = 0; p < c.color_of.size(); ++p) os << p + 1 << ' ' << c.color_of[p] << '\n';
}

Coloring read_coloring(const Graph& g, std::istream& is) {
  std::vector<int> color(g.node_count(), 0);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    int p = 0, col = 0;
    if (!(ss >> p)) continue;
    if (!(ss >> col)) throw ParseError("expected 'node color'", lineno);
    if (p < 1 || p > g.node_count()) throw ParseError("node index out of range", lineno);
    if (col < 1) throw ParseError("color must be >= 1", lineno);
    color[p - 1] = col;
  }
  for (int p = 0; p < g.node_count(); ++p)
    if (color[p] == 0) throw ParseError("node " + std::to_string(p + 1) + " has no color", lineno);
  return make_coloring(g, std::move(color));
}

}  // namespace dopt::netgraph
