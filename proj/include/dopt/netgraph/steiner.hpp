#pragma once

#include <iosfwd>
#include <vector>

#include "dopt/netgraph/graph.hpp"
#include "dopt/netgraph/layout.hpp"

namespace dopt::netgraph {

struct SteinerTree {
  std::vector<int> nodes;   // T, ascending
  std::vector<Edge> edges;  // F, ascending
};

// Metric-closure MST 2-approximation. costs is indexed like g.edges(); empty means unit costs.
// Ties are broken by lowest node index.
SteinerTree steiner_tree(const Graph& g, const std::vector<int>& required,
                         const std::vector<double>& costs = {});

double tree_cost(const Graph& g, const std::vector<Edge>& edges, const std::vector<double>& costs = {});
bool is_tree(const std::vector<int>& nodes, const std::vector<Edge>& edges);

struct ComponentPlan {
  bool augmented = false;
  std::vector<int> nodes;          // V_l' (equals V_l when not augmented)
  std::vector<Edge> edges;         // E_l' = E_l plus tree edges
  std::vector<Edge> tree_edges;    // F_l
  std::vector<int> steiner_nodes;  // T_l minus V_l
};

struct SteinerPlan {
  std::vector<ComponentPlan> components;
  std::vector<std::vector<int>> relays;  // S_p', ascending
  bool is_identity() const;
  int relay_node_count() const;
  int augmented_count() const;
};

SteinerPlan identity_plan(const VariableLayout& layout);
SteinerPlan augment_layout(const Graph& g, const VariableLayout& layout);
// Throws ContractError if plan does not fit layout (sizes, V_l in V_l', connected, edges in E).
void validate_plan(const Graph& g, const VariableLayout& layout, const SteinerPlan& plan);

// One line per augmented component: "l : relay nodes ; i-j edges", 1-based.
void write_steiner_plan(const SteinerPlan& plan, std::ostream& os);
SteinerPlan read_steiner_plan(const Graph& g, const VariableLayout& layout, std::istream& is);

}  // namespace dopt::netgraph
