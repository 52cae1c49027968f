#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dopt/netgraph/graph.hpp"

namespace dopt::netgraph {

struct InducedSubgraph {
  std::vector<int> nodes;   // V_l ascending
  std::vector<Edge> edges;  // E_l in edge-list order
};

// Dependency sets S_p plus the derived per-component structure.
class VariableLayout {
 public:
  VariableLayout() = default;
  // Each S_p is sorted and deduplicated; the union must cover 0..n-1.
  VariableLayout(const Graph& g, int n, std::vector<std::vector<int>> S);
  // Every node depends on all n components.
  static VariableLayout global(const Graph& g, int n);

  int n() const { return n_; }
  int node_count() const { return static_cast<int>(S_.size()); }
  const std::vector<int>& S(int p) const { return S_.at(p); }
  const std::vector<std::vector<int>>& sets() const { return S_; }
  const InducedSubgraph& component(int l) const { return comp_.at(l); }
  // D_{p,l}: degree of p inside G_l; 0 if l is not in S_p.
  int degree(int p, int l) const;
  // Position of l inside S_p, or -1.
  int position(int p, int l) const;

 private:
  int n_ = 0;
  std::vector<std::vector<int>> S_;
  std::vector<InducedSubgraph> comp_;
};

InducedSubgraph induced_subgraph(const Graph& g, const std::vector<std::vector<int>>& S, int l);

enum class VariableClass { Global, StarShaped, Connected, MixedConnected, NonConnected };
std::string class_name(VariableClass c);

struct ComponentReport {
  int nodes = 0;
  int edges = 0;
  bool connected = false;
  bool global = false;
  bool star = false;
};

struct Classification {
  VariableClass verdict = VariableClass::Global;
  bool connected = true;
  bool global = true;
  bool star = true;
  bool mixed = false;
  std::vector<ComponentReport> components;
};

Classification classify_variable(const Graph& g, const VariableLayout& layout);
bool is_connected_subgraph(const InducedSubgraph& s);

// Human-readable multi-line report (1-based indices).
void write_classification(const Classification& c, std::ostream& os);

}  // namespace dopt::netgraph
