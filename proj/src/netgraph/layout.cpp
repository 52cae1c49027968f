#include "dopt/netgraph/layout.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <queue>

#include "dopt/errors.hpp"

namespace dopt::netgraph {

VariableLayout::VariableLayout(const Graph& g, int n, std::vector<std::vector<int>> S) {
  if (n < 1) throw ArgumentError("layout needs n >= 1");
  if (static_cast<int>(S.size()) != g.node_count())
    throw ArgumentError("layout needs one dependency set per node");
  std::vector<char> covered(n, 0);
  for (auto& s : S) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (int l : s) {
      if (l < 0 || l >= n) throw ArgumentError("component index out of range");
      covered[l] = 1;
    }
  }
  for (int l = 0; l < n; ++l)
    if (!covered[l])
      throw ArgumentError("component " + std::to_string(l + 1) + " is used by no node");
  n_ = n;
  S_ = std::move(S);
  comp_.resize(n);
  for (int p = 0; p < g.node_count(); ++p)
    for (int l : S_[p]) comp_[l].nodes.push_back(p);
  for (const auto& e : g.edges()) {
    const auto& a = S_[e.first];
    const auto& b = S_[e.second];
    std::vector<int> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    for (int l : common) comp_[l].edges.push_back(e);
  }
}

VariableLayout VariableLayout::global(const Graph& g, int n) {
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  return VariableLayout(g, n, std::vector<std::vector<int>>(g.node_count(), all));
}

int VariableLayout::position(int p, int l) const {
  const auto& s = S_.at(p);
  auto it = std::lower_bound(s.begin(), s.end(), l);
  return (it != s.end() && *it == l) ? static_cast<int>(it - s.begin()) : -1;
}

int VariableLayout::degree(int p, int l) const {
  if (position(p, l) < 0) return 0;
  int d = 0;
  for (const auto& e : comp_.at(l).edges)
    if (e.first == p || e.second == p) ++d;
  return d;
}

InducedSubgraph induced_subgraph(const Graph& g, const std::vector<std::vector<int>>& S, int l) {
  if (l < 0) throw ArgumentError("component index out of range");
  InducedSubgraph out;
  std::vector<char> in(g.node_count(), 0);
  bool any_range = false;
  for (int p = 0; p < static_cast<int>(S.size()); ++p)
    for (int x : S[p]) {
      if (x >= l) any_range = true;
      if (x == l) in[p] = 1;
    }
  if (!any_range) throw ArgumentError("component index out of range");
  for (int p = 0; p < g.node_count(); ++p)
    if (in[p]) out.nodes.push_back(p);
  for (const auto& e : g.edges())
    if (in[e.first] && in[e.second]) out.edges.push_back(e);
  return out;
}

bool is_connected_subgraph(const InducedSubgraph& s) {
  if (s.nodes.empty()) return false;
  auto idx = [&](int p) {
    return static_cast<int>(std::lower_bound(s.nodes.begin(), s.nodes.end(), p) - s.nodes.begin());
  };
  int k = static_cast<int>(s.nodes.size());
  std::vector<std::vector<int>> adj(k);
  for (const auto& e : s.edges) {
    adj[idx(e.first)].push_back(idx(e.second));
    adj[idx(e.second)].push_back(idx(e.first));
  }
  std::vector<char> seen(k, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        q.push(v);
      }
  }
  return count == k;
}

std::string class_name(VariableClass c) {
  switch (c) {
    case VariableClass::Global: return "global";
    case VariableClass::StarShaped: return "star-shaped";
    case VariableClass::Connected: return "connected";
    case VariableClass::MixedConnected: return "mixed-connected";
    case VariableClass::NonConnected: return "non-connected";
  }
  return "?";
}

Classification classify_variable(const Graph& g, const VariableLayout& layout) {
  Classification c;
  int P = g.node_count();
  for (int l = 0; l < layout.n(); ++l) {
    const auto& s = layout.component(l);
    ComponentReport r;
    r.nodes = static_cast<int>(s.nodes.size());
    r.edges = static_cast<int>(s.edges.size());
    r.connected = is_connected_subgraph(s);
    r.global = r.nodes == P;
    std::vector<int> deg(P, 0);
    for (const auto& e : s.edges) {
      ++deg[e.first];
      ++deg[e.second];
    }
    r.star = std::any_of(s.nodes.begin(), s.nodes.end(),
                         [&](int p) { return deg[p] == r.nodes - 1; });
    c.connected = c.connected && r.connected;
    c.global = c.global && r.global;
    c.star = c.star && r.star;
    c.components.push_back(r);
  }
  int in_all = 0;
  for (const auto& r : c.components)
    if (r.global) ++in_all;
  c.mixed = in_all > 0 && in_all < layout.n();
  if (!c.connected)
    c.verdict = VariableClass::NonConnected;
  else if (c.global)
    c.verdict = VariableClass::Global;
  else if (c.mixed)
    c.verdict = VariableClass::MixedConnected;
  else if (c.star)
    c.verdict = VariableClass::StarShaped;
  else
    c.verdict = VariableClass::Connected;
  return c;
}

void write_classification(const Classification& c, std::ostream& os) {
  int nc = 0, st = 0, gl = 0;
  for (const auto& r : c.components) {
    nc += r.connected ? 0 : 1;
    st += r.star ? 1 : 0;
    gl += r.global ? 1 : 0;
  }
  os << "verdict: " << class_name(c.verdict) << '\n'
     << "components: " << c.components.size() << '\n'
     << "non-connected components: " << nc << '\n'
     << "star components: " << st << '\n'
     << "global components: " << gl << '\n'
     << "mixed: " << (c.mixed ? "yes" : "no") << '\n';
  for (std::size_t l = 0; l < c.components.size(); ++l) {
    const auto& r = c.components[l];
    os << "x" << l + 1 << ": nodes=" << r.nodes << " edges=" << r.edges
       << (r.connected ? " connected" : " non-connected") << (r.star ? " star" : "")
       << (r.global ? " global" : "") << '\n';
  }
}

}  // namespace dopt::netgraph
