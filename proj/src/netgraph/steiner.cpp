#include "dopt/netgraph/steiner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

#include "dopt/errors.hpp"

namespace dopt::netgraph {

namespace {

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

double edge_cost(const Graph& g, const std::vector<double>& costs, int i, int j) {
  if (costs.empty()) return 1.0;
  return costs.at(g.edge_index(i, j));
}

// Dijkstra with predecessor ties resolved toward the lowest index.
void shortest_paths(const Graph& g, const std::vector<double>& costs, int src, std::vector<double>& dist,
                    std::vector<int>& pred) {
  int P = g.node_count();
  dist.assign(P, std::numeric_limits<double>::infinity());
  pred.assign(P, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  dist[src] = 0.0;
  pq.emplace(0.0, src);
  std::vector<char> done(P, 0);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (int v : g.neighbors(u)) {
      double nd = d + edge_cost(g, costs, u, v);
      if (nd < dist[v]) {
        dist[v] = nd;
        pred[v] = u;
        pq.emplace(nd, v);
      } else if (nd == dist[v] && !done[v] && u < pred[v]) {
        pred[v] = u;
      }
    }
  }
}

}  // namespace

double tree_cost(const Graph& g, const std::vector<Edge>& edges, const std::vector<double>& costs) {
  double c = 0.0;
  for (const auto& e : edges) c += edge_cost(g, costs, e.first, e.second);
  return c;
}

bool is_tree(const std::vector<int>& nodes, const std::vector<Edge>& edges) {
  if (nodes.empty()) return false;
  if (edges.size() + 1 != nodes.size()) return false;
  int maxn = *std::max_element(nodes.begin(), nodes.end());
  Dsu dsu(maxn + 1);
  std::set<int> ns(nodes.begin(), nodes.end());
  for (const auto& e : edges) {
    if (!ns.count(e.first) || !ns.count(e.second)) return false;
    if (!dsu.unite(e.first, e.second)) return false;
  }
  return true;
}

SteinerTree steiner_tree(const Graph& g, const std::vector<int>& required, const std::vector<double>& costs) {
  if (required.empty()) throw ArgumentError("steiner_tree needs a nonempty required set");
  if (!costs.empty() && static_cast<int>(costs.size()) != g.edge_count())
    throw ArgumentError("edge cost vector size differs from edge count");
  std::vector<int> R(required);
  std::sort(R.begin(), R.end());
  R.erase(std::unique(R.begin(), R.end()), R.end());
  for (int r : R)
    if (r < 0 || r >= g.node_count()) throw ArgumentError("required node outside the network");
  if (R.size() == 1) return {{R[0]}, {}};

  int k = static_cast<int>(R.size());
  std::vector<std::vector<double>> dist(k);
  std::vector<std::vector<int>> pred(k);
  for (int a = 0; a < k; ++a) shortest_paths(g, costs, R[a], dist[a], pred[a]);

  std::vector<std::tuple<double, int, int>> closure;
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      if (!std::isfinite(dist[a][R[b]])) throw ArgumentError("required nodes are not connected");
      closure.emplace_back(dist[a][R[b]], a, b);
    }
  std::sort(closure.begin(), closure.end());
  Dsu dsu(k);
  std::set<Edge> used;
  for (const auto& [d, a, b] : closure) {
    if (!dsu.unite(a, b)) continue;
    for (int v = R[b]; v != R[a]; v = pred[a][v]) {
      int u = pred[a][v];
      used.insert({std::min(u, v), std::max(u, v)});
    }
  }

  // Spanning tree of the union, then prune non-required leaves.
  std::vector<std::tuple<double, int, int>> ue;
  for (const auto& e : used) ue.emplace_back(edge_cost(g, costs, e.first, e.second), e.first, e.second);
  std::sort(ue.begin(), ue.end());
  Dsu d2(g.node_count());
  std::vector<Edge> tree;
  for (const auto& [c, i, j] : ue)
    if (d2.unite(i, j)) tree.emplace_back(i, j);

  std::set<int> req(R.begin(), R.end());
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> deg(g.node_count(), 0);
    for (const auto& e : tree) {
      ++deg[e.first];
      ++deg[e.second];
    }
    for (auto it = tree.begin(); it != tree.end();) {
      bool leaf_a = deg[it->first] == 1 && !req.count(it->first);
      bool leaf_b = deg[it->second] == 1 && !req.count(it->second);
      if (leaf_a || leaf_b) {
        it = tree.erase(it);
        changed = true;
        break;
      }
      ++it;
    }
  }
  SteinerTree out;
  std::set<int> ns(R.begin(), R.end());
  for (const auto& e : tree) {
    ns.insert(e.first);
    ns.insert(e.second);
  }
  out.nodes.assign(ns.begin(), ns.end());
  std::sort(tree.begin(), tree.end());
  out.edges = std::move(tree);
  return out;
}

bool SteinerPlan::is_identity() const {
  return std::none_of(components.begin(), components.end(), [](const auto& c) { return c.augmented; });
}

int SteinerPlan::relay_node_count() const {
  return static_cast<int>(std::count_if(relays.begin(), relays.end(), [](const auto& r) { return !r.empty(); }));
}

int SteinerPlan::augmented_count() const {
  return static_cast<int>(std::count_if(components.begin(), components.end(), [](const auto& c) { return c.augmented; }));
}

SteinerPlan identity_plan(const VariableLayout& layout) {
  SteinerPlan plan;
  plan.relays.assign(layout.node_count(), {});
  plan.components.resize(layout.n());
  for (int l = 0; l < layout.n(); ++l) {
    plan.components[l].nodes = layout.component(l).nodes;
    plan.components[l].edges = layout.component(l).edges;
  }
  return plan;
}

namespace {

void fill_augmented(const VariableLayout& layout, int l, ComponentPlan& cp, std::vector<Edge> tree,
                    std::vector<std::vector<int>>& relays) {
  const auto& base = layout.component(l);
  std::set<int> nodes(base.nodes.begin(), base.nodes.end());
  std::set<Edge> edges(base.edges.begin(), base.edges.end());
  for (const auto& e : tree) {
    nodes.insert(e.first);
    nodes.insert(e.second);
    edges.insert(e);
  }
  cp.augmented = true;
  cp.nodes.assign(nodes.begin(), nodes.end());
  cp.edges.assign(edges.begin(), edges.end());
  std::sort(tree.begin(), tree.end());
  cp.tree_edges = std::move(tree);
  cp.steiner_nodes.clear();
  std::set_difference(cp.nodes.begin(), cp.nodes.end(), base.nodes.begin(), base.nodes.end(),
                      std::back_inserter(cp.steiner_nodes));
  for (int s : cp.steiner_nodes) relays[s].push_back(l);
}

}  // namespace

SteinerPlan augment_layout(const Graph& g, const VariableLayout& layout) {
  SteinerPlan plan = identity_plan(layout);
  for (int l = 0; l < layout.n(); ++l) {
    const auto& s = layout.component(l);
    if (is_connected_subgraph(s)) continue;
    auto t = steiner_tree(g, s.nodes);
    fill_augmented(layout, l, plan.components[l], std::move(t.edges), plan.relays);
  }
  for (auto& r : plan.relays) std::sort(r.begin(), r.end());
  return plan;
}

void validate_plan(const Graph& g, const VariableLayout& layout, const SteinerPlan& plan) {
  if (static_cast<int>(plan.components.size()) != layout.n() ||
      static_cast<int>(plan.relays.size()) != layout.node_count())
    throw ContractError("steiner plan sizes do not match the layout");
  for (int l = 0; l < layout.n(); ++l) {
    const auto& cp = plan.components[l];
    const auto& base = layout.component(l);
    if (!std::includes(cp.nodes.begin(), cp.nodes.end(), base.nodes.begin(), base.nodes.end()) ||
        !std::includes(cp.edges.begin(), cp.edges.end(), base.edges.begin(), base.edges.end()))
      throw ContractError("steiner plan drops nodes or edges of component " + std::to_string(l + 1));
    for (const auto& e : cp.edges)
      if (!g.has_edge(e.first, e.second)) throw ContractError("steiner plan uses a non-edge");
    if (!is_connected_subgraph({cp.nodes, cp.edges}))
      throw ContractError("augmented component " + std::to_string(l + 1) + " is not connected");
    for (int s : cp.steiner_nodes)
      if (!std::binary_search(plan.relays[s].begin(), plan.relays[s].end(), l))
        throw ContractError("relay sets disagree with steiner nodes");
  }
}

void write_steiner_plan(const SteinerPlan& plan, std::ostream& os) {
  for (std::size_t l = 0; l < plan.components.size(); ++l) {
    const auto& cp = plan.components[l];
    if (!cp.augmented) continue;
    os << l + 1 << " :";
    for (int s : cp.steiner_nodes) os << ' ' << s + 1;
    os << " ;";
    for (const auto& e : cp.tree_edges) os << ' ' << e.first + 1 << '-' << e.second + 1;
    os << '\n';
  }
}

SteinerPlan read_steiner_plan(const Graph& g, const VariableLayout& layout, std::istream& is) {
  SteinerPlan plan = identity_plan(layout);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto colon = line.find(':');
    auto semi = line.find(';');
    if (colon == std::string::npos || semi == std::string::npos || semi < colon)
      throw ParseError("expected 'l : relays ; edges'", lineno);
    int l = 0;
    try {
      l = std::stoi(line.substr(0, colon));
    } catch (const std::exception&) {
      throw ParseError("bad component index", lineno);
    }
    if (l < 1 || l > layout.n()) throw ParseError("component index out of range", lineno);
    std::istringstream es(line.substr(semi + 1));
    std::vector<Edge> tree;
    std::string tok;
    while (es >> tok) {
      auto dash = tok.find('-');
      if (dash == std::string::npos) throw ParseError("edge must be written i-j", lineno);
      int i = 0, j = 0;
      try {
        i = std::stoi(tok.substr(0, dash)) - 1;
        j = std::stoi(tok.substr(dash + 1)) - 1;
      } catch (const std::exception&) {
        throw ParseError("bad edge '" + tok + "'", lineno);
      }
      if (!g.has_edge(i, j)) throw ParseError("edge " + tok + " is not in the network", lineno);
      tree.emplace_back(std::min(i, j), std::max(i, j));
    }
    fill_augmented(layout, l - 1, plan.components[l - 1], std::move(tree), plan.relays);
  }
  for (auto& r : plan.relays) std::sort(r.begin(), r.end());
  validate_plan(g, layout, plan);
  return plan;
}

}  // namespace dopt::netgraph
