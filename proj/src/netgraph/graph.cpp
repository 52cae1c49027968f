#include "dopt/netgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "dopt/errors.hpp"

namespace dopt::netgraph {

Graph::Graph(int node_count, std::vector<Edge> edges) {
  if (node_count < 1) throw ArgumentError("graph needs at least one node");
  for (auto& e : edges) {
    if (e.first > e.second) std::swap(e.first, e.second);
    if (e.first < 0 || e.second >= node_count)
      throw ArgumentError("edge endpoint out of range");
    if (e.first == e.second) throw ArgumentError("self-loop at node " + std::to_string(e.first + 1));
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw ArgumentError("duplicate edge");
  edges_ = std::move(edges);
  adj_.assign(node_count, {});
  for (const auto& [i, j] : edges_) {
    adj_[i].push_back(j);
    adj_[j].push_back(i);
  }
  for (auto& a : adj_) std::sort(a.begin(), a.end());
}

int Graph::max_degree() const {
  int d = 0;
  for (const auto& a : adj_) d = std::max(d, static_cast<int>(a.size()));
  return d;
}

bool Graph::has_edge(int i, int j) const { return edge_index(i, j) >= 0; }

int Graph::edge_index(int i, int j) const {
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{i, j});
  if (it == edges_.end() || *it != Edge{i, j}) return -1;
  return static_cast<int>(it - edges_.begin());
}

std::vector<int> Graph::bfs_distances(int src) const {
  std::vector<int> dist(adj_.size(), -1);
  std::queue<int> q;
  dist.at(src) = 0;
  q.push(src);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj_[u])
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
  }
  return dist;
}

bool Graph::is_connected() const {
  if (adj_.empty()) return false;
  auto d = bfs_distances(0);
  return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
}

Digraph::Digraph(int node_count, std::vector<Edge> arcs) {
  std::vector<Edge> und;
  und.reserve(arcs.size());
  for (const auto& [t, h] : arcs) und.emplace_back(std::min(t, h), std::max(t, h));
  und_ = Graph(node_count, und);
  std::sort(arcs.begin(), arcs.end());
  arcs_ = std::move(arcs);
  inc_.assign(node_count, {});
  out_.assign(node_count, {});
  for (int a = 0; a < arc_count(); ++a) {
    inc_[arcs_[a].first].push_back(a);
    inc_[arcs_[a].second].push_back(a);
    out_[arcs_[a].first].push_back(arcs_[a].second);
  }
  for (auto& v : inc_) std::sort(v.begin(), v.end());
}

std::vector<int> Digraph::reachable(int src) const {
  std::vector<char> seen(node_count(), 0);
  std::queue<int> q;
  seen.at(src) = 1;
  q.push(src);
  std::vector<int> out;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : out_[u])
      if (!seen[v]) {
        seen[v] = 1;
        out.push_back(v);
        q.push(v);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Model parse_model(const std::string& name) {
  if (name == "erdos-renyi" || name == "er") return Model::ErdosRenyi;
  if (name == "watts-strogatz" || name == "ws") return Model::WattsStrogatz;
  if (name == "barabasi-albert" || name == "ba") return Model::BarabasiAlbert;
  if (name == "geometric" || name == "geo") return Model::Geometric;
  if (name == "lattice") return Model::Lattice;
  throw ArgumentError("unknown network model '" + name + "'");
}

std::string model_name(Model m) {
  switch (m) {
    case Model::ErdosRenyi: return "erdos-renyi";
    case Model::WattsStrogatz: return "watts-strogatz";
    case Model::BarabasiAlbert: return "barabasi-albert";
    case Model::Geometric: return "geometric";
    case Model::Lattice: return "lattice";
  }
  return "?";
}

std::pair<int, int> lattice_shape(int P) {
  if (P < 1) throw ArgumentError("lattice needs P >= 1");
  int m = static_cast<int>(std::floor(std::sqrt(static_cast<double>(P))));
  while (m > 1 && P % m != 0) --m;
  return {m, P / m};
}

namespace {

std::vector<Edge> erdos_renyi(int P, double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Edge> e;
  for (int i = 0; i < P; ++i)
    for (int j = i + 1; j < P; ++j)
      if (U(rng) < p) e.emplace_back(i, j);
  return e;
}

std::vector<Edge> watts_strogatz(int P, int k, double beta, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, P - 1);
  std::set<Edge> es;
  auto key = [](int a, int b) { return Edge{std::min(a, b), std::max(a, b)}; };
  int half = k / 2;
  for (int i = 0; i < P; ++i)
    for (int s = 1; s <= half; ++s)
      if (i != (i + s) % P) es.insert(key(i, (i + s) % P));
  for (int s = 1; s <= half; ++s) {
    for (int i = 0; i < P; ++i) {
      int j = (i + s) % P;
      if (U(rng) >= beta || !es.count(key(i, j))) continue;
      if (static_cast<int>(es.size()) >= P * (P - 1) / 2) continue;
      int w = pick(rng);
      int tries = 0;
      while ((w == i || es.count(key(i, w))) && tries++ < 10 * P) w = pick(rng);
      if (w == i || es.count(key(i, w))) continue;
      es.erase(key(i, j));
      es.insert(key(i, w));
    }
  }
  return {es.begin(), es.end()};
}

std::vector<Edge> barabasi_albert(int P, int m, std::mt19937_64& rng) {
  if (m < 1 || m >= P) throw ArgumentError("barabasi-albert needs 1 <= m < P");
  std::vector<Edge> e;
  std::vector<int> targets(m);
  std::iota(targets.begin(), targets.end(), 0);
  std::vector<int> repeated;
  for (int src = m; src < P; ++src) {
    for (int t : targets) e.emplace_back(t, src);
    repeated.insert(repeated.end(), targets.begin(), targets.end());
    repeated.insert(repeated.end(), m, src);
    std::set<int> chosen;
    std::uniform_int_distribution<std::size_t> pick(0, repeated.size() - 1);
    while (static_cast<int>(chosen.size()) < m) chosen.insert(repeated[pick(rng)]);
    targets.assign(chosen.begin(), chosen.end());
  }
  return e;
}

std::vector<Edge> geometric(int P, double d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> x(P), y(P);
  for (int i = 0; i < P; ++i) {
    x[i] = U(rng);
    y[i] = U(rng);
  }
  std::vector<Edge> e;
  for (int i = 0; i < P; ++i)
    for (int j = i + 1; j < P; ++j)
      if (std::hypot(x[i] - x[j], y[i] - y[j]) <= d) e.emplace_back(i, j);
  return e;
}

std::vector<Edge> lattice(int P) {
  auto [m, n] = lattice_shape(P);
  std::vector<Edge> e;
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) {
      int p = r * n + c;
      if (c + 1 < n) e.emplace_back(p, p + 1);
      if (r + 1 < m) e.emplace_back(p, p + n);
    }
  return e;
}

}  // namespace

Graph gen_graph(Model model, int P, std::uint64_t seed, const GraphParams& params) {
  if (P < 2) throw ArgumentError("network needs P >= 2");
  if (params.max_attempts < 1) throw ArgumentError("max_attempts must be positive");
  double logp = std::log(static_cast<double>(P));
  double er_p = params.er_probability > 0 ? params.er_probability : 1.1 * logp / P;
  double radius = params.geo_radius > 0 ? params.geo_radius : std::sqrt(logp / P);
  if (er_p > 1.0) er_p = 1.0;
  if (model == Model::Geometric && radius > std::sqrt(2.0))
    throw ArgumentError("geometric radius must lie in (0, sqrt(2)]");
  if (model == Model::WattsStrogatz &&
      (params.ws_neighbors < 2 || params.ws_neighbors >= P || params.ws_rewire < 0 ||
       params.ws_rewire > 1))
    throw ArgumentError("watts-strogatz needs 2 <= k < P and rewiring in [0,1]");

  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    std::vector<Edge> e;
    switch (model) {
      case Model::ErdosRenyi: e = erdos_renyi(P, er_p, rng); break;
      case Model::WattsStrogatz: e = watts_strogatz(P, params.ws_neighbors, params.ws_rewire, rng); break;
      case Model::BarabasiAlbert: e = barabasi_albert(P, params.ba_attach, rng); break;
      case Model::Geometric: e = geometric(P, radius, rng); break;
      case Model::Lattice: e = lattice(P); break;
    }
    Graph g(P, std::move(e));
    if (g.is_connected()) return g;
  }
  throw GenerationError(model_name(model) + ": no connected network after " +
                        std::to_string(params.max_attempts) + " attempts");
}

Digraph orient_random(const Graph& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution flip(0.5);
  std::vector<Edge> arcs;
  for (const auto& [i, j] : g.edges()) arcs.push_back(flip(rng) ? Edge{j, i} : Edge{i, j});
  return Digraph(g.node_count(), arcs);
}

Eigen::MatrixXd incidence(const Graph& g) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(g.node_count(), g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    B(g.edges()[e].first, e) = 1.0;
    B(g.edges()[e].second, e) = -1.0;
  }
  return B;
}

Eigen::MatrixXd incidence(const Digraph& g) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(g.node_count(), g.arc_count());
  for (int a = 0; a < g.arc_count(); ++a) {
    B(g.arcs()[a].first, a) = -1.0;
    B(g.arcs()[a].second, a) = 1.0;
  }
  return B;
}

void write_edge_list(const Graph& g, std::ostream& os) {
  os << "P " << g.node_count() << '\n';
  for (const auto& [i, j] : g.edges()) os << i + 1 << ' ' << j + 1 << '\n';
}

Graph read_edge_list(std::istream& is) {
  std::string line;
  int lineno = 0;
  int P = -1;
  std::vector<Edge> edges;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first)) continue;
    if (P < 0) {
      if (first != "P" || !(ss >> P) || P < 1) throw ParseError("expected header 'P <node_count>'", lineno);
      continue;
    }
    int i = 0, j = 0;
    try {
      i = std::stoi(first);
    } catch (const std::exception&) {
      throw ParseError("expected node index", lineno);
    }
    std::string rest;
    if (!(ss >> j) || (ss >> rest)) throw ParseError("expected 'i j'", lineno);
    if (i < 1 || j < 1 || i > P || j > P) throw ParseError("node index out of range", lineno);
    if (i >= j) throw ParseError("edge must satisfy i < j", lineno);
    edges.emplace_back(i - 1, j - 1);
  }
  if (P < 0) throw ParseError("missing header", lineno + 1);
  try {
    return Graph(P, std::move(edges));
  } catch (const ArgumentError& e) {
    throw ParseError(e.what(), lineno);
  }
}

void write_edge_list_file(const Graph& g, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_edge_list(g, os);
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ArgumentError("cannot read " + path);
  return read_edge_list(is);
}

}  // namespace dopt::netgraph
