#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dopt::netgraph {

// Undirected edge with first < second, 0-based node indices.
using Edge = std::pair<int, int>;

class Graph {
 public:
  Graph() = default;
  // Edges are normalized (i < j) and sorted. Self-loops and duplicates throw.
  Graph(int node_count, std::vector<Edge> edges);

  int node_count() const { return static_cast<int>(adj_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int p) const { return adj_.at(p); }
  int degree(int p) const { return static_cast<int>(adj_.at(p).size()); }
  int max_degree() const;
  bool has_edge(int i, int j) const;
  // Index of edge {i,j} in edges(), or -1.
  int edge_index(int i, int j) const;
  bool is_connected() const;
  // Hop distances from src; -1 for unreachable nodes.
  std::vector<int> bfs_distances(int src) const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
};

// Directed network: arcs (tail, head) sorted lexicographically.
// The underlying undirected graph is connected and simple.
class Digraph {
 public:
  Digraph() = default;
  Digraph(int node_count, std::vector<Edge> arcs);

  const Graph& underlying() const { return und_; }
  int node_count() const { return und_.node_count(); }
  int arc_count() const { return static_cast<int>(arcs_.size()); }
  const std::vector<Edge>& arcs() const { return arcs_; }
  // Arc indices incident to p, ascending.
  const std::vector<int>& incident(int p) const { return inc_.at(p); }
  // Nodes reachable from src along arcs, excluding src.
  std::vector<int> reachable(int src) const;

 private:
  Graph und_;
  std::vector<Edge> arcs_;
  std::vector<std::vector<int>> inc_;
  std::vector<std::vector<int>> out_;
};

enum class Model { ErdosRenyi, WattsStrogatz, BarabasiAlbert, Geometric, Lattice };

Model parse_model(const std::string& name);
std::string model_name(Model m);

struct GraphParams {
  double er_probability = -1.0;  // <= 0 selects 1.1 log P / P
  int ws_neighbors = 4;
  double ws_rewire = 0.4;
  int ba_attach = 2;
  double geo_radius = -1.0;  // <= 0 selects sqrt(log P / P)
  int max_attempts = 100;
};

Graph gen_graph(Model model, int P, std::uint64_t seed, const GraphParams& params = {});

// Orients each edge independently with probability 1/2.
Digraph orient_random(const Graph& g, std::uint64_t seed);

// Lattice dimensions: largest m <= floor(sqrt(P)) dividing P, n = P / m.
std::pair<int, int> lattice_shape(int P);

// Consensus incidence: column e has +1 at the smaller endpoint, -1 at the larger.
Eigen::MatrixXd incidence(const Graph& g);
// Flow incidence: column a has -1 at the tail, +1 at the head.
Eigen::MatrixXd incidence(const Digraph& g);

// Edge list text format: header "P E", then one "i j" line per edge, 1-based.
void write_edge_list(const Graph& g, std::ostream& os);
Graph read_edge_list(std::istream& is);
void write_edge_list_file(const Graph& g, const std::string& path);
Graph read_edge_list_file(const std::string& path);

}  // namespace dopt::netgraph
