#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dopt/errors.hpp"
#include "dopt/netgraph/coloring.hpp"
#include "dopt/netgraph/layout.hpp"
#include "dopt/netgraph/steiner.hpp"

using namespace dopt::netgraph;

namespace {

// Six-node network used by the small layout examples, converted to 0-based.
Graph six_nodes() { return Graph(6, {{0, 1}, {0, 5}, {1, 2}, {1, 5}, {2, 3}, {3, 4}, {4, 5}}); }

std::vector<std::vector<int>> to_zero(std::vector<std::vector<int>> S) {
  for (auto& s : S)
    for (int& v : s) --v;
  return S;
}

// x1 on nodes 1,3,4,5: node 1 is cut off from the others.
VariableLayout nonconnected_layout(const Graph& g) {
  return VariableLayout(g, 3, to_zero({{1, 2}, {2, 3}, {1, 2, 3}, {1, 3}, {1, 2}, {2}}));
}

}  // namespace

TEST_CASE("graph normalizes and rejects bad edges") {
  Graph g(3, {{2, 0}, {1, 0}});
  CHECK(g.edges() == std::vector<Edge>{{0, 1}, {0, 2}});
  CHECK(g.has_edge(2, 0));
  CHECK(g.edge_index(0, 2) == 1);
  CHECK(g.edge_index(1, 2) == -1);
  CHECK_THROWS_AS(Graph(3, {{1, 1}}), dopt::ArgumentError);
  CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), dopt::ArgumentError);
  CHECK_THROWS_AS(Graph(3, {{0, 3}}), dopt::ArgumentError);
}

TEST_CASE("generators") {
  SUBCASE("lattice on 6 nodes is a 2x3 bipartite grid") {
    auto g = gen_graph(Model::Lattice, 6, 1);
    CHECK(lattice_shape(6) == std::pair<int, int>{2, 3});
    CHECK(g.edge_count() == 7);
    CHECK(color_graph(g).count() == 2);
  }
  SUBCASE("geometric with radius sqrt(2) is complete") {
    GraphParams gp;
    gp.geo_radius = std::sqrt(2.0);
    for (std::uint64_t seed : {1u, 2u, 3u}) CHECK(gen_graph(Model::Geometric, 4, seed, gp).edge_count() == 6);
  }
  SUBCASE("barabasi-albert with 2 attachments") {
    auto g = gen_graph(Model::BarabasiAlbert, 100, 7);
    CHECK(g.edge_count() == 196);
    CHECK(2.0 * g.edge_count() / g.node_count() == doctest::Approx(3.92));
  }
  SUBCASE("all models connected and seed-deterministic") {
    for (auto m : {Model::ErdosRenyi, Model::WattsStrogatz, Model::BarabasiAlbert, Model::Geometric, Model::Lattice}) {
      auto a = gen_graph(m, 30, 5), b = gen_graph(m, 30, 5);
      CHECK(a.is_connected());
      CHECK(a.edges() == b.edges());
      CHECK(parse_model(model_name(m)) == m);
    }
  }
  CHECK_THROWS_AS(gen_graph(Model::Geometric, 1, 1), dopt::ArgumentError);
  CHECK_THROWS_AS(parse_model("ring"), dopt::ArgumentError);
}

TEST_CASE("coloring") {
  CHECK(color_graph(Graph(3, {{0, 1}, {1, 2}})).color_of == std::vector<int>{2, 1, 2});
  CHECK(color_graph(Graph(3, {{0, 1}, {1, 2}, {0, 2}})).count() == 3);
  CHECK(color_graph(gen_graph(Model::Lattice, 100, 1)).count() == 2);
  for (auto m : {Model::ErdosRenyi, Model::WattsStrogatz, Model::BarabasiAlbert, Model::Geometric})
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto g = gen_graph(m, 40, seed);
      auto c = color_graph(g);
      CHECK(is_proper(g, c));
      for (auto [i, j] : g.edges()) CHECK(c.color_of[i] != c.color_of[j]);
    }
  Graph tri(3, {{0, 1}, {1, 2}, {0, 2}});
  CHECK_THROWS_AS(make_coloring(tri, {1, 1, 2}), dopt::ArgumentError);
}

TEST_CASE("edge list, coloring and plan files round-trip") {
  auto g = gen_graph(Model::WattsStrogatz, 12, 3);
  std::stringstream ss;
  write_edge_list(g, ss);
  CHECK(read_edge_list(ss).edges() == g.edges());

  auto c = color_graph(g);
  std::stringstream cs;
  write_coloring(c, cs);
  CHECK(read_coloring(g, cs).color_of == c.color_of);

  auto six = six_nodes();
  auto layout = nonconnected_layout(six);
  auto plan = augment_layout(six, layout);
  std::stringstream ps;
  write_steiner_plan(plan, ps);
  auto back = read_steiner_plan(six, layout, ps);
  CHECK(back.relays == plan.relays);
  CHECK(back.components[0].edges == plan.components[0].edges);

  std::stringstream bad("P 3\n1 2\n2 x\n");
  CHECK_THROWS_AS(read_edge_list(bad), dopt::ParseError);
}

TEST_CASE("incidence matrices") {
  auto B = incidence(Graph(2, {{0, 1}}));
  CHECK(B(0, 0) == 1.0);
  CHECK(B(1, 0) == -1.0);
  auto F = incidence(Digraph(2, {{1, 0}}));
  CHECK(F(0, 0) == 1.0);
  CHECK(F(1, 0) == -1.0);

  auto g = gen_graph(Model::ErdosRenyi, 20, 4);
  auto M = incidence(g);
  CHECK((Eigen::RowVectorXd::Ones(20) * M).cwiseAbs().maxCoeff() == 0.0);
  Eigen::MatrixXd Lap = M * M.transpose();
  for (int p = 0; p < 20; ++p) {
    CHECK(Lap(p, p) == g.degree(p));
    for (int q = 0; q < 20; ++q)
      if (q != p) CHECK(Lap(p, q) == (g.has_edge(p, q) ? -1.0 : 0.0));
  }
}

TEST_CASE("color-restricted Gram blocks are diagonal") {
  auto g = gen_graph(Model::Geometric, 30, 2);
  auto c = color_graph(g);
  auto B = incidence(g);
  for (const auto& cls : c.classes) {
    Eigen::MatrixXd Bc(cls.size(), g.edge_count());
    for (std::size_t k = 0; k < cls.size(); ++k) Bc.row(k) = B.row(cls[k]);
    Eigen::MatrixXd G = Bc * Bc.transpose();
    for (std::size_t a = 0; a < cls.size(); ++a)
      for (std::size_t b = 0; b < cls.size(); ++b) CHECK(G(a, b) == (a == b ? g.degree(cls[a]) : 0.0));
  }
}

TEST_CASE("edge-sum identities") {
  auto g = gen_graph(Model::WattsStrogatz, 15, 8);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(15, 15);
  for (auto [i, j] : g.edges()) {
    a(i, j) = N(rng);
    a(j, i) = N(rng);
  }
  double over_edges = 0.0, over_nodes = 0.0, lower = 0.0, higher = 0.0;
  for (auto [i, j] : g.edges()) over_edges += a(i, j);
  for (int p = 0; p < 15; ++p)
    for (int j : g.neighbors(p)) {
      if (j > p) over_nodes += a(p, j);
      if (j < p) lower += a(j, p);
      if (j > p) higher += a(p, j);
    }
  CHECK(over_nodes == doctest::Approx(over_edges));
  CHECK(lower == doctest::Approx(higher));
  Eigen::MatrixXd s = a + a.transpose();
  double sym_edges = 0.0, sym_all = 0.0;
  for (auto [i, j] : g.edges()) sym_edges += s(i, j);
  for (int p = 0; p < 15; ++p)
    for (int j : g.neighbors(p)) sym_all += s(p, j);
  CHECK(sym_all == doctest::Approx(2.0 * sym_edges));
}

TEST_CASE("induced subgraphs and classification") {
  auto g = six_nodes();
  VariableLayout L(g, 3, to_zero({{1, 2}, {1, 2, 3}, {2, 3}, {3}, {1, 3}, {1, 2}}));
  auto s2 = L.component(1);
  CHECK(s2.nodes == std::vector<int>{0, 1, 2, 5});
  CHECK(s2.edges == std::vector<Edge>{{0, 1}, {0, 5}, {1, 2}, {1, 5}});
  CHECK(L.degree(5, 1) == 2);
  CHECK(L.degree(3, 1) == 0);

  auto lone = induced_subgraph(g, {{0}, {}, {}, {}, {}, {}}, 0);
  CHECK(lone.nodes == std::vector<int>{0});
  CHECK(lone.edges.empty());

  CHECK(classify_variable(g, nonconnected_layout(g)).verdict == VariableClass::NonConnected);
  CHECK(classify_variable(g, VariableLayout::global(g, 2)).verdict == VariableClass::Global);

  // One component per edge on its endpoints.
  std::vector<std::vector<int>> S(6);
  for (int e = 0; e < g.edge_count(); ++e) {
    S[g.edges()[e].first].push_back(e);
    S[g.edges()[e].second].push_back(e);
  }
  CHECK(classify_variable(g, VariableLayout(g, g.edge_count(), S)).verdict == VariableClass::StarShaped);
}

TEST_CASE("classification is invariant under relabeling") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = gen_graph(Model::ErdosRenyi, 10, trial + 1);
    int n = 4;
    std::vector<std::vector<int>> S(10);
    std::bernoulli_distribution coin(0.4);
    for (int p = 0; p < 10; ++p)
      for (int l = 0; l < n; ++l)
        if (coin(rng)) S[p].push_back(l);
    for (int l = 0; l < n; ++l) S[l].push_back(l);
    std::vector<int> perm(10);
    for (int i = 0; i < 10; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Edge> pe;
    for (auto [i, j] : g.edges()) pe.push_back({perm[i], perm[j]});
    Graph h(10, pe);
    std::vector<std::vector<int>> T(10);
    for (int p = 0; p < 10; ++p) T[perm[p]] = S[p];
    auto a = classify_variable(g, VariableLayout(g, n, S));
    auto b = classify_variable(h, VariableLayout(h, n, T));
    CHECK(a.verdict == b.verdict);
    for (int l = 0; l < n; ++l) CHECK(a.components[l].connected == b.components[l].connected);
  }
}

TEST_CASE("steiner trees") {
  Graph path(3, {{0, 1}, {1, 2}});
  auto t = steiner_tree(path, {0, 2});
  CHECK(t.edges == std::vector<Edge>{{0, 1}, {1, 2}});
  CHECK(t.nodes == std::vector<int>{0, 1, 2});

  auto single = steiner_tree(path, {1});
  CHECK(single.nodes == std::vector<int>{1});
  CHECK(single.edges.empty());

  Graph cycle(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  auto c = steiner_tree(cycle, {0, 2});
  CHECK(tree_cost(cycle, c.edges) == 2.0);
  CHECK(is_tree(c.nodes, c.edges));
  CHECK((c.nodes == std::vector<int>{0, 1, 2} || c.nodes == std::vector<int>{0, 2, 3}));
}

TEST_CASE("steiner plans") {
  auto g = six_nodes();
  auto full = VariableLayout::global(g, 2);
  auto id = augment_layout(g, full);
  CHECK(id.is_identity());
  for (const auto& r : id.relays) CHECK(r.empty());

  auto layout = nonconnected_layout(g);
  auto plan = augment_layout(g, layout);
  CHECK(plan.augmented_count() == 1);
  CHECK(plan.components[0].augmented);
  CHECK(plan.components[0].steiner_nodes.size() == 1);
  int relay = plan.components[0].steiner_nodes[0];
  CHECK((relay == 1 || relay == 5));
  CHECK(plan.relay_node_count() == 1);
  validate_plan(g, layout, plan);

  auto broken = plan;
  broken.components[0].edges.pop_back();
  CHECK_THROWS_AS(validate_plan(g, layout, broken), dopt::ContractError);
}
