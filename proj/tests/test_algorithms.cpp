#include <cmath>
#include <random>

#include "doctest.h"
#include "dopt/algorithms/algorithms.hpp"
#include "dopt/errors.hpp"
#include "dopt/harness/harness.hpp"
#include "dopt/problems/builders.hpp"
#include "replay.hpp"
#include "support.hpp"

using namespace dopt;
using namespace dopt::algorithms;
using dopt::testing::iterates;
using dopt::testing::max_gap;
using dopt::testing::quadratic_instance;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

netgraph::Graph pair_graph() { return netgraph::Graph(2, {{0, 1}}); }
netgraph::Graph triangle() { return netgraph::Graph(3, {{0, 1}, {1, 2}, {0, 2}}); }
netgraph::Graph path3() { return netgraph::Graph(3, {{0, 1}, {1, 2}}); }

RunOptions stop(double target, long max_cs) {
  RunOptions o;
  o.stop.target = target;
  o.stop.max_cs = max_cs;
  return o;
}

}  // namespace

TEST_CASE("D-ADMM on two-node consensus reaches the mean") {
  auto inst = problems::build_consensus(pair_graph(), vec({0, 10}));
  auto c = netgraph::color_graph(inst.graph);
  auto r = run_dadmm_global(inst, c, 1.0, stop(1e-6, 200));
  CHECK(r.status == RunStatus::Converged);
  CHECK(r.cs_to_target <= 200);
  for (const auto& xp : r.final) CHECK(xp[0] == doctest::Approx(5.0).epsilon(1e-5));
  CHECK(r.algorithm == "dadmm-global");
}

TEST_CASE("equal measurements converge at iteration zero") {
  auto inst = problems::build_consensus(triangle(), vec({4, 4, 4}));
  auto r = run_dadmm(inst, netgraph::color_graph(inst.graph), 1.0);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].iteration == 0);
  CHECK(r.rows[0].rel_error == 0.0);
  CHECK(r.status == RunStatus::Converged);
  CHECK(r.cs_to_target == 0);
}

TEST_CASE("max_cs zero records nothing") {
  auto inst = problems::build_consensus(pair_graph(), vec({0, 10}));
  auto r = run_zhu(inst, 1.0, stop(1e-4, 0));
  CHECK(r.rows.empty());
  CHECK(r.status == RunStatus::MaxCs);
}

TEST_CASE("Schizas and Zhu on two-node consensus") {
  for (auto run : {run_schizas, run_zhu}) {
    auto inst = problems::build_consensus(pair_graph(), vec({0, 10}));
    auto r = run(inst, 1.0, stop(1e-8, 1000));
    CHECK(r.status == RunStatus::Converged);
    CHECK(r.final[0][0] == doctest::Approx(5.0));
  }
}

TEST_CASE("equal starts with zero duals are stationary") {
  auto inst = problems::build_consensus(triangle(), vec({3, 3, 3}));
  inst.x_ref = vec({4});  // keeps the error positive so the runs do not stop at k = 0
  auto zs = iterates([&](const RunOptions& o) { return run_zhu(inst, 0.7, o); }, 5);
  auto ss = iterates([&](const RunOptions& o) { return run_schizas(inst, 0.7, o); }, 5, 2);
  for (const auto& run : {zs, ss})
    for (const auto& x : run)
      for (const auto& xp : x) CHECK(std::abs(xp[0] - 3.0) <= 1e-12);
}

TEST_CASE("Schizas and Zhu match direct two-block ADMM") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto g = path3();
    auto inst = quadratic_instance(g, netgraph::VariableLayout::global(g, 2), seed);
    auto direct_s = testing::replay_schizas(inst, 0.8, 10);
    auto ours_s = iterates([&](const RunOptions& o) { return run_schizas(inst, 0.8, o); }, 10, 2);
    REQUIRE(ours_s.size() == 11);
    for (int k = 0; k <= 10; ++k) CHECK(max_gap(direct_s[k], ours_s[k]) <= 1e-12);

    // The parallel Zhu step with parameter rho is the edge ADMM with penalty 2 rho.
    auto direct_z = testing::replay_zhu(inst, 2 * 0.8, 10);
    auto ours_z = iterates([&](const RunOptions& o) { return run_zhu(inst, 0.8, o); }, 10);
    REQUIRE(ours_z.size() == 11);
    for (int k = 0; k <= 10; ++k) CHECK(max_gap(direct_z[k], ours_z[k]) <= 1e-12);
  }
}

TEST_CASE("connected variant reduces to the global one") {
  auto g = netgraph::gen_graph(netgraph::Model::ErdosRenyi, 12, 3);
  auto inst = quadratic_instance(g, netgraph::VariableLayout::global(g, 3), 9);
  auto c = netgraph::color_graph(g);
  auto a = iterates([&](const RunOptions& o) { return run_dadmm_global(inst, c, 0.5, o); }, 50);
  auto b = iterates([&](const RunOptions& o) { return run_dadmm_connected(inst, c, 0.5, o); }, 50);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(max_gap(a[k], b[k]) <= 1e-12);
}

TEST_CASE("general variant with the identity plan equals the connected one") {
  auto g = netgraph::gen_graph(netgraph::Model::Geometric, 10, 2);
  std::vector<std::vector<int>> S(10);
  for (int p = 0; p < 10; ++p) {
    S[p].push_back(0);
    if (p % 2 == 0) S[p].push_back(1);
    S[p].push_back(2 + p);
  }
  netgraph::VariableLayout layout(g, 12, S);
  auto inst = quadratic_instance(g, layout, 4);
  auto c = netgraph::color_graph(g);
  bool conn = netgraph::classify_variable(g, inst.layout).connected;
  auto plan = netgraph::identity_plan(inst.layout);
  if (conn) {
    auto a = run_dadmm_connected(inst, c, 1.0, stop(1e-6, 300));
    auto b = run_dadmm_general(inst, c, plan, 1.0, stop(1e-6, 300));
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t k = 0; k < a.rows.size(); ++k) CHECK(a.rows[k].rel_error == b.rows[k].rel_error);
    CHECK(max_gap(a.final, b.final) == 0.0);
  } else {
    CHECK_THROWS_AS(run_dadmm_connected(inst, c, 1.0), ContractError);
  }
}

TEST_CASE("relay node carries a component it does not use") {
  auto g = path3();
  netgraph::VariableLayout layout(g, 2, {{0}, {1}, {0}});
  auto inst = quadratic_instance(g, layout, 2);
  CHECK_THROWS_AS(run_dadmm_connected(inst, netgraph::color_graph(g), 1.0), ContractError);
  auto plan = netgraph::augment_layout(g, inst.layout);
  CHECK(plan.relays[1] == std::vector<int>{0});
  auto r = run_dadmm_general(inst, netgraph::color_graph(g), plan, 1.0, stop(1e-8, 2000));
  CHECK(r.status == RunStatus::Converged);
  CHECK(r.final[0][0] == doctest::Approx(inst.x_ref[0]).epsilon(1e-6));
  CHECK(r.final[2][0] == doctest::Approx(inst.x_ref[0]).epsilon(1e-6));
  auto k = run_kekatos(inst, 1.0, stop(1e-8, 4000), &plan);
  CHECK(k.status == RunStatus::Converged);
}

TEST_CASE("Kekatos on two nodes sharing one component") {
  auto g = pair_graph();
  netgraph::VariableLayout layout(g, 3, {{0, 1}, {0, 2}});
  auto inst = quadratic_instance(g, layout, 6);
  auto r = run_kekatos(inst, 1.0, stop(1e-8, 2000));
  CHECK(r.status == RunStatus::Converged);
  CHECK(r.final[0][0] == doctest::Approx(inst.x_ref[0]).epsilon(1e-6));
  CHECK(r.final[1][1] == doctest::Approx(inst.x_ref[2]).epsilon(1e-6));
}

TEST_CASE("rho bound") {
  auto tri = problems::build_consensus(triangle(), vec({1, 2, 3}));
  auto b = check_rho_bound(tri, netgraph::color_graph(tri.graph));
  CHECK(b.value == doctest::Approx(1.0 / 6.0));
  CHECK_FALSE(b.unbounded);
  CHECK_FALSE(b.two_colors);

  auto g = netgraph::gen_graph(netgraph::Model::Geometric, 15, 4);
  auto c = netgraph::color_graph(g);
  auto one = quadratic_instance(g, netgraph::VariableLayout::global(g, 2), 3, 1.0);
  auto ten = quadratic_instance(g, netgraph::VariableLayout::global(g, 2), 3, 10.0);
  CHECK(check_rho_bound(ten, c).value == doctest::Approx(10.0 * check_rho_bound(one, c).value));

  auto pair = problems::build_consensus(pair_graph(), vec({0, 1}));
  CHECK(check_rho_bound(pair, netgraph::color_graph(pair.graph)).two_colors);
}

TEST_CASE("scalar accounting") {
  auto g = netgraph::gen_graph(netgraph::Model::WattsStrogatz, 10, 1);
  auto inst = quadratic_instance(g, netgraph::VariableLayout::global(g, 3), 1);
  CHECK(analytic_scalars_per_cs(inst) == 2LL * g.edge_count() * 3);
  auto c = netgraph::color_graph(g);
  for (const auto& r : {run_dadmm(inst, c, 1.0, stop(1e-4, 20)), run_zhu(inst, 1.0, stop(1e-4, 20)),
                        run_schizas(inst, 1.0, stop(1e-4, 20))})
    for (const auto& row : r.rows) CHECK(row.scalars == row.cs * analytic_scalars_per_cs(inst));

  auto g3 = path3();
  auto part = quadratic_instance(g3, netgraph::VariableLayout(g3, 2, {{0}, {1}, {0}}), 2);
  CHECK(analytic_scalars_per_cs(part) == 0);
  auto plan = netgraph::augment_layout(g3, part.layout);
  CHECK(analytic_scalars_per_cs(part, &plan) == 4);
}

TEST_CASE("CS count per iteration") {
  auto inst = problems::build_consensus(triangle(), vec({1, 5, 9}));
  auto s = run_schizas(inst, 1.0, stop(1e-12, 10));
  for (std::size_t k = 0; k < s.rows.size(); ++k) CHECK(s.rows[k].cs == 2 * s.rows[k].iteration);
  CHECK(s.rows.back().cs == 10);
  auto z = run_zhu(inst, 1.0, stop(1e-12, 7));
  CHECK(z.rows.back().cs == 7);
  CHECK(z.rows.back().iteration == 7);
}

TEST_CASE("linear consensus") {
  Vec theta = vec({3, -1, 7, 2});
  netgraph::Graph k4(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  auto r = run_linear_consensus(k4, theta, uniform_weights(k4), stop(1e-12, 5));
  CHECK(r.cs_to_target == 1);
  for (const auto& xp : r.final) CHECK(xp[0] == doctest::Approx(2.75));

  Mat half = Mat::Constant(2, 2, 0.5);
  CHECK(run_linear_consensus(pair_graph(), vec({0, 10}), half, stop(1e-12, 5)).cs_to_target == 1);

  netgraph::Graph path(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  Mat W = metropolis_weights(path);
  CHECK((W.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-15);
  CHECK((W - W.transpose()).norm() < 1e-15);
  auto m = run_linear_consensus(path, vec({1, 2, 3, 4, 10}), W, stop(1e-6, 2000));
  CHECK(m.status == RunStatus::Converged);
  // Power iteration of W from the start vector as an independent oracle.
  Vec y = vec({1, 2, 3, 4, 10});
  for (long k = 0; k < m.rows.back().iteration; ++k) y = W * y;
  for (int p = 0; p < 5; ++p) CHECK(m.final[p][0] == doctest::Approx(y[p]).epsilon(1e-12));

  Mat bad = Mat::Identity(2, 2) * 0.3;
  CHECK_THROWS_AS(run_linear_consensus(pair_graph(), vec({0, 1}), bad), ArgumentError);
}

TEST_CASE("subgradient consensus") {
  auto inst = problems::build_consensus(path3(), vec({0, 3, 9}));
  auto r = run_subgrad_consensus(inst, stop(1e-3, 5000));
  CHECK(r.rows.back().rel_error < inst.rel_error(inst.start()));
  // On a complete graph with uniform weights the first unit step lands on the mean.
  auto tri = problems::build_consensus(triangle(), vec({0, 3, 9}));
  auto t = run_subgrad_consensus(tri, stop(1e-12, 10));
  CHECK(t.cs_to_target == 1);
  CHECK(r.algorithm == "subgradient");
}

TEST_CASE("Nesterov on a star-shaped smooth instance") {
  auto g = netgraph::gen_graph(netgraph::Model::Geometric, 8, 3);
  std::vector<std::vector<int>> S(8);
  for (const auto& [i, j] : g.edges()) {
    int e = g.edge_index(i, j);
    S[i].push_back(e);
    S[j].push_back(e);
  }
  auto inst = quadratic_instance(g, netgraph::VariableLayout(g, g.edge_count(), S), 5);
  double L = 0.0;
  for (const auto& node : inst.nodes) {
    auto& q = dynamic_cast<const testing::QuadNode&>(*node);
    L = std::max(L, Eigen::SelfAdjointEigenSolver<Mat>(q.H()).eigenvalues().maxCoeff());
  }
  auto r = run_nesterov_distributed(inst, 2.0 * L, stop(1e-6, 5000));
  CHECK(r.status == RunStatus::Converged);

  auto global = quadratic_instance(g, netgraph::VariableLayout::global(g, 2), 5);
  CHECK_THROWS_AS(run_nesterov_distributed(global, 1.0), ContractError);
}

TEST_CASE("limit does not depend on the network") {
  Vec theta = vec({3, 8, -2, 5, 11, 0, 4});
  auto a = problems::build_consensus(netgraph::gen_graph(netgraph::Model::Geometric, 7, 1), theta);
  auto b = problems::build_consensus(netgraph::gen_graph(netgraph::Model::BarabasiAlbert, 7, 2), theta);
  auto ra = run_dadmm(a, netgraph::color_graph(a.graph), 1.0, stop(1e-8, 2000));
  auto rb = run_dadmm(b, netgraph::color_graph(b.graph), 1.0, stop(1e-8, 2000));
  CHECK(std::abs(a.average(ra.final)[0] - b.average(rb.final)[0]) < 1e-4);
}

TEST_CASE("preconditions") {
  auto inst = problems::build_consensus(pair_graph(), vec({0, 10}));
  auto c = netgraph::color_graph(inst.graph);
  CHECK_THROWS_AS(run_dadmm_global(inst, c, 0.0), ArgumentError);
  CHECK_THROWS_AS(run_zhu(inst, -1.0), ArgumentError);
  auto g = path3();
  auto part = quadratic_instance(g, netgraph::VariableLayout(g, 2, {{0}, {0, 1}, {1}}), 1);
  CHECK_THROWS_AS(run_dadmm_global(part, netgraph::color_graph(g), 1.0), ContractError);
  CHECK_THROWS_AS(run_schizas(part, 1.0), ContractError);
}
