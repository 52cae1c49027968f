#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dopt/errors.hpp"
#include "dopt/harness/harness.hpp"
#include "dopt/problems/builders.hpp"
#include "dopt/problems/dmpc.hpp"
#include "dopt/problems/netflow.hpp"
#include "dopt/solvers/solvers.hpp"

using namespace dopt;
using namespace dopt::problems;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

Mat mat(int r, int c, std::initializer_list<double> v) {
  Mat M(r, c);
  auto it = v.begin();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = *it++;
  return M;
}

netgraph::Graph pair_graph() { return netgraph::Graph(2, {{0, 1}}); }

harness::Setup small_setup(const std::string& problem) {
  harness::ExperimentConfig c;
  c.problem = problem;
  c.nodes = 6;
  c.rows_per_node = 3;
  c.rows = 12;
  c.columns = 30;
  c.sparsity = 3;
  c.pairs = 6;
  c.horizon = 3;
  if (problem.rfind("flow", 0) == 0) c.model = "barabasi-albert";
  return harness::make_setup(c);
}

const std::vector<std::string> kApps{"consensus", "bp-row", "bpdn-row", "lasso-row", "bp-col", "bpdn-col",
                                     "rlasso-col", "lasso-col", "svm", "flow1", "flow2", "dmpc-star",
                                     "dmpc-connected", "dmpc-nonconnected"};

}  // namespace

TEST_CASE("consensus") {
  CHECK(consensus_prox(10.0, 1.0, 0.0) == 5.0);
  CHECK(consensus_prox(3.0, 0.7, 3.0) == doctest::Approx(3.0));
  auto inst = build_consensus(pair_graph(), vec({0, 10}));
  CHECK(inst.x_ref[0] == 5.0);
  CHECK(inst.start()[1][0] == 10.0);
  CHECK(inst.nodes[0]->modulus().value() == 1.0);
  CHECK_THROWS_AS(build_consensus(netgraph::Graph(1, {}), vec({1})), ArgumentError);
}

TEST_CASE("basis pursuit row oracle") {
  RowData d;
  d.A = {Mat::Identity(2, 2), Mat::Identity(2, 2)};
  d.b = {vec({1, -2}), vec({1, -2})};
  auto inst = build_bp_row(pair_graph(), d);
  Vec x = inst.nodes[0]->solve(vec({5, -7}), vec({1, 1}));
  CHECK((x - vec({1, -2})).norm() < 1e-9);

  RowData one;
  one.A = {mat(1, 2, {1, 1})};
  one.b = {vec({1})};
  auto single = build_bp_row(netgraph::Graph(1, {}), one);
  Vec h = single.nodes[0]->solve(Vec::Zero(2), vec({1e-3, 1e-3}));
  CHECK((h - vec({0.5, 0.5})).norm() < 1e-6);
  CHECK(single.x_ref.lpNorm<1>() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("bpdn row oracle with a zero block is a soft threshold") {
  RowData d;
  d.A = {Mat::Zero(1, 3), Mat::Zero(1, 3)};
  d.b = {vec({0}), vec({0})};
  auto inst = build_bpdn_row(pair_graph(), d, 0.6);
  Vec v = vec({-2, 0.1, 1}), w = vec({1, 2, 0.5});
  Vec x = inst.nodes[0]->solve(v, w);
  Vec expect = solvers::soft_threshold(Vec(-v.cwiseQuotient(w)), Vec(0.3 * w.cwiseInverse()));
  CHECK((x - expect).norm() < 1e-9);
  CHECK(inst.x_ref.norm() < 1e-9);
}

TEST_CASE("lasso row oracle") {
  RowData d;
  d.A = {Mat::Zero(1, 2), Mat::Zero(1, 2)};
  d.b = {vec({0}), vec({0})};
  auto inst = build_lasso_row(pair_graph(), d, 1.0);
  CHECK((inst.nodes[0]->solve(vec({-2, 0}), vec({1, 1})) - vec({1, 0})).norm() < 1e-9);
  CHECK((inst.nodes[0]->solve(vec({-0.3, 0.2}), vec({1, 2})) - vec({0.3, -0.1})).norm() < 1e-9);
  // Weighted: argmin -3 x1 - x2 + x1^2 + 1/2 x2^2 on the unit ball gives x1 + x2 = 1 with 2 x1 - 3 = x2 - 1.
  CHECK((inst.nodes[0]->solve(vec({-3, -1}), vec({2, 1})) - vec({1.0, 0.0})).norm() < 1e-9);
  CHECK((inst.nodes[0]->solve(vec({-3, -2}), vec({2, 1})) - vec({2.0 / 3, 1.0 / 3})).norm() < 1e-9);
}

TEST_CASE("primal recovery and conjugates") {
  Mat I = Mat::Identity(1, 1);
  CHECK(recover_primal_soft(vec({1}), I, 1.0)[0] == 0.0);
  CHECK(recover_primal_soft(vec({2}), I, 1.0)[0] == 1.0);
  CHECK(recover_primal_soft(vec({-3}), I, 0.5)[0] == -4.0);

  CHECK(conjugate_l2_quad(vec({0.3, 0.4}), 1.0) == 0.0);
  CHECK(conjugate_l2_quad(vec({2, 0}), 1.0) == doctest::Approx(0.5));
  // Grid search over r = ||x|| along eta.
  for (double s : {0.5, 1.5, 3.0, 7.0})
    for (double delta : {0.1, 1.0}) {
      double best = 0.0;
      for (int k = 0; k <= 1000000; ++k) {
        double r = 1e-4 * k;
        best = std::max(best, r * s - r - 0.5 * delta * r * r);
      }
      CHECK(std::abs(conjugate_l2_quad(vec({0, s}), delta) - best) < 1e-6);
    }
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N;
  for (int t = 0; t < 100; ++t) {
    Vec eta(3), x(3);
    for (int i = 0; i < 3; ++i) {
      eta[i] = 2 * N(rng);
      x[i] = N(rng);
    }
    double delta = 0.3;
    auto h = [&](const Vec& z) { return z.norm() + 0.5 * delta * z.squaredNorm(); };
    CHECK(h(x) + conjugate_l2_quad(eta, delta) >= eta.dot(x) - 1e-12);
    Vec xs = conjugate_l2_quad_argmax(eta, delta);
    CHECK(std::abs(h(xs) + conjugate_l2_quad(eta, delta) - eta.dot(xs)) < 1e-8);
  }
  CHECK(conjugate_l1_quad(vec({2, -0.5}), 1.0, 1.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(conjugate_l2_quad(vec({1}), 0.0), ArgumentError);
}

TEST_CASE("column duals") {
  auto sys = gaussian_sparse(10, 20, 2, 0.0, 3);
  auto cols = split_columns(sys.A, Vec::Zero(10), 2);
  CHECK(build_bp_col_dual(pair_graph(), cols, 1e-2).x_ref.norm() < 1e-8);
  CHECK_THROWS_AS(build_bp_col_dual(pair_graph(), cols, 0.0), ArgumentError);

  auto with_b = split_columns(sys.A, sys.b, 2);
  CHECK(build_rlasso_col_dual(pair_graph(), with_b, sys.b.norm() * 1.01, 1e-2).x_ref.norm() < 1e-6);

  auto bp = build_bp_col_dual(pair_graph(), with_b, 1e-2);
  auto rl = build_rlasso_col_dual(pair_graph(), with_b, 0.0, 1e-2);
  // The dual optimum need not be unique; the regularized primal is.
  CHECK(bp.f_ref == doctest::Approx(rl.f_ref).epsilon(1e-10));
  CHECK((bp.report_ref - rl.report_ref).norm() < 1e-6);
  Vec lam = Vec::Random(10);
  CHECK(bp.nodes[1]->value(lam) == doctest::Approx(rl.nodes[1]->value(lam)));
}

TEST_CASE("row and column basis pursuit agree") {
  auto sys = gaussian_sparse(24, 60, 3, 0.0, 9);
  netgraph::Graph g = netgraph::gen_graph(netgraph::Model::Geometric, 4, 2);
  auto row = build_bp_row(g, split_rows(sys.A, sys.b, 4));
  double delta = 1e-2;
  auto col = build_bp_col_dual(g, split_columns(sys.A, sys.b, 4), delta);
  double tol = std::max(1e-3, 3 * delta * row.x_ref.norm());
  CHECK((row.x_ref - col.report_ref).norm() <= tol);
}

TEST_CASE("svm") {
  Mat X = mat(2, 1, {-1, 1});
  Vec y = vec({1, -1});
  auto inst = build_svm(pair_graph(), X, y, 100.0, {{0}, {1}});
  CHECK(inst.x_ref[0] < 0);
  CHECK(std::abs(inst.x_ref[1]) < 1e-6);

  auto pts = iris_two_class();
  CHECK(pts.X.rows() == 100);
  CHECK(pts.X.cols() == 4);
  std::vector<int> all(100);
  for (int k = 0; k < 100; ++k) all[k] = k;
  auto one = build_svm(netgraph::Graph(1, {}), pts.X, pts.y, 1.0, {all});
  auto two = build_svm(pair_graph(), pts.X, pts.y, 0.5, {all, all});
  CHECK((one.x_ref - two.x_ref).norm() < 1e-5 * (1 + one.x_ref.norm()));
  CHECK_THROWS_AS(assign_points(3, 4), ArgumentError);
}

TEST_CASE("network flows") {
  netgraph::Digraph arc(2, {{0, 1}});
  auto inst = build_netflow(arc, 1, vec({-4}), vec({-3, 3}));
  CHECK(inst.x_ref[0] == doctest::Approx(3.0));
  CHECK_THROWS_AS(build_netflow(arc, 1, vec({1}), vec({-3, 2})), ArgumentError);

  auto g = netgraph::gen_graph(netgraph::Model::BarabasiAlbert, 30, 3);
  auto fd = gen_flow(g, 30, 4);
  CHECK(std::abs(fd.d.sum()) < 1e-12);
  auto B = netgraph::incidence(fd.network);
  auto s1 = build_netflow(fd.network, 1, fd.param, fd.d);
  CHECK((B * s1.x_ref - fd.d).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(flow_kkt_residual(fd.network, fd.param, fd.d, s1.x_ref) < 1e-10);
  auto s2 = build_netflow(fd.network, 2, fd.param, fd.d);
  CHECK(s2.x_ref.minCoeff() >= 0.0);
  CHECK((fd.param - s2.x_ref).minCoeff() > 0.0);
  CHECK((B * s2.x_ref - fd.d).cwiseAbs().maxCoeff() < 1e-6);

  auto cls = netgraph::classify_variable(s1.graph, s1.layout);
  CHECK(cls.verdict == netgraph::VariableClass::StarShaped);
}

TEST_CASE("model predictive control") {
  auto g = netgraph::gen_graph(netgraph::Model::Geometric, 8, 1);
  auto star = gen_coupling(g, CouplingKind::Star, 3, 1);
  auto sinst = build_dmpc(g, gen_mpc_systems(star, 2, true, 2), star);
  CHECK(netgraph::classify_variable(g, sinst.layout).star);

  // No coupling: each node's inputs only affect itself.
  MpcCoupling own;
  own.T = 3;
  own.drives.assign(8, std::vector<std::vector<int>>(3));
  for (int j = 0; j < 8; ++j)
    for (int t = 0; t < 3; ++t) own.drives[j][t] = {j};
  auto systems = gen_mpc_systems(own, 2, true, 4);
  auto inst = build_dmpc(g, systems, own);
  for (int p = 0; p < 8; ++p) {
    auto& node = *inst.nodes[p];
    Vec local = gather(inst.x_ref, node.support());
    CHECK(node.gradient(local).norm() < 1e-8);
  }
  CHECK(netgraph::classify_variable(g, inst.layout).verdict != netgraph::VariableClass::Global);
  CHECK_THROWS_AS(parse_coupling("ring"), ArgumentError);
}

TEST_CASE("smooth node gradients match finite differences") {
  for (std::string app : {"consensus", "bp-col", "bpdn-col", "lasso-col", "dmpc-star", "dmpc-nonconnected"}) {
    CAPTURE(app);
    auto s = small_setup(app);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> N;
    for (auto& node : s.instance.nodes) {
      REQUIRE(node->smooth());
      Vec x(node->size());
      for (auto& v : x) v = N(rng);
      if (app == "lasso-col") x[x.size() - 1] = std::abs(x[x.size() - 1]) + 0.5;
      Vec fd = solvers::finite_difference_gradient([&](const Vec& z) { return node->value(z); }, x);
      Vec g = node->gradient(x);
      CHECK((g - fd).norm() <= 1e-5 * std::max(1.0, g.norm()));
    }
  }
}

TEST_CASE("oracle output beats random perturbations") {
  for (const auto& app : kApps) {
    CAPTURE(app);
    auto s = small_setup(app);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> N;
    std::uniform_real_distribution<double> U(0.5, 2.0);
    for (std::size_t p = 0; p < s.instance.nodes.size(); p += 2) {
      auto& node = *s.instance.nodes[p];
      Vec v(node.size()), w(node.size());
      for (int i = 0; i < node.size(); ++i) {
        v[i] = N(rng);
        w[i] = U(rng);
      }
      Vec z = node.solve(v, w);
      auto F = [&](const Vec& x) { return node.value(x) + v.dot(x) + 0.5 * x.cwiseProduct(x).dot(w); };
      double fz = F(z);
      REQUIRE(std::isfinite(fz));
      int worse = 0;
      for (int k = 0; k < 1000; ++k) {
        Vec d(node.size());
        for (auto& e : d) e = N(rng);
        worse += F(z + 1e-3 * d / d.norm()) < fz - 1e-9 * (1 + std::abs(fz)) ? 1 : 0;
      }
      CHECK(worse == 0);
    }
  }
}

TEST_CASE("reference objective is not beaten by averaged oracle points") {
  for (std::string app : {"consensus", "bpdn-row", "svm", "flow1", "dmpc-connected"}) {
    CAPTURE(app);
    auto s = small_setup(app);
    double f = s.instance.objective(s.instance.x_ref);
    CHECK(f == doctest::Approx(s.instance.f_ref).epsilon(1e-9));
    std::mt19937_64 rng(3);
    std::normal_distribution<double> N;
    for (int k = 0; k < 20; ++k) {
      Vec x = s.instance.x_ref;
      for (auto& e : x) e += 1e-2 * N(rng);
      CHECK(s.instance.objective(x) >= f - 1e-9 * (1 + std::abs(f)));
    }
  }
}

TEST_CASE("data helpers") {
  auto sys = gaussian_sparse(7, 11, 2, 0.0, 1);
  CHECK((sys.A * sys.x0 - sys.b).norm() < 1e-12);
  CHECK((sys.x0.array() != 0).count() == 2);
  auto rows = split_rows(sys.A, sys.b, 3);
  CHECK(rows.A[0].rows() == 3);
  CHECK(rows.A[2].rows() == 2);
  CHECK(stack_rows(rows) == sys.A);
  CHECK(stack_rhs(rows) == sys.b);
  auto cols = split_columns(sys.A, sys.b, 3);
  CHECK(cols.offset == std::vector<int>{0, 4, 8});
  CHECK(join_columns(cols) == sys.A);

  std::stringstream ss;
  write_matrix(sys.A, ss);
  CHECK(read_matrix(ss) == sys.A);
  std::stringstream bad("2 2\n1 2 3\n");
  CHECK_THROWS(read_matrix(bad));
  CHECK(parse_metric(metric_name(ErrorMetric::SingleNode)) == ErrorMetric::SingleNode);
}
