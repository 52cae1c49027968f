#include <cmath>
#include <random>

#include "doctest.h"
#include "dopt/errors.hpp"
#include "dopt/solvers/solvers.hpp"

using namespace dopt::solvers;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

}  // namespace

TEST_CASE("soft threshold") {
  CHECK(soft_threshold(0.0, 1.0) == 0.0);
  CHECK(soft_threshold(2.0, 1.0) == 1.0);
  CHECK(soft_threshold(-0.5, 1.0) == 0.0);
  CHECK(soft_threshold(-3.0, 1.0) == -2.0);
  CHECK(soft_threshold(vec({3, -3, 0.2}), vec({1, 2, 1})).isApprox(vec({2, -1, 0})));
}

TEST_CASE("l1 ball projection") {
  CHECK(project_l1_ball(vec({0.2, -0.3}), 1.0) == vec({0.2, -0.3}));
  CHECK(project_l1_ball(vec({3, 0}), 1.0).isApprox(vec({1, 0})));
  CHECK(project_l1_ball(vec({2, 2}), 2.0).isApprox(vec({1, 1})));
  // KKT: x = soft(y, t) with ||x||_1 = gamma for some t > 0.
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 50; ++trial) {
    Vec y(20);
    for (auto& v : y) v = 3.0 * N(rng);
    Vec x = project_l1_ball(y, 2.0);
    CHECK(x.lpNorm<1>() == doctest::Approx(2.0));
    double t = -1.0;
    for (int i = 0; i < 20; ++i)
      if (x[i] != 0.0) t = std::abs(y[i]) - std::abs(x[i]);
    CHECK((x - soft_threshold(y, t)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("Lorenz cone projection") {
  CHECK(project_lorenz(vec({0.3, 0.4, 1.0})) == vec({0.3, 0.4, 1.0}));
  CHECK(project_lorenz(vec({0, -1})).isApprox(vec({0, 0})));
  CHECK(project_lorenz(vec({3, 0, 1})).isApprox(vec({2, 0, 2})));
  CHECK(project_lorenz(vec({0, 0, -2})).norm() == 0.0);
}

TEST_CASE("box and hyperplane projection") {
  CHECK(project_box_hyperplane(vec({5}), vec({0}), vec({3}), vec({1}), 2.0)[0] == doctest::Approx(2.0).epsilon(1e-10));
  Vec y = vec({1, 1, 1});
  CHECK(project_box_hyperplane(y, vec({0, 0, 0}), vec({2, 2, 2}), vec({1, 1, 1}), 3.0).isApprox(y));
  CHECK_THROWS_AS(project_box_hyperplane(y, vec({0, 0, 0}), vec({1, 1, 1}), vec({1, 1, 1}), 5.0),
                  dopt::NumericalError);
}

TEST_CASE("Barzilai-Borwein gradient") {
  auto half_sq = [](const Vec& x, Vec& g) {
    g = x;
    return 0.5 * x.squaredNorm();
  };
  auto r = bb_gradient(half_sq, {}, vec({3, -4, 7}));
  CHECK(r.x.norm() < 1e-10);
  CHECK(r.iterations <= 5);

  auto shifted = [](const Vec& x, Vec& g) {
    g = x.array() - 3.0;
    return 0.5 * (x.array() - 3.0).square().sum();
  };
  auto box = [](Vec& x) { x = x.cwiseMax(0.0).cwiseMin(1.0); };
  CHECK(bb_gradient(shifted, box, vec({0.5}))
            .x[0] == doctest::Approx(1.0));

  auto bad = [](const Vec& x, Vec& g) {
    g = x;
    return std::nan("");
  };
  CHECK_THROWS_AS(bb_gradient(bad, {}, vec({1})), dopt::NumericalError);
}

TEST_CASE("FISTA on a quadratic with a linear-solve oracle") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> N;
  Eigen::MatrixXd M(12, 8);
  for (int i = 0; i < M.size(); ++i) M.data()[i] = N(rng);
  Eigen::MatrixXd H = M.transpose() * M + 0.1 * Eigen::MatrixXd::Identity(8, 8);
  Vec c(8);
  for (auto& v : c) v = N(rng);
  Vec xstar = H.ldlt().solve(-c);
  auto f = [&](const Vec& x, Vec& g) {
    g = H * x + c;
    return 0.5 * x.dot(H * x) + c.dot(x);
  };
  double L = H.selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff();
  SolverOptions o;
  o.max_iterations = 20000;
  o.tolerance = 1e-12;
  o.restart = true;
  CHECK((fista(f, L, {}, Vec::Zero(8), o).x - xstar).norm() < 1e-8);
  CHECK((fista(f, 2 * L, {}, Vec::Zero(8), o).x - xstar).norm() < 1e-8);
  CHECK(fista_momentum(1) == 0.0);
  CHECK(fista_momentum(4) == doctest::Approx(0.5));
}

TEST_CASE("finite differences") {
  auto f = [](const Vec& x) { return std::sin(x[0]) * x[1] + x[1] * x[1] * x[1]; };
  Vec x = vec({0.3, -1.2});
  Vec g = finite_difference_gradient(f, x);
  CHECK(g[0] == doctest::Approx(std::cos(0.3) * -1.2).epsilon(1e-8));
  CHECK(g[1] == doctest::Approx(std::sin(0.3) + 3 * 1.44).epsilon(1e-8));
}
