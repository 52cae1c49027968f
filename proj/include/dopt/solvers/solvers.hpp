#pragma once

#include <functional>

#include <Eigen/Dense>

namespace dopt::solvers {

using Vec = Eigen::VectorXd;

struct SolverOptions {
  int max_iterations = 500;
  double tolerance = 1e-10;
  int bb_window = 10;
  double step_min = 1e-12;
  double step_max = 1e12;
  bool restart = false;  // fista: gradient-based momentum restart
};

struct SolverResult {
  Vec x;
  double value = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool truncated = false;
};

// Returns f(x) and writes the gradient into g.
using ValueGrad = std::function<double(const Vec& x, Vec& g)>;
// In-place Euclidean projection; an empty function means no constraint.
using Projection = std::function<void(Vec& x)>;

// Nonmonotone projected gradient with alternating BB1/BB2 steps.
// Residual is the sup-norm of P(x - grad) - x.
SolverResult bb_gradient(const ValueGrad& f, const Projection& proj, Vec start, const SolverOptions& opts = {});

// In-place proximal map of the nonsmooth part for the given step.
using Prox = std::function<void(Vec& x, double step)>;

// Accelerated projected gradient with momentum (k-1)/(k+2), 1-based k.
// Residual is L times the sup-norm of x_{k+1} - y_k.
SolverResult fista(const ValueGrad& f, double L, const Projection& proj, Vec start,
                   const SolverOptions& opts = {});

SolverResult fista_prox(const ValueGrad& f, double L, const Prox& prox, Vec start,
                        const SolverOptions& opts = {});

inline double fista_momentum(int k) { return (k - 1.0) / (k + 2.0); }

double soft_threshold(double u, double level);
Vec soft_threshold(const Vec& u, double level);
Vec soft_threshold(const Vec& u, const Vec& level);

Vec project_l1_ball(const Vec& x, double gamma);

// Projection of (lambda, t) onto {||lambda|| <= t}; the last entry of z is t.
Vec project_lorenz(const Vec& z);

// Projection onto {lo <= y <= hi, b'y = d} by bisection on the multiplier.
// Throws NumericalError when the set is empty.
Vec project_box_hyperplane(const Vec& y, const Vec& lo, const Vec& hi, const Vec& b, double d);

// Central finite-difference gradient with step 1e-6 (1 + |x_i|).
Vec finite_difference_gradient(const std::function<double(const Vec&)>& f, const Vec& x);

}  // namespace dopt::solvers
