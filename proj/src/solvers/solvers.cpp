#include "dopt/solvers/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include "dopt/errors.hpp"

namespace dopt::solvers {

namespace {

void apply(const Projection& proj, Vec& x) {
  if (proj) proj(x);
}

double sup_norm(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

SolverResult bb_gradient(const ValueGrad& f, const Projection& proj, Vec start, const SolverOptions& opts) {
  if (opts.max_iterations < 1 || opts.tolerance < 0) throw ArgumentError("invalid solver options");
  SolverResult r;
  Vec x = std::move(start);
  apply(proj, x);
  Vec g(x.size()), gn(x.size());
  double fx = f(x, g);
  if (!std::isfinite(fx) || !g.allFinite()) throw NumericalError("bb_gradient: non-finite start");

  auto residual = [&](const Vec& xx, const Vec& gg) {
    Vec t = xx - gg;
    apply(proj, t);
    return sup_norm(t - xx);
  };
  std::deque<double> hist{fx};
  double res = residual(x, g);
  double alpha = std::clamp(res > 0 ? 1.0 / res : 1.0, opts.step_min, opts.step_max);
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    if (res <= opts.tolerance) break;
    Vec d = x - alpha * g;
    apply(proj, d);
    d -= x;
    double gd = g.dot(d);
    double fmax = *std::max_element(hist.begin(), hist.end());
    // Decreases below rounding of f cannot be seen.
    double slack = 8 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(fmax));
    double lam = 1.0;
    Vec xn;
    double fn = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x + lam * d;
      fn = f(xn, gn);
      if (std::isfinite(fn) && gn.allFinite() && fn <= fmax + 1e-4 * lam * gd + slack) {
        accepted = true;
        break;
      }
      lam *= 0.5;
    }
    if (!accepted) break;
    Vec s = xn - x;
    Vec y = gn - g;
    double sy = s.dot(y);
    if (sy <= 0)
      alpha = opts.step_max;
    else
      alpha = (it % 2 == 0) ? s.squaredNorm() / sy : sy / y.squaredNorm();
    alpha = std::clamp(alpha, opts.step_min, opts.step_max);
    x = std::move(xn);
    fx = fn;
    g = gn;
    hist.push_back(fx);
    if (static_cast<int>(hist.size()) > opts.bb_window) hist.pop_front();
    res = residual(x, g);
  }
  r.x = std::move(x);
  r.value = fx;
  r.residual = res;
  r.iterations = it;
  r.truncated = res > opts.tolerance;
  return r;
}

SolverResult fista(const ValueGrad& f, double L, const Projection& proj, Vec start, const SolverOptions& opts) {
  Prox prox;
  if (proj) prox = [&](Vec& x, double) { proj(x); };
  return fista_prox(f, L, prox, std::move(start), opts);
}

SolverResult fista_prox(const ValueGrad& f, double L, const Prox& prox, Vec start, const SolverOptions& opts) {
  if (!(L > 0)) throw ArgumentError("fista needs L > 0");
  if (opts.max_iterations < 1 || opts.tolerance < 0) throw ArgumentError("invalid solver options");
  auto step = [&](Vec& x) {
    if (prox) prox(x, 1.0 / L);
  };
  SolverResult r;
  Vec x = std::move(start);
  step(x);
  Vec y = x;
  Vec g(x.size());
  double res = std::numeric_limits<double>::infinity();
  int it = 1, k = 1;
  for (; it <= opts.max_iterations; ++it, ++k) {
    double fy = f(y, g);
    if (!std::isfinite(fy) || !g.allFinite()) throw NumericalError("fista: non-finite objective or gradient");
    Vec xn = y - g / L;
    step(xn);
    res = L * sup_norm(xn - y);
    if (res <= opts.tolerance) {
      x = std::move(xn);
      break;
    }
    if (opts.restart && (y - xn).dot(xn - x) > 0) {
      k = 0;
      y = xn;
    } else {
      y = xn + fista_momentum(k) * (xn - x);
    }
    x = std::move(xn);
  }
  r.value = f(x, g);
  r.x = std::move(x);
  r.residual = res;
  r.iterations = std::min(it, opts.max_iterations);
  r.truncated = res > opts.tolerance;
  return r;
}

double soft_threshold(double u, double level) {
  if (level < 0) throw ArgumentError("soft_threshold needs level >= 0");
  if (u > level) return u - level;
  if (u < -level) return u + level;
  return 0.0;
}

Vec soft_threshold(const Vec& u, double level) {
  Vec out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = soft_threshold(u[i], level);
  return out;
}

Vec soft_threshold(const Vec& u, const Vec& level) {
  Vec out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = soft_threshold(u[i], level[i]);
  return out;
}

Vec project_l1_ball(const Vec& x, double gamma) {
  if (!(gamma > 0)) throw ArgumentError("project_l1_ball needs gamma > 0");
  if (x.lpNorm<1>() <= gamma) return x;
  std::vector<double> u(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) u[i] = std::abs(x[i]);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cum += u[k];
    double t = (cum - gamma) / static_cast<double>(k + 1);
    if (u[k] > t) theta = t;
  }
  return soft_threshold(x, std::max(theta, 0.0));
}

Vec project_lorenz(const Vec& z) {
  if (z.size() < 1) throw ArgumentError("project_lorenz needs a nonempty point");
  Eigen::Index m = z.size() - 1;
  double t = z[m];
  double nl = z.head(m).norm();
  if (nl <= t) return z;
  if (nl <= -t) return Vec::Zero(z.size());
  double a = 0.5 * (t + nl);
  Vec out(z.size());
  out.head(m) = (a / nl) * z.head(m);
  out[m] = a;
  return out;
}

Vec project_box_hyperplane(const Vec& y, const Vec& lo, const Vec& hi, const Vec& b, double d) {
  Eigen::Index n = y.size();
  if (lo.size() != n || hi.size() != n || b.size() != n) throw ArgumentError("project_box_hyperplane: size mismatch");
  for (Eigen::Index i = 0; i < n; ++i)
    if (lo[i] > hi[i]) throw NumericalError("project_box_hyperplane: empty box");
  auto at = [&](double nu) {
    Vec z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = std::clamp(y[i] - nu * b[i], lo[i], hi[i]);
    return z;
  };
  double tol = 1e-12 * std::max(1.0, std::abs(d));
  double gmax = 0.0, gmin = 0.0;
  Vec zmax(n), zmin(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (b[i] > 0) {
      zmax[i] = hi[i];
      zmin[i] = lo[i];
    } else if (b[i] < 0) {
      zmax[i] = lo[i];
      zmin[i] = hi[i];
    } else {
      zmax[i] = zmin[i] = std::clamp(y[i], lo[i], hi[i]);
    }
    gmax += b[i] * zmax[i];
    gmin += b[i] * zmin[i];
  }
  if (d > gmax + tol || d < gmin - tol) throw NumericalError("project_box_hyperplane: infeasible set");
  if (std::abs(d - gmax) <= tol && std::isfinite(gmax)) return zmax;
  if (std::abs(d - gmin) <= tol && std::isfinite(gmin)) return zmin;

  double a = -1.0, c = 1.0;
  while (b.dot(at(a)) < d) {
    a *= 2;
    if (!std::isfinite(a)) throw NumericalError("project_box_hyperplane: bracket failed");
  }
  while (b.dot(at(c)) > d) {
    c *= 2;
    if (!std::isfinite(c)) throw NumericalError("project_box_hyperplane: bracket failed");
  }
  Vec z = at(0.5 * (a + c));
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (a + c);
    z = at(mid);
    double gv = b.dot(z);
    if (std::abs(gv - d) <= tol) break;
    if (gv > d)
      a = mid;
    else
      c = mid;
    if (c - a <= 1e-15 * std::max(1.0, std::abs(mid))) break;
  }
  // Exact solve on the active pattern of the final bracket.
  double mid = 0.5 * (a + c);
  double num = -d, den = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double t = y[i] - mid * b[i];
    if (t > lo[i] && t < hi[i]) {
      num += b[i] * y[i];
      den += b[i] * b[i];
    } else {
      num += b[i] * std::clamp(t, lo[i], hi[i]);
    }
  }
  if (den > 0) {
    Vec z2 = at(num / den);
    if (std::abs(b.dot(z2) - d) < std::abs(b.dot(z) - d)) z = std::move(z2);
  }
  return z;
}

Vec finite_difference_gradient(const std::function<double(const Vec&)>& f, const Vec& x) {
  Vec g(x.size());
  Vec t = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double h = 1e-6 * (1.0 + std::abs(x[i]));
    t[i] = x[i] + h;
    double fp = f(t);
    t[i] = x[i] - h;
    double fm = f(t);
    t[i] = x[i];
    g[i] = (fp - fm) / (2 * h);
  }
  return g;
}

}  // namespace dopt::solvers
