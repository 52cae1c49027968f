#include <algorithm>
#include <cmath>
#include <limits>

#include "dopt/errors.hpp"
#include "dopt/problems/builders.hpp"
#include "internal.hpp"

namespace dopt::problems {

namespace {

// Maximal-violating-pair SMO for min 1/2 a'Qa - 1'a, 0 <= a <= C, y'a = 0.
// converged reports that the KKT violation fell below tol.
Vec smo_dual(const Mat& Q, const Vec& y, double C, double tol, long max_iterations, bool* converged) {
  const Eigen::Index K = y.size();
  Vec a = Vec::Zero(K);
  Vec G = Vec::Constant(K, -1.0);
  *converged = false;
  for (long it = 0; it < max_iterations; ++it) {
    Eigen::Index i = -1, j = -1;
    double up = -std::numeric_limits<double>::infinity(), low = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < K; ++t) {
      double v = -y[t] * G[t];
      bool in_up = y[t] > 0 ? a[t] < C : a[t] > 0;
      bool in_low = y[t] > 0 ? a[t] > 0 : a[t] < C;
      if (in_up && v > up) {
        up = v;
        i = t;
      }
      if (in_low && v < low) {
        low = v;
        j = t;
      }
    }
    if (i < 0 || j < 0 || up - low <= tol) {
      *converged = true;
      break;
    }
    double ai = a[i], aj = a[j];
    if (y[i] != y[j]) {
      double quad = std::max(Q(i, i) + Q(j, j) + 2 * Q(i, j), 1e-12);
      double step = (-G[i] - G[j]) / quad;
      double diff = ai - aj;
      a[i] += step;
      a[j] += step;
      if (diff > 0) {
        if (a[j] < 0) {
          a[j] = 0;
          a[i] = diff;
        }
      } else if (a[i] < 0) {
        a[i] = 0;
        a[j] = -diff;
      }
      if (diff > 0) {
        if (a[i] > C) {
          a[i] = C;
          a[j] = C - diff;
        }
      } else if (a[j] > C) {
        a[j] = C;
        a[i] = C + diff;
      }
    } else {
      double quad = std::max(Q(i, i) + Q(j, j) - 2 * Q(i, j), 1e-12);
      double step = (G[i] - G[j]) / quad;
      double sum = ai + aj;
      a[i] -= step;
      a[j] += step;
      if (sum > C) {
        if (a[i] > C) {
          a[i] = C;
          a[j] = sum - C;
        }
        if (a[j] > C) {
          a[j] = C;
          a[i] = sum - C;
        }
      } else {
        if (a[j] < 0) {
          a[j] = 0;
          a[i] = sum;
        }
        if (a[i] < 0) {
          a[i] = 0;
          a[j] = sum;
        }
      }
    }
    G += Q.col(i) * (a[i] - ai) + Q.col(j) * (a[j] - aj);
  }
  return a;
}

// Rows g_k = y_k [x_k; -1], so that y_k (s'x_k - r) = g_k' q.
Mat margin_rows(const Mat& X, const Vec& y, const std::vector<int>& idx) {
  Mat G(idx.size(), X.cols() + 1);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    G.row(k).head(X.cols()) = y[idx[k]] * X.row(idx[k]);
    G(k, X.cols()) = -y[idx[k]];
  }
  return G;
}

double hinge_sum(const Mat& G, const Vec& q) {
  return (Vec::Ones(G.rows()) - G * q).cwiseMax(0.0).sum();
}

class SvmNode final : public LocalObjective {
 public:
  SvmNode(Mat G, double beta, int P)
      : LocalObjective(detail::iota_support(static_cast<int>(G.cols()))),
        G_(std::move(G)), beta_(beta), P_(P), alpha_(Vec::Zero(G_.rows())) {}

  Vec solve(const Vec& v, const Vec& w) override {
    Eigen::Index d = G_.cols() - 1;
    Vec Dinv(G_.cols());
    Dinv.head(d) = (w.head(d).array() + 1.0 / P_).inverse().matrix();
    Dinv[d] = 1.0 / w[d];
    // Dual coordinate descent on the box QP: max sum a - 1/2 u'Dinv u, u = G'a - v, 0 <= a <= beta.
    Vec u = G_.transpose() * alpha_ - v;
    Vec diag = G_.cwiseAbs2() * Dinv;
    const auto opts = detail::inner_options();
    const int sweeps = 50 * opts.max_iterations;
    bool done = false;
    for (int it = 0; it < sweeps && !done; ++it) {
      double worst = 0.0;
      for (Eigen::Index k = 0; k < G_.rows(); ++k) {
        double g = G_.row(k).dot(Dinv.cwiseProduct(u)) - 1.0;
        double a = std::clamp(alpha_[k] - g / diag[k], 0.0, beta_);
        double step = a - alpha_[k];
        worst = std::max(worst, std::abs(step) * diag[k]);
        if (step != 0.0) {
          u += step * G_.row(k).transpose();
          alpha_[k] = a;
        }
      }
      done = worst <= opts.tolerance;
    }
    note(!done);
    return Dinv.cwiseProduct(G_.transpose() * alpha_ - v);
  }
  double value(const Vec& q) const override {
    Eigen::Index d = G_.cols() - 1;
    return q.head(d).squaredNorm() / (2.0 * P_) + beta_ * hinge_sum(G_, q);
  }
  void reset() override { alpha_.setZero(); }

 private:
  Mat G_;
  double beta_;
  int P_;
  Vec alpha_;
};

}  // namespace

std::vector<std::vector<int>> assign_points(int K, int P) {
  if (K < P) throw ArgumentError("every node needs at least one point");
  std::vector<std::vector<int>> a(P);
  for (int k = 0; k < K; ++k) a[k % P].push_back(k);
  return a;
}

ProblemInstance build_svm(const netgraph::Graph& g, const Mat& points, const Vec& labels, double beta,
                          const std::vector<std::vector<int>>& assignment) {
  if (!(beta > 0)) throw ArgumentError("svm needs beta > 0");
  if (points.rows() != labels.size()) throw ArgumentError("svm needs one label per point");
  int P = g.node_count();
  if (static_cast<int>(assignment.size()) != P) throw ArgumentError("svm assignment needs one entry per node");
  for (const auto& a : assignment) {
    if (a.empty()) throw ArgumentError("svm node without points");
    for (int k : a)
      if (k < 0 || k >= points.rows()) throw ArgumentError("svm point index out of range");
  }
  int d = static_cast<int>(points.cols());
  ProblemInstance inst;
  inst.application = "svm";
  inst.params["beta"] = beta;
  detail::finish_global(inst, g, d + 1);
  for (int p = 0; p < P; ++p)
    inst.nodes.push_back(std::make_unique<SvmNode>(margin_rows(points, labels, assignment[p]), beta, P));

  // Centralized dual: min 1/2 ||sum a_k y_k x_k||^2 - sum a_k, 0 <= a <= beta, y'a = 0.
  // Duplicated points count once per holder, as in the sum of node functions.
  std::vector<int> all;
  for (const auto& a : assignment) all.insert(all.end(), a.begin(), a.end());
  Mat Xa(all.size(), d);
  Vec ya(all.size());
  for (std::size_t k = 0; k < all.size(); ++k) {
    Xa.row(k) = points.row(all[k]);
    ya[k] = labels[all[k]];
  }
  Mat Z = ya.asDiagonal() * Xa;
  Vec alpha = smo_dual(Z * Z.transpose(), ya, beta, 1e-11, 1000000, &inst.reference_confident);
  Vec s = Z.transpose() * alpha;

  // Bias: minimize the hinge sum over r exactly by scanning breakpoints.
  Mat G = margin_rows(Xa, ya, detail::iota_support(static_cast<int>(all.size())));
  Vec q(d + 1);
  q.head(d) = s;
  double best_r = 0.0, best = std::numeric_limits<double>::infinity();
  std::vector<double> cand;
  for (std::size_t k = 0; k < all.size(); ++k) cand.push_back(Xa.row(k).dot(s) - ya[k]);
  std::sort(cand.begin(), cand.end());
  for (double c : cand) {
    q[d] = c;
    double h = hinge_sum(G, q);
    if (h < best - 1e-12 * std::max(1.0, std::abs(best))) {
      best = h;
      best_r = c;
    }
  }
  // Free support vectors pin r when they exist.
  double acc = 0.0;
  int free = 0;
  for (std::size_t k = 0; k < all.size(); ++k)
    if (alpha[k] > 1e-7 * beta && alpha[k] < beta * (1 - 1e-7)) {
      acc += Xa.row(k).dot(s) - ya[k];
      ++free;
    }
  q[d] = free > 0 ? acc / free : best_r;
  inst.x_ref = q;
  inst.f_ref = inst.objective(q);
  inst.metric = ErrorMetric::SingleNode;
  return inst;
}

}  // namespace dopt::problems
