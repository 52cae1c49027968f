#include <cmath>
#include <limits>

#include "dopt/errors.hpp"
#include "dopt/problems/builders.hpp"
#include "internal.hpp"

namespace dopt::problems {

using solvers::soft_threshold;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dead_zone_sq(const Vec& eta, double level) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    double e = std::abs(eta[i]) - level;
    if (e > 0) s += e * e;
  }
  return s;
}

// Shared pieces of the smooth column-dual nodes: f(lambda) with gradient, solved by BB.
class SmoothColumnNode : public LocalObjective {
 public:
  SmoothColumnNode(Mat A, Vec b, int P, double delta)
      : LocalObjective(detail::iota_support(static_cast<int>(A.rows()))),
        A_(std::move(A)), b_(std::move(b)), P_(P), delta_(delta), warm_(Vec::Zero(A_.rows())) {}

  virtual double eval(const Vec& lam, Vec& g) const = 0;

  Vec solve(const Vec& v, const Vec& w) override {
    auto F = [&](const Vec& lam, Vec& g) {
      double f = eval(lam, g);
      g += v + w.cwiseProduct(lam);
      return f + v.dot(lam) + 0.5 * lam.cwiseProduct(lam).dot(w);
    };
    auto r = solvers::bb_gradient(F, {}, warm_, detail::inner_options());
    note(r.truncated);
    warm_ = r.x;
    return warm_;
  }
  double value(const Vec& lam) const override {
    Vec g;
    return eval(lam, g);
  }
  bool smooth() const override { return true; }
  Vec gradient(const Vec& lam) const override {
    Vec g;
    eval(lam, g);
    return g;
  }
  void reset() override { warm_.setZero(); }

 protected:
  Mat A_;
  Vec b_;
  int P_;
  double delta_;
  Vec warm_;
};

class BpColNode final : public SmoothColumnNode {
 public:
  using SmoothColumnNode::SmoothColumnNode;
  double eval(const Vec& lam, Vec& g) const override {
    Vec eta = A_.transpose() * lam;
    g = A_ * soft_threshold(eta, 1.0) / delta_ - b_ / P_;
    return dead_zone_sq(eta, 1.0) / (2 * delta_) - b_.dot(lam) / P_;
  }
};

class BpdnColNode final : public SmoothColumnNode {
 public:
  BpdnColNode(Mat A, Vec b, int P, double delta, double beta)
      : SmoothColumnNode(std::move(A), std::move(b), P, delta), beta_(beta) {}
  double eval(const Vec& lam, Vec& g) const override {
    Vec eta = A_.transpose() * lam;
    double c = 1.0 / ((2.0 + delta_) * P_);
    g = A_ * soft_threshold(eta, beta_) / delta_ - b_ / P_ + 2 * c * lam;
    return dead_zone_sq(eta, beta_) / (2 * delta_) - b_.dot(lam) / P_ + c * lam.squaredNorm();
  }
  std::optional<double> modulus() const override { return 2.0 / ((2.0 + delta_) * P_); }

 private:
  double beta_;
};

// h*(A'lambda) + (sigma/P)||lambda|| - b'lambda/P, solved on the epigraph of the norm.
class RlassoColNode final : public LocalObjective {
 public:
  RlassoColNode(Mat A, Vec b, int P, double delta, double sigma)
      : LocalObjective(detail::iota_support(static_cast<int>(A.rows()))),
        A_(std::move(A)), b_(std::move(b)), P_(P), delta_(delta), sigma_(sigma),
        lip_(detail::spectral_norm_sq(A_) / delta), warm_(Vec::Zero(A_.rows() + 1)) {}

  Vec solve(const Vec& v, const Vec& w) override {
    Eigen::Index m = A_.rows();
    auto F = [&](const Vec& z, Vec& g) {
      Vec lam = z.head(m);
      Vec eta = A_.transpose() * lam;
      g.resize(m + 1);
      g.head(m) = A_ * soft_threshold(eta, 1.0) / delta_ - b_ / P_ + v + w.cwiseProduct(lam);
      g[m] = sigma_ / P_;
      return dead_zone_sq(eta, 1.0) / (2 * delta_) - b_.dot(lam) / P_ + v.dot(lam) +
             0.5 * lam.cwiseProduct(lam).dot(w) + sigma_ / P_ * z[m];
    };
    auto proj = [](Vec& z) { z = solvers::project_lorenz(z); };
    auto opts = detail::inner_options();
    opts.restart = true;
    auto r = solvers::fista(F, lip_ + w.maxCoeff(), proj, warm_, opts);
    note(r.truncated);
    warm_ = r.x;
    return warm_.head(m);
  }
  double value(const Vec& lam) const override {
    Vec eta = A_.transpose() * lam;
    return dead_zone_sq(eta, 1.0) / (2 * delta_) + sigma_ / P_ * lam.norm() - b_.dot(lam) / P_;
  }
  void reset() override { warm_.setZero(); }

 private:
  Mat A_;
  Vec b_;
  int P_;
  double delta_, sigma_, lip_;
  Vec warm_;
};

// Variable (lambda, mu): (gamma mu - b'lambda + g*(lambda))/P + sum (|eta_i| - mu)_+^2/delta, mu >= 0.
class LassoColNode final : public LocalObjective {
 public:
  LassoColNode(Mat A, Vec b, int P, double delta, double gamma)
      : LocalObjective(detail::iota_support(static_cast<int>(A.rows() + 1))),
        A_(std::move(A)), b_(std::move(b)), P_(P), delta_(delta), gamma_(gamma),
        warm_(Vec::Zero(A_.rows() + 1)) {}

  double eval(const Vec& z, Vec& g) const {
    Eigen::Index m = A_.rows();
    Vec lam = z.head(m);
    double mu = z[m];
    Vec eta = A_.transpose() * lam;
    Vec x = 2.0 / delta_ * soft_threshold(eta, std::max(mu, 0.0));
    g.resize(m + 1);
    g.head(m) = (conjugate_l2_quad_argmax(lam, delta_) - b_) / P_ + A_ * x;
    g[m] = gamma_ / P_ - x.lpNorm<1>();
    return (gamma_ * mu - b_.dot(lam) + conjugate_l2_quad(lam, delta_)) / P_ +
           dead_zone_sq(eta, std::max(mu, 0.0)) / delta_;
  }

  Vec solve(const Vec& v, const Vec& w) override {
    auto F = [&](const Vec& z, Vec& g) {
      double f = eval(z, g);
      g += v + w.cwiseProduct(z);
      return f + v.dot(z) + 0.5 * z.cwiseProduct(z).dot(w);
    };
    Eigen::Index m = A_.rows();
    auto proj = [m](Vec& z) { z[m] = std::max(z[m], 0.0); };
    auto r = solvers::bb_gradient(F, proj, warm_, detail::inner_options());
    note(r.truncated);
    warm_ = r.x;
    return warm_;
  }
  double value(const Vec& z) const override {
    if (z[A_.rows()] < 0) return kInf;
    Vec g;
    return eval(z, g);
  }
  bool smooth() const override { return true; }
  Vec gradient(const Vec& z) const override {
    Vec g;
    eval(z, g);
    return g;
  }
  void reset() override { warm_.setZero(); }

 private:
  Mat A_;
  Vec b_;
  int P_;
  double delta_, gamma_;
  Vec warm_;
};

void check_columns(const netgraph::Graph& g, const ColumnData& data, double delta) {
  if (!(delta > 0)) throw ArgumentError("regularization delta must be positive");
  if (static_cast<int>(data.A.size()) != g.node_count() || data.offset.size() != data.A.size())
    throw ArgumentError("column data needs one block per node");
  for (const auto& a : data.A)
    if (a.rows() != data.b.size() || a.cols() < 1) throw ArgumentError("column blocks have inconsistent shapes");
}

// Concatenates per-node recovered blocks.
template <class Recover>
std::function<Vec(const Estimates&)> column_report(const ColumnData& data, Recover rec) {
  Eigen::Index n = 0;
  for (const auto& a : data.A) n += a.cols();
  return [data, rec, n](const Estimates& est) {
    Vec x(n);
    for (std::size_t p = 0; p < data.A.size(); ++p)
      x.segment(data.offset[p], data.A[p].cols()) = rec(p, est[p]);
    return x;
  };
}

}  // namespace

Vec recover_primal_soft(const Vec& lambda, const Mat& Ap, double delta) {
  if (!(delta > 0)) throw ArgumentError("recover_primal_soft needs delta > 0");
  return soft_threshold(Ap.transpose() * lambda, 1.0) / delta;
}

double conjugate_l2_quad(const Vec& eta, double delta) {
  if (!(delta > 0)) throw ArgumentError("conjugate needs delta > 0");
  double r = eta.norm();
  if (r <= 1.0) return 0.0;
  return (r * r - 2 * r + 1) / (2 * delta);
}

Vec conjugate_l2_quad_argmax(const Vec& eta, double delta) {
  if (!(delta > 0)) throw ArgumentError("conjugate needs delta > 0");
  double r = eta.norm();
  if (r <= 1.0) return Vec::Zero(eta.size());
  return (1.0 - 1.0 / r) / delta * eta;
}

double conjugate_l1_quad(const Vec& eta, double level, double delta) {
  if (!(delta > 0) || level < 0) throw ArgumentError("conjugate needs delta > 0 and level >= 0");
  return dead_zone_sq(eta, level) / (2 * delta);
}

ProblemInstance build_bp_col_dual(const netgraph::Graph& g, const ColumnData& data, double delta) {
  check_columns(g, data, delta);
  int P = g.node_count();
  int m = static_cast<int>(data.b.size());
  ProblemInstance inst;
  inst.application = "bp-col";
  inst.params["delta"] = delta;
  detail::finish_global(inst, g, m);
  for (int p = 0; p < P; ++p) inst.nodes.push_back(std::make_unique<BpColNode>(data.A[p], data.b, P, delta));
  Mat A = join_columns(data);
  Vec lam;
  inst.report_ref = detail::regularized_bp(A, data.b, delta, &lam);
  inst.x_ref = lam;
  inst.reference_confident = (A * inst.report_ref - data.b).lpNorm<Eigen::Infinity>() < 1e-9;
  inst.f_ref = inst.objective(lam);
  inst.report = column_report(data, [data, delta](std::size_t p, const Vec& l) {
    return recover_primal_soft(l, data.A[p], delta);
  });
  inst.metric = ErrorMetric::Concat2;
  return inst;
}

ProblemInstance build_bpdn_col_dual(const netgraph::Graph& g, const ColumnData& data, double beta, double delta) {
  check_columns(g, data, delta);
  if (!(beta > 0)) throw ArgumentError("bpdn needs beta > 0");
  int P = g.node_count();
  int m = static_cast<int>(data.b.size());
  ProblemInstance inst;
  inst.application = "bpdn-col";
  inst.params["beta"] = beta;
  inst.params["delta"] = delta;
  detail::finish_global(inst, g, m);
  for (int p = 0; p < P; ++p)
    inst.nodes.push_back(std::make_unique<BpdnColNode>(data.A[p], data.b, P, delta, beta));
  Mat A = join_columns(data);
  const Vec& b = data.b;
  auto F = [&](const Vec& lam, Vec& gr) {
    Vec eta = A.transpose() * lam;
    gr = A * soft_threshold(eta, beta) / delta - b + 2.0 / (2.0 + delta) * lam;
    return dead_zone_sq(eta, beta) / (2 * delta) - b.dot(lam) + lam.squaredNorm() / (2.0 + delta);
  };
  auto r = solvers::bb_gradient(F, {}, Vec::Zero(m), detail::reference_options());
  inst.x_ref = r.x;
  inst.reference_confident = !r.truncated;
  inst.f_ref = inst.objective(r.x);
  inst.report_ref = soft_threshold(A.transpose() * r.x, beta) / delta;
  inst.report = column_report(data, [data, beta, delta](std::size_t p, const Vec& l) {
    return Vec(soft_threshold(data.A[p].transpose() * l, beta) / delta);
  });
  inst.metric = ErrorMetric::Concat2;
  return inst;
}

ProblemInstance build_rlasso_col_dual(const netgraph::Graph& g, const ColumnData& data, double sigma, double delta) {
  check_columns(g, data, delta);
  if (sigma < 0) throw ArgumentError("reversed lasso needs sigma >= 0");
  int P = g.node_count();
  int m = static_cast<int>(data.b.size());
  ProblemInstance inst;
  inst.application = "rlasso-col";
  inst.params["sigma"] = sigma;
  inst.params["delta"] = delta;
  detail::finish_global(inst, g, m);
  for (int p = 0; p < P; ++p)
    inst.nodes.push_back(std::make_unique<RlassoColNode>(data.A[p], data.b, P, delta, sigma));
  Mat A = join_columns(data);
  const Vec& b = data.b;
  auto F = [&](const Vec& z, Vec& gr) {
    Vec lam = z.head(m);
    Vec eta = A.transpose() * lam;
    gr.resize(m + 1);
    gr.head(m) = A * soft_threshold(eta, 1.0) / delta - b;
    gr[m] = sigma;
    return dead_zone_sq(eta, 1.0) / (2 * delta) - b.dot(lam) + sigma * z[m];
  };
  auto proj = [](Vec& z) { z = solvers::project_lorenz(z); };
  auto opts = detail::reference_options();
  opts.max_iterations = 400000;
  auto r = solvers::fista(F, detail::spectral_norm_sq(A) / delta, proj, Vec::Zero(m + 1), opts);
  inst.x_ref = r.x.head(m);
  inst.reference_confident = !r.truncated;
  inst.f_ref = inst.objective(inst.x_ref);
  inst.report_ref = recover_primal_soft(inst.x_ref, A, delta);
  inst.report = column_report(data, [data, delta](std::size_t p, const Vec& l) {
    return recover_primal_soft(l, data.A[p], delta);
  });
  inst.metric = ErrorMetric::Concat2;
  return inst;
}

ProblemInstance build_lasso_col_dual(const netgraph::Graph& g, const ColumnData& data, double gamma, double delta) {
  check_columns(g, data, delta);
  if (!(gamma > 0)) throw ArgumentError("lasso needs gamma > 0");
  int P = g.node_count();
  int m = static_cast<int>(data.b.size());
  ProblemInstance inst;
  inst.application = "lasso-col";
  inst.params["gamma"] = gamma;
  inst.params["delta"] = delta;
  detail::finish_global(inst, g, m + 1);
  for (int p = 0; p < P; ++p)
    inst.nodes.push_back(std::make_unique<LassoColNode>(data.A[p], data.b, P, delta, gamma));
  Mat A = join_columns(data);
  const Vec& b = data.b;
  auto F = [&](const Vec& z, Vec& gr) {
    Vec lam = z.head(m);
    double mu = std::max(z[m], 0.0);
    Vec eta = A.transpose() * lam;
    Vec x = 2.0 / delta * soft_threshold(eta, mu);
    gr.resize(m + 1);
    gr.head(m) = conjugate_l2_quad_argmax(lam, delta) - b + A * x;
    gr[m] = gamma - x.lpNorm<1>();
    return gamma * mu - b.dot(lam) + conjugate_l2_quad(lam, delta) + dead_zone_sq(eta, mu) / delta;
  };
  auto proj = [m](Vec& z) { z[m] = std::max(z[m], 0.0); };
  auto r = solvers::bb_gradient(F, proj, Vec::Zero(m + 1), detail::reference_options());
  inst.x_ref = r.x;
  inst.reference_confident = !r.truncated;
  inst.f_ref = inst.objective(r.x);
  inst.report_ref = 2.0 / delta * soft_threshold(A.transpose() * r.x.head(m), r.x[m]);
  inst.report = column_report(data, [data, delta, m](std::size_t p, const Vec& z) {
    return Vec(2.0 / delta * soft_threshold(data.A[p].transpose() * z.head(m), std::max(z[m], 0.0)));
  });
  inst.metric = ErrorMetric::Concat2;
  return inst;
}

}  // namespace dopt::problems
