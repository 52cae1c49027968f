#include <algorithm>
#include <cmath>
#include <limits>

#include "dopt/errors.hpp"
#include "dopt/problems/builders.hpp"
#include "internal.hpp"

namespace dopt::problems {

using solvers::soft_threshold;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class ConsensusNode final : public LocalObjective {
 public:
  explicit ConsensusNode(double theta) : LocalObjective({0}), theta_(theta) {}
  Vec solve(const Vec& v, const Vec& w) override { return Vec::Constant(1, (theta_ - v[0]) / (1.0 + w[0])); }
  double value(const Vec& x) const override { return 0.5 * (x[0] - theta_) * (x[0] - theta_); }
  bool smooth() const override { return true; }
  Vec gradient(const Vec& x) const override { return Vec::Constant(1, x[0] - theta_); }
  std::optional<double> modulus() const override { return 1.0; }

 private:
  double theta_;
};

// min ||x||_1/P + v'x + 1/2 sum w x^2 s.t. A x = b, through its dual in R^{m_p}.
class BpRowNode final : public LocalObjective {
 public:
  BpRowNode(Mat A, Vec b, double scale)
      : LocalObjective(detail::iota_support(static_cast<int>(A.cols()))),
        A_(std::move(A)), b_(std::move(b)), scale_(scale), lambda_(Vec::Zero(A_.rows())) {}

  Vec solve(const Vec& v, const Vec& w) override {
    auto primal = [&](const Vec& lam) { return Vec(-soft_threshold(v - A_.transpose() * lam, scale_).cwiseQuotient(w)); };
    auto F = [&](const Vec& lam, Vec& g) {
      Vec s = soft_threshold(v - A_.transpose() * lam, scale_);
      Vec x = -s.cwiseQuotient(w);
      g = A_ * x - b_;
      return -b_.dot(lam) + 0.5 * s.cwiseProduct(s).cwiseQuotient(w).sum();
    };
    auto r = solvers::bb_gradient(F, {}, lambda_, detail::inner_options());
    note(r.truncated);
    lambda_ = r.x;
    return primal(lambda_);
  }
  double value(const Vec& x) const override {
    if ((A_ * x - b_).lpNorm<Eigen::Infinity>() > 1e-8 * (1.0 + b_.lpNorm<Eigen::Infinity>())) return kInf;
    return scale_ * x.lpNorm<1>();
  }
  void reset() override { lambda_.setZero(); }

 private:
  Mat A_;
  Vec b_;
  double scale_;
  Vec lambda_;
};

// min 1/2||Ax-b||^2 + (beta/P)||x||_1 + v'x + 1/2 sum w x^2 through the dual in the residual.
class BpdnRowNode final : public LocalObjective {
 public:
  BpdnRowNode(Mat A, Vec b, double level)
      : LocalObjective(detail::iota_support(static_cast<int>(A.cols()))),
        A_(std::move(A)), b_(std::move(b)), level_(level), lambda_(Vec::Zero(A_.rows())) {}

  Vec solve(const Vec& v, const Vec& w) override {
    auto F = [&](const Vec& lam, Vec& g) {
      Vec s = soft_threshold(v + A_.transpose() * lam, level_);
      Vec x = -s.cwiseQuotient(w);
      g = lam + b_ - A_ * x;
      return 0.5 * lam.squaredNorm() + b_.dot(lam) + 0.5 * s.cwiseProduct(s).cwiseQuotient(w).sum();
    };
    auto r = solvers::bb_gradient(F, {}, lambda_, detail::inner_options());
    note(r.truncated);
    lambda_ = r.x;
    return -soft_threshold(v + A_.transpose() * lambda_, level_).cwiseQuotient(w);
  }
  double value(const Vec& x) const override {
    return 0.5 * (A_ * x - b_).squaredNorm() + level_ * x.lpNorm<1>();
  }
  void reset() override { lambda_.setZero(); }

 private:
  Mat A_;
  Vec b_;
  double level_;
  Vec lambda_;
};

// argmin u'x + 1/2 sum w_i x_i^2 subject to ||x||_1 <= gamma, w > 0:
// x_i = -sign(u_i) (|u_i| - mu)_+ / w_i with the smallest feasible mu >= 0.
Vec weighted_ball_argmin(const Vec& u, const Vec& w, double gamma) {
  Eigen::Index n = u.size();
  auto at = [&](double mu) {
    Vec x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = -std::copysign(std::max(std::abs(u[i]) - mu, 0.0), u[i]) / w[i];
    return x;
  };
  Vec x0 = at(0.0);
  if (x0.lpNorm<1>() <= gamma) return x0;
  // phi(mu) = sum (|u_i| - mu)_+ / w_i is piecewise linear; walk the breakpoints downward.
  std::vector<Eigen::Index> idx(n);
  for (Eigen::Index i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return std::abs(u[a]) > std::abs(u[b]); });
  double sa = 0.0, sw = 0.0, mu = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index i = idx[k];
    sa += std::abs(u[i]) / w[i];
    sw += 1.0 / w[i];
    mu = (sa - gamma) / sw;
    double next = k + 1 < n ? std::abs(u[idx[k + 1]]) : 0.0;
    if (mu >= next) break;
  }
  return at(std::max(mu, 0.0));
}

class LassoRowNode final : public LocalObjective {
 public:
  LassoRowNode(Mat A, Vec b, double gamma)
      : LocalObjective(detail::iota_support(static_cast<int>(A.cols()))),
        A_(std::move(A)), b_(std::move(b)), gamma_(gamma), y_(Vec::Zero(A_.rows())) {}

  // Dual over y = A x - b: x(y) minimizes (v + A'y)'x + 1/2 sum w x^2 on the l1 ball.
  Vec solve(const Vec& v, const Vec& w) override {
    auto F = [&](const Vec& y, Vec& g) {
      Vec u = v + A_.transpose() * y;
      Vec x = weighted_ball_argmin(u, w, gamma_);
      g = -(A_ * x - b_ - y);
      return -(u.dot(x) + 0.5 * x.cwiseProduct(x).dot(w) - y.dot(b_) - 0.5 * y.squaredNorm());
    };
    auto r = solvers::bb_gradient(F, {}, y_, detail::inner_options());
    note(r.truncated);
    y_ = r.x;
    return weighted_ball_argmin(v + A_.transpose() * y_, w, gamma_);
  }
  double value(const Vec& x) const override {
    if (x.lpNorm<1>() > gamma_ * (1 + 1e-9)) return kInf;
    return 0.5 * (A_ * x - b_).squaredNorm();
  }
  void reset() override { y_.setZero(); }

 private:
  Mat A_;
  Vec b_;
  double gamma_;
  Vec y_;
};

void check_rows(const netgraph::Graph& g, const RowData& data) {
  if (static_cast<int>(data.A.size()) != g.node_count() || data.b.size() != data.A.size())
    throw ArgumentError("row data needs one block per node");
  Eigen::Index n = data.A.at(0).cols();
  for (std::size_t p = 0; p < data.A.size(); ++p)
    if (data.A[p].cols() != n || data.A[p].rows() != data.b[p].size() || data.A[p].rows() < 1)
      throw ArgumentError("row blocks have inconsistent shapes");
}

}  // namespace

double consensus_prox(double theta, double tau, double eta) { return (tau * theta + eta) / (1.0 + tau); }

ProblemInstance build_consensus(const netgraph::Graph& g, const Vec& theta) {
  if (g.node_count() < 2) throw ArgumentError("consensus needs P >= 2");
  if (theta.size() != g.node_count()) throw ArgumentError("consensus needs one measurement per node");
  ProblemInstance inst;
  inst.application = "consensus";
  detail::finish_global(inst, g, 1);
  for (int p = 0; p < g.node_count(); ++p) {
    inst.nodes.push_back(std::make_unique<ConsensusNode>(theta[p]));
    inst.initial.push_back(Vec::Constant(1, theta[p]));
  }
  inst.x_ref = Vec::Constant(1, theta.mean());
  inst.f_ref = inst.objective(inst.x_ref);
  inst.metric = ErrorMetric::Concat2;
  return inst;
}

namespace detail {

// Regularized BP via its dual; returns x_delta and writes the multiplier.
Vec regularized_bp(const Mat& A, const Vec& b, double delta, Vec* lambda_out) {
  // Continuation from delta = 1 keeps the start out of the flat region of the dual.
  Vec lam = Vec::Zero(A.rows());
  for (double d = std::max(1.0, delta);; d = std::max(delta, d * 0.1)) {
    auto F = [&](const Vec& l, Vec& g) {
      Vec s = soft_threshold(A.transpose() * l, 1.0);
      g = A * s / d - b;
      return s.squaredNorm() / (2 * d) - b.dot(l);
    };
    lam = solvers::bb_gradient(F, {}, lam, reference_options()).x;
    if (d == delta) break;
  }
  if (lambda_out) *lambda_out = lam;
  return soft_threshold(A.transpose() * lam, 1.0) / delta;
}

// Exact BP minimizer: polish the support of a regularized solution and certify it.
Vec bp_reference(const Mat& A, const Vec& b, bool* confident) {
  Vec lam;
  Vec xd = regularized_bp(A, b, 1e-4, &lam);
  double cut = 1e-6 * std::max(1.0, xd.lpNorm<Eigen::Infinity>());
  std::vector<int> S;
  for (Eigen::Index i = 0; i < xd.size(); ++i)
    if (std::abs(xd[i]) > cut) S.push_back(static_cast<int>(i));
  *confident = false;
  if (S.empty() || S.size() > static_cast<std::size_t>(A.rows())) return xd;
  Mat AS(A.rows(), S.size());
  for (std::size_t k = 0; k < S.size(); ++k) AS.col(k) = A.col(S[k]);
  Vec xs = AS.colPivHouseholderQr().solve(b);
  if ((AS * xs - b).norm() > 1e-9 * (1.0 + b.norm())) return xd;
  Vec x = Vec::Zero(A.cols());
  for (std::size_t k = 0; k < S.size(); ++k) x[S[k]] = xs[k];
  for (std::size_t k = 0; k < S.size(); ++k)
    if ((xs[k] > 0) != (xd[S[k]] > 0)) return xd;
  *confident = bp_certificate(A, x, 1e-9);
  if (!*confident) {
    // Dual certificate from the regularized multiplier moved onto A_S' y = sign(x_S).
    Vec sg(S.size());
    for (std::size_t k = 0; k < S.size(); ++k) sg[k] = xs[k] > 0 ? 1.0 : -1.0;
    Eigen::LDLT<Mat> G(AS.transpose() * AS);
    Vec y = lam + AS * G.solve(sg - AS.transpose() * lam);
    *confident = (AS.transpose() * y - sg).lpNorm<Eigen::Infinity>() < 1e-9 &&
                 (A.transpose() * y).lpNorm<Eigen::Infinity>() <= 1.0 + 1e-9;
  }
  return *confident ? x : xd;
}

}  // namespace detail

ProblemInstance build_bp_row(const netgraph::Graph& g, const RowData& data) {
  check_rows(g, data);
  int P = g.node_count();
  int n = static_cast<int>(data.A[0].cols());
  for (int p = 0; p < P; ++p) {
    Eigen::FullPivLU<Mat> lu(data.A[p]);
    if (lu.rank() < data.A[p].rows()) throw ArgumentError("bp row block " + std::to_string(p + 1) + " is rank deficient");
  }
  ProblemInstance inst;
  inst.application = "bp-row";
  detail::finish_global(inst, g, n);
  for (int p = 0; p < P; ++p) inst.nodes.push_back(std::make_unique<BpRowNode>(data.A[p], data.b[p], 1.0 / P));
  Mat A = stack_rows(data);
  Vec b = stack_rhs(data);
  bool confident = false;
  inst.x_ref = detail::bp_reference(A, b, &confident);
  inst.reference_confident = confident;
  inst.f_ref = inst.x_ref.lpNorm<1>();
  inst.metric = ErrorMetric::SingleNode;
  return inst;
}

ProblemInstance build_bpdn_row(const netgraph::Graph& g, const RowData& data, double beta) {
  if (!(beta > 0)) throw ArgumentError("bpdn needs beta > 0");
  check_rows(g, data);
  int P = g.node_count();
  int n = static_cast<int>(data.A[0].cols());
  ProblemInstance inst;
  inst.application = "bpdn-row";
  inst.params["beta"] = beta;
  detail::finish_global(inst, g, n);
  for (int p = 0; p < P; ++p)
    inst.nodes.push_back(std::make_unique<BpdnRowNode>(data.A[p], data.b[p], beta / P));
  Mat A = stack_rows(data);
  Vec b = stack_rhs(data);
  auto F = [&](const Vec& x, Vec& gr) {
    Vec r = A * x - b;
    gr = A.transpose() * r;
    return 0.5 * r.squaredNorm();
  };
  auto prox = [&](Vec& x, double step) { x = soft_threshold(x, beta * step); };
  auto r = solvers::fista_prox(F, std::max(detail::spectral_norm_sq(A), 1e-12), prox, Vec::Zero(n), detail::reference_options());
  inst.x_ref = r.x;
  inst.reference_confident = !r.truncated;
  inst.f_ref = inst.objective(inst.x_ref);
  inst.metric = ErrorMetric::SingleNode;
  return inst;
}

ProblemInstance build_lasso_row(const netgraph::Graph& g, const RowData& data, double gamma) {
  if (!(gamma > 0)) throw ArgumentError("lasso needs gamma > 0");
  check_rows(g, data);
  int P = g.node_count();
  int n = static_cast<int>(data.A[0].cols());
  ProblemInstance inst;
  inst.application = "lasso-row";
  inst.params["gamma"] = gamma;
  detail::finish_global(inst, g, n);
  for (int p = 0; p < P; ++p)
    inst.nodes.push_back(std::make_unique<LassoRowNode>(data.A[p], data.b[p], gamma));
  Mat A = stack_rows(data);
  Vec b = stack_rhs(data);
  auto F = [&](const Vec& x, Vec& gr) {
    Vec r = A * x - b;
    gr = A.transpose() * r;
    return 0.5 * r.squaredNorm();
  };
  auto proj = [&](Vec& x) { x = solvers::project_l1_ball(x, gamma); };
  auto r = solvers::fista(F, std::max(detail::spectral_norm_sq(A), 1e-12), proj, Vec::Zero(n), detail::reference_options());
  inst.x_ref = r.x;
  inst.reference_confident = !r.truncated;
  inst.f_ref = inst.objective(inst.x_ref);
  inst.metric = ErrorMetric::SingleNode;
  return inst;
}

}  // namespace dopt::problems
