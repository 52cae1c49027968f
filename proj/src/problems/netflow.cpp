#include "dopt/problems/netflow.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "dopt/errors.hpp"
#include "internal.hpp"

namespace dopt::problems {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec signs(const netgraph::Digraph& dg, int p) {
  const auto& inc = dg.incident(p);
  Vec b(inc.size());
  for (std::size_t k = 0; k < inc.size(); ++k) b[k] = dg.arcs()[inc[k]].first == p ? -1.0 : 1.0;
  return b;
}

bool balanced(const Vec& b, const Vec& x, double d) {
  return std::abs(b.dot(x) - d) <= 1e-8 * (1.0 + std::abs(d));
}

class QuadFlowNode final : public LocalObjective {
 public:
  QuadFlowNode(std::vector<int> arcs, Vec b, Vec a, double d)
      : LocalObjective(std::move(arcs)), b_(std::move(b)), a_(std::move(a)), d_(d) {}

  Vec solve(const Vec& v, const Vec& w) override {
    Vec c = (w.array() + 0.5).matrix();
    Vec lin = v - 0.5 * a_;
    double nu = -(d_ + b_.cwiseProduct(lin).cwiseQuotient(c).sum()) / b_.cwiseProduct(b_).cwiseQuotient(c).sum();
    return -(lin + nu * b_).cwiseQuotient(c);
  }
  double value(const Vec& x) const override {
    if (!balanced(b_, x, d_)) return kInf;
    return 0.25 * (x - a_).squaredNorm();
  }

 private:
  Vec b_, a_;
  double d_;
};

class DelayFlowNode final : public LocalObjective {
 public:
  DelayFlowNode(std::vector<int> arcs, Vec b, Vec c, double d)
      : LocalObjective(std::move(arcs)), b_(std::move(b)), c_(std::move(c)), d_(d) {
    start_ = solvers::project_box_hyperplane(0.5 * c_, Vec::Zero(c_.size()), c_ * (1 - 1e-6), b_, d_);
    warm_ = start_;
  }

  Vec solve(const Vec& v, const Vec& w) override {
    auto F = [&](const Vec& y, Vec& g) {
      g.resize(y.size());
      double f = v.dot(y) + 0.5 * y.cwiseProduct(y).dot(w);
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        double gap = c_[i] - y[i];
        if (!(gap > 0)) return kInf;
        f += 0.5 * y[i] / gap;
        g[i] = 0.5 * c_[i] / (gap * gap) + v[i] + w[i] * y[i];
      }
      return f;
    };
    Vec lo = Vec::Zero(c_.size());
    auto proj = [&](Vec& y) { y = solvers::project_box_hyperplane(y, lo, c_, b_, d_); };
    auto r = solvers::bb_gradient(F, proj, warm_, detail::inner_options());
    note(r.truncated);
    warm_ = r.x;
    return warm_;
  }
  double value(const Vec& x) const override {
    if (!balanced(b_, x, d_)) return kInf;
    double f = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x[i] < 0 || x[i] >= c_[i]) return kInf;
      f += 0.5 * x[i] / (c_[i] - x[i]);
    }
    return f;
  }
  void reset() override { warm_ = start_; }

 private:
  Vec b_, c_;
  double d_;
  Vec start_, warm_;
};

Mat regularized_laplacian(const netgraph::Digraph& dg) {
  Mat B = netgraph::incidence(dg);
  int P = dg.node_count();
  return B * B.transpose() + Mat::Constant(P, P, 1.0 / P);
}

}  // namespace

FlowData gen_flow(const netgraph::Graph& g, int pairs, std::uint64_t seed) {
  if (pairs < 1) throw ArgumentError("flow generation needs at least one source/sink pair");
  std::mt19937_64 rng(seed);
  FlowData out;
  out.network = netgraph::orient_random(g, rng());
  const double values[] = {10, 20, 30, 40, 50, 100};
  std::discrete_distribution<int> pick({0.2, 0.2, 0.2, 0.2, 0.1, 0.1});
  int A = out.network.arc_count();
  int P = g.node_count();
  out.param.resize(A);
  for (int a = 0; a < A; ++a) out.param[a] = values[pick(rng)];
  out.d = Vec::Zero(P);
  std::uniform_int_distribution<int> node(0, P - 1);
  for (int k = 0; k < pairs; ++k) {
    std::vector<int> reach;
    int s = 0;
    for (int tries = 0; reach.empty(); ++tries) {
      if (tries > 100 * P) throw GenerationError("no node reaches another along the arcs");
      s = node(rng);
      reach = out.network.reachable(s);
    }
    std::uniform_int_distribution<std::size_t> sink(0, reach.size() - 1);
    int r = reach[sink(rng)];
    double f = values[pick(rng)] / 100.0;
    out.d[s] -= f;
    out.d[r] += f;
  }
  return out;
}

ProblemInstance build_netflow(const netgraph::Digraph& dg, int scenario, const Vec& param, const Vec& d) {
  if (scenario != 1 && scenario != 2) throw ArgumentError("flow scenario must be 1 or 2");
  int P = dg.node_count();
  int A = dg.arc_count();
  if (param.size() != A || d.size() != P) throw ArgumentError("flow data sizes do not match the network");
  if (std::abs(d.sum()) > 1e-9 * (1.0 + d.cwiseAbs().sum())) throw ArgumentError("injections must sum to zero");
  for (int p = 0; p < P; ++p)
    if (dg.incident(p).empty()) throw ArgumentError("flow network has an isolated node");
  if (scenario == 2 && param.minCoeff() <= 0) throw ArgumentError("capacities must be positive");

  ProblemInstance inst;
  inst.application = scenario == 1 ? "flow1" : "flow2";
  inst.params["scenario"] = scenario;
  inst.graph = dg.underlying();
  std::vector<std::vector<int>> S(P);
  for (int p = 0; p < P; ++p) S[p] = dg.incident(p);
  inst.layout = netgraph::VariableLayout(inst.graph, A, S);
  for (int p = 0; p < P; ++p) {
    Vec b = signs(dg, p);
    Vec local = gather(param, S[p]);
    if (scenario == 1)
      inst.nodes.push_back(std::make_unique<QuadFlowNode>(S[p], b, local, d[p]));
    else
      inst.nodes.push_back(std::make_unique<DelayFlowNode>(S[p], b, local, d[p]));
  }

  Mat B = netgraph::incidence(dg);
  if (scenario == 1) {
    Vec nu = regularized_laplacian(dg).ldlt().solve(B * param - d);
    inst.x_ref = param - B.transpose() * nu;
  } else {
    // Dual over node potentials; arc flow x(s) minimizes phi(x) - s x on [0, c).
    auto flow_of = [&](const Vec& nu) { return flow_from_potentials(dg, 2, param, nu); };
    auto F = [&](const Vec& nu, Vec& g) {
      Vec x = flow_of(nu);
      g = B * x - d;
      double q = nu.dot(d);
      for (int a = 0; a < A; ++a) {
        double s = nu[dg.arcs()[a].second] - nu[dg.arcs()[a].first];
        q += x[a] / (param[a] - x[a]) - s * x[a];
      }
      return -q;
    };
    auto r = solvers::bb_gradient(F, {}, Vec::Zero(P), detail::reference_options());
    inst.x_ref = flow_of(r.x);
    if ((B * inst.x_ref - d).lpNorm<Eigen::Infinity>() > 1e-8)
      throw ArgumentError("injections are infeasible for the capacities");
    inst.reference_confident = !r.truncated;
  }
  inst.f_ref = inst.objective(inst.x_ref);
  inst.metric = ErrorMetric::ConcatInf;
  return inst;
}

Vec flow_from_potentials(const netgraph::Digraph& dg, int scenario, const Vec& param, const Vec& nu) {
  int A = dg.arc_count();
  if (param.size() != A || nu.size() != dg.node_count()) throw ArgumentError("potential sizes do not match the network");
  Vec x(A);
  for (int a = 0; a < A; ++a) {
    double s = nu[dg.arcs()[a].second] - nu[dg.arcs()[a].first];
    double c = param[a];
    if (scenario == 1)
      x[a] = c + s;
    else
      x[a] = s <= 1.0 / c ? 0.0 : c - std::sqrt(c / s);
  }
  return x;
}

double flow_kkt_residual(const netgraph::Digraph& dg, const Vec& a, const Vec& d, const Vec& x) {
  Mat B = netgraph::incidence(dg);
  Vec nu = regularized_laplacian(dg).ldlt().solve(B * (a - x));
  double stat = (x - a + B.transpose() * nu).lpNorm<Eigen::Infinity>();
  double feas = (B * x - d).lpNorm<Eigen::Infinity>();
  return std::max(stat, feas);
}

}  // namespace dopt::problems
