#include <cmath>

#include "dopt/algorithms/algorithms.hpp"
#include "dopt/errors.hpp"
#include "dopt/problems/netflow.hpp"
#include "record.hpp"

namespace dopt::algorithms {

namespace {

void check_weights(const netgraph::Graph& g, const Mat& W) {
  int P = g.node_count();
  if (W.rows() != P || W.cols() != P) throw ArgumentError("weight matrix must be P x P");
  for (int p = 0; p < P; ++p) {
    if (std::abs(W.row(p).sum() - 1.0) > 1e-9) throw ArgumentError("weights must be row-stochastic");
    for (int j = 0; j < P; ++j)
      if (W(p, j) != 0.0 && j != p && !g.has_edge(p, j))
        throw ArgumentError("weights must vanish outside each neighborhood");
  }
}

}  // namespace

Mat uniform_weights(const netgraph::Graph& g) {
  int P = g.node_count();
  Mat W = Mat::Zero(P, P);
  for (int p = 0; p < P; ++p) {
    double a = 1.0 / (g.degree(p) + 1.0);
    W(p, p) = a;
    for (int j : g.neighbors(p)) W(p, j) = a;
  }
  return W;
}

Mat metropolis_weights(const netgraph::Graph& g) {
  int P = g.node_count();
  Mat W = Mat::Zero(P, P);
  for (const auto& [i, j] : g.edges()) {
    double a = 1.0 / (1.0 + std::max(g.degree(i), g.degree(j)));
    W(i, j) = a;
    W(j, i) = a;
  }
  for (int p = 0; p < P; ++p) W(p, p) = 1.0 - W.row(p).sum();
  return W;
}

RunRecord run_subgrad_consensus(ProblemInstance& inst, const RunOptions& opts, const Mat& weights,
                                const StepRule& step) {
  int P = inst.P(), n = inst.n();
  for (int p = 0; p < P; ++p)
    if (static_cast<int>(inst.layout.S(p).size()) != n)
      throw ContractError("subgradient consensus needs a global variable");
  const auto& g = inst.graph;
  Mat W = weights.size() == 0 ? uniform_weights(g) : weights;
  check_weights(g, W);
  StepRule alpha = step ? step : [](long k) { return 1.0 / (k + 1.0); };
  inst.reset();
  Estimates x = inst.start();
  detail::Recorder rec(&inst, opts, "subgradient", 0.0, 1, 2LL * g.edge_count() * n);
  try {
    bool go = rec.begin(x);
    while (go) {
      double a = alpha(rec.iteration());
      Estimates next(P);
      for (int p = 0; p < P; ++p) {
        next[p] = W(p, p) * x[p];
        for (int j : g.neighbors(p)) next[p] += W(p, j) * x[j];
        next[p] -= a * inst.nodes[p]->gradient(x[p]);
      }
      x.swap(next);
      go = rec.step(x);
    }
  } catch (const NumericalError& e) {
    rec.fail(e.what());
  }
  return rec.finish(std::move(x));
}

RunRecord run_linear_consensus(const netgraph::Graph& g, const Vec& theta, const Mat& weights,
                               const RunOptions& opts) {
  int P = g.node_count();
  if (theta.size() != P) throw ArgumentError("theta needs one value per node");
  check_weights(g, weights);
  for (int p = 0; p < P; ++p)
    for (int j : g.neighbors(p))
      if (!(weights(p, j) > 0)) throw ArgumentError("linear consensus needs positive neighbor weights");
  double mean = theta.mean();
  Vec x = theta;
  auto as_estimates = [&](const Vec& v) {
    Estimates e(P);
    for (int p = 0; p < P; ++p) e[p] = Vec::Constant(1, v[p]);
    return e;
  };
  detail::Recorder rec(nullptr, opts, "linear-consensus", 0.0, 1, 2LL * g.edge_count());
  rec.set_error([&](const Estimates& e) {
    double num = 0.0;
    for (const auto& v : e) num += (v[0] - mean) * (v[0] - mean);
    double den = std::sqrt(static_cast<double>(P)) * std::abs(mean);
    return den > 0 ? std::sqrt(num) / den : std::sqrt(num);
  });
  bool go = rec.begin(as_estimates(x));
  while (go) {
    x = weights * x;
    go = rec.step(as_estimates(x));
  }
  return rec.finish(as_estimates(x));
}

RunRecord run_nesterov_distributed(ProblemInstance& inst, double L, const RunOptions& opts) {
  if (!(L > 0)) throw ArgumentError("Lipschitz constant must be positive");
  auto cls = netgraph::classify_variable(inst.graph, inst.layout);
  if (!cls.star) throw ContractError("nesterov baseline needs a star-shaped variable");
  for (const auto& node : inst.nodes)
    if (!node->smooth()) throw ContractError("nesterov baseline needs smooth node functions");
  inst.reset();
  int P = inst.P(), n = inst.n();
  Vec x = inst.average(inst.start());
  Vec y = x;
  auto spread = [&](const Vec& v) {
    Estimates e(P);
    for (int p = 0; p < P; ++p) e[p] = problems::gather(v, inst.layout.S(p));
    return e;
  };
  detail::Recorder rec(&inst, opts, "nesterov", L, 1, analytic_scalars_per_cs(inst));
  try {
    bool go = rec.begin(spread(x));
    while (go) {
      Vec grad = Vec::Zero(n);
      for (int p = 0; p < P; ++p) {
        const auto& S = inst.layout.S(p);
        Vec gp = inst.nodes[p]->gradient(problems::gather(y, S));
        for (std::size_t k = 0; k < S.size(); ++k) grad[S[k]] += gp[k];
      }
      Vec xn = y - grad / L;
      double k = static_cast<double>(rec.iteration() + 1);
      y = xn + (k - 1.0) / (k + 2.0) * (xn - x);
      x = xn;
      go = rec.step(spread(x));
    }
  } catch (const NumericalError& e) {
    rec.fail(e.what());
  }
  return rec.finish(spread(x));
}

RunRecord run_nesterov_flow_dual(ProblemInstance& inst, const netgraph::Digraph& dg, int scenario,
                                 const Vec& param, const Vec& d, double L, const RunOptions& opts) {
  if (!(L > 0)) throw ArgumentError("Lipschitz constant must be positive");
  int P = dg.node_count();
  if (inst.P() != P || inst.n() != dg.arc_count()) throw ContractError("flow data does not match the instance");
  Mat B = netgraph::incidence(dg);
  Vec nu = Vec::Zero(P), y = nu;
  auto spread = [&](const Vec& pot) {
    Vec x = problems::flow_from_potentials(dg, scenario, param, pot);
    Estimates e(P);
    for (int p = 0; p < P; ++p) e[p] = problems::gather(x, inst.layout.S(p));
    return e;
  };
  detail::Recorder rec(&inst, opts, "nesterov-dual", L, 1, 2LL * dg.underlying().edge_count());
  bool go = rec.begin(spread(nu));
  while (go) {
    Vec grad = B * problems::flow_from_potentials(dg, scenario, param, y) - d;
    Vec next = y - grad / L;
    double k = static_cast<double>(rec.iteration() + 1);
    y = next + (k - 1.0) / (k + 2.0) * (next - nu);
    nu = next;
    go = rec.step(spread(nu));
  }
  return rec.finish(spread(nu));
}

}  // namespace dopt::algorithms
