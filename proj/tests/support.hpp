#pragma once

#include <random>
#include <vector>

#include "dopt/algorithms/algorithms.hpp"
#include "dopt/problems/instance.hpp"

namespace dopt::testing {

using problems::Estimates;
using problems::Mat;
using problems::Vec;

// f(x) = 1/2 x'Hx + c'x with H positive definite.
class QuadNode final : public problems::LocalObjective {
 public:
  QuadNode(std::vector<int> support, Mat H, Vec c)
      : LocalObjective(std::move(support)), H_(std::move(H)), c_(std::move(c)) {}
  Vec solve(const Vec& v, const Vec& w) override {
    Mat K = H_;
    K.diagonal() += w;
    return K.ldlt().solve(-(c_ + v));
  }
  double value(const Vec& x) const override { return 0.5 * x.dot(H_ * x) + c_.dot(x); }
  bool smooth() const override { return true; }
  Vec gradient(const Vec& x) const override { return H_ * x + c_; }
  std::optional<double> modulus() const override {
    return Eigen::SelfAdjointEigenSolver<Mat>(H_).eigenvalues().minCoeff();
  }
  const Mat& H() const { return H_; }
  const Vec& c() const { return c_; }

 private:
  Mat H_;
  Vec c_;
};

// Random quadratic nodes on the given layout; x_ref from the stacked normal equations.
inline problems::ProblemInstance quadratic_instance(const netgraph::Graph& g, netgraph::VariableLayout layout,
                                                    std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  problems::ProblemInstance inst;
  inst.application = "quadratic";
  inst.graph = g;
  int n = layout.n();
  Mat Ht = Mat::Zero(n, n);
  Vec ct = Vec::Zero(n);
  for (int p = 0; p < g.node_count(); ++p) {
    const auto& S = layout.S(p);
    int k = static_cast<int>(S.size());
    Mat M(k, k);
    Vec c(k);
    for (int i = 0; i < k * k; ++i) M.data()[i] = N(rng);
    for (auto& v : c) v = 3.0 * N(rng);
    Mat H = scale * (M * M.transpose() / k + 0.5 * Mat::Identity(k, k));
    for (int a = 0; a < k; ++a) {
      ct[S[a]] += c[a];
      for (int b = 0; b < k; ++b) Ht(S[a], S[b]) += H(a, b);
    }
    inst.nodes.push_back(std::make_unique<QuadNode>(S, H, c));
  }
  inst.layout = std::move(layout);
  inst.x_ref = Ht.ldlt().solve(-ct);
  inst.f_ref = inst.objective(inst.x_ref);
  return inst;
}

// Runs for exactly `iterations` outer iterations and returns the copies seen at k = 0..iterations.
inline std::vector<Estimates> iterates(const std::function<algorithms::RunRecord(const algorithms::RunOptions&)>& run,
                                       long iterations, int cs_per_iteration = 1) {
  std::vector<Estimates> out;
  algorithms::RunOptions o;
  o.stop.target = 1e-300;
  o.stop.max_cs = iterations * cs_per_iteration;
  o.observer = [&](long, const Estimates& x) { out.push_back(x); };
  run(o);
  return out;
}

inline double max_gap(const Estimates& a, const Estimates& b) {
  double m = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) m = std::max(m, (a[p] - b[p]).cwiseAbs().maxCoeff());
  return m;
}

}  // namespace dopt::testing
