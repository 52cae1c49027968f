#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dopt/netgraph/graph.hpp"
#include "dopt/netgraph/layout.hpp"

namespace dopt::problems {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Per-node copies; entry k of estimates[p] is component S_p[k].
using Estimates = std::vector<Vec>;

// Node function f_p over x_{S_p} with the local-solve oracle
//   argmin_x f_p(x) + v'x + 1/2 sum_l w_l x_l^2,  w > 0.
class LocalObjective {
 public:
  explicit LocalObjective(std::vector<int> support) : support_(std::move(support)) {}
  virtual ~LocalObjective() = default;

  const std::vector<int>& support() const { return support_; }
  int size() const { return static_cast<int>(support_.size()); }

  virtual Vec solve(const Vec& v, const Vec& w) = 0;
  // f_p(x); +infinity outside the domain.
  virtual double value(const Vec& x) const = 0;
  virtual bool smooth() const { return false; }
  virtual Vec gradient(const Vec& x) const;
  virtual std::optional<double> modulus() const { return std::nullopt; }
  // Clears warm starts so a run does not depend on earlier runs.
  virtual void reset() {}

  long truncations() const { return truncations_; }

 protected:
  void note(bool truncated) { truncations_ += truncated ? 1 : 0; }

 private:
  std::vector<int> support_;
  long truncations_ = 0;
};

enum class ErrorMetric { ConcatInf, Concat2, SingleNode };
std::string metric_name(ErrorMetric m);
ErrorMetric parse_metric(const std::string& s);

struct ProblemInstance {
  std::string application;
  netgraph::Graph graph;
  netgraph::VariableLayout layout;
  std::vector<std::unique_ptr<LocalObjective>> nodes;

  Vec x_ref;               // centralized minimizer in the variable space
  double f_ref = 0.0;      // sum of node functions at x_ref
  bool reference_confident = true;
  std::map<std::string, double> params;
  ErrorMetric metric = ErrorMetric::Concat2;
  Estimates initial;       // empty means zeros

  // Optional map from estimates to a reported quantity (e.g. recovered primal blocks).
  std::function<Vec(const Estimates&)> report;
  Vec report_ref;

  int P() const { return graph.node_count(); }
  int n() const { return layout.n(); }
  double rel_error(const Estimates& x) const { return rel_error(x, metric); }
  double rel_error(const Estimates& x, ErrorMetric m) const;
  double objective(const Vec& x) const;
  // Per-component mean over all copies.
  Vec average(const Estimates& x) const;
  Estimates start() const;
  void reset();
  long truncations() const;
};

// Restricts a full vector to S_p.
Vec gather(const Vec& x, const std::vector<int>& support);

}  // namespace dopt::problems
