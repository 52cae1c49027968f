#pragma once

#include <numeric>

#include "dopt/netgraph/layout.hpp"
#include "dopt/problems/instance.hpp"
#include "dopt/solvers/solvers.hpp"

namespace dopt::problems::detail {

inline solvers::SolverOptions inner_options() { return {}; }

inline solvers::SolverOptions reference_options() {
  solvers::SolverOptions o;
  o.max_iterations = 200000;
  o.tolerance = 1e-12;
  o.restart = true;
  return o;
}

inline std::vector<int> iota_support(int n) {
  std::vector<int> s(n);
  std::iota(s.begin(), s.end(), 0);
  return s;
}

// Shared tail of every global-variable builder.
inline void finish_global(ProblemInstance& inst, const netgraph::Graph& g, int n) {
  inst.graph = g;
  inst.layout = netgraph::VariableLayout::global(g, n);
}

inline double spectral_norm_sq(const Mat& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(A);
  double s = svd.singularValues()(0);
  return s * s;
}

Vec regularized_bp(const Mat& A, const Vec& b, double delta, Vec* lambda_out);
Vec bp_reference(const Mat& A, const Vec& b, bool* confident);

}  // namespace dopt::problems::detail
