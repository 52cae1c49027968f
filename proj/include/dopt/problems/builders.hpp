#pragma once

#include <vector>

#include "dopt/problems/data.hpp"
#include "dopt/problems/instance.hpp"

namespace dopt::problems {

// f_p(x) = 1/2 (x - theta_p)^2, global scalar; estimates start at theta_p.
ProblemInstance build_consensus(const netgraph::Graph& g, const Vec& theta);

// Consensus prox: argmin 1/2 (x - theta)^2 + (1/(2 tau)) (x - eta)^2.
double consensus_prox(double theta, double tau, double eta);

// f_p(x) = ||x||_1 / P + indicator(A_p x = b_p).
ProblemInstance build_bp_row(const netgraph::Graph& g, const RowData& data);
// f_p(x) = 1/2 ||A_p x - b_p||^2 + (beta/P) ||x||_1.
ProblemInstance build_bpdn_row(const netgraph::Graph& g, const RowData& data, double beta);
// f_p(x) = 1/2 ||A_p x - b_p||^2 + indicator(||x||_1 <= gamma).
ProblemInstance build_lasso_row(const netgraph::Graph& g, const RowData& data, double gamma);

// Column partitions, solved through regularized duals over lambda in R^m.
ProblemInstance build_bp_col_dual(const netgraph::Graph& g, const ColumnData& data, double delta);
ProblemInstance build_bpdn_col_dual(const netgraph::Graph& g, const ColumnData& data, double beta, double delta);
ProblemInstance build_rlasso_col_dual(const netgraph::Graph& g, const ColumnData& data, double sigma,
                                      double delta);
// Variable (lambda, mu) in R^{m+1}.
ProblemInstance build_lasso_col_dual(const netgraph::Graph& g, const ColumnData& data, double gamma,
                                     double delta);

// Variable (s, r): f_p = ||s||^2/(2P) + beta sum_k max(0, 1 - y_k (s'x_k - r)).
// assignment[p] lists the point indices held by node p.
ProblemInstance build_svm(const netgraph::Graph& g, const Mat& points, const Vec& labels, double beta,
                          const std::vector<std::vector<int>>& assignment);
// Round-robin: point k goes to node k mod P.
std::vector<std::vector<int>> assign_points(int K, int P);

// Coordinatewise (u - 1)/delta, (u + 1)/delta or 0 with u = A_p' lambda.
Vec recover_primal_soft(const Vec& lambda, const Mat& Ap, double delta);

// Conjugate of ||x|| + delta/2 ||x||^2 at eta and its maximizer.
double conjugate_l2_quad(const Vec& eta, double delta);
Vec conjugate_l2_quad_argmax(const Vec& eta, double delta);
// Conjugate of ||x||_1 + delta/2 ||x||^2 scaled by level: sum (|eta_i| - level)_+^2 / (2 delta).
double conjugate_l1_quad(const Vec& eta, double level, double delta);

}  // namespace dopt::problems
