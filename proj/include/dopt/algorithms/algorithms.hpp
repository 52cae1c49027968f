#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dopt/netgraph/coloring.hpp"
#include "dopt/netgraph/steiner.hpp"
#include "dopt/problems/instance.hpp"

namespace dopt::algorithms {

using problems::Estimates;
using problems::Mat;
using problems::ProblemInstance;
using problems::Vec;

struct StopRule {
  double target = 1e-4;
  long max_cs = 1000;
  std::optional<problems::ErrorMetric> metric;  // instance default when empty
  double diverge = 1e6;
};

enum class RunStatus { Converged, MaxCs, Diverged };
std::string status_name(RunStatus s);

struct IterationRow {
  long iteration = 0;
  long cs = 0;
  long long scalars = 0;  // cumulative
  double rel_error = 0.0;
  double seconds = 0.0;   // cumulative wall time
};

struct RunRecord {
  std::string algorithm;
  double rho = 0.0;
  std::vector<IterationRow> rows;
  RunStatus status = RunStatus::MaxCs;
  long cs_to_target = -1;
  long long scalars_per_cs = 0;
  long inner_truncations = 0;
  Estimates final;
  std::string note;
};

// Called with the iteration index (0 for the starting point) and the current copies.
using Observer = std::function<void(long iteration, const Estimates& x)>;

struct RunOptions {
  StopRule stop;
  Observer observer;
};

// Global variable, color-scheduled.
RunRecord run_dadmm_global(ProblemInstance& inst, const netgraph::Coloring& coloring, double rho,
                           const RunOptions& opts = {});
// Connected variable; throws ContractError for non-connected layouts.
RunRecord run_dadmm_connected(ProblemInstance& inst, const netgraph::Coloring& coloring, double rho,
                              const RunOptions& opts = {});
// Any layout with a Steiner plan (identity plan for connected layouts).
RunRecord run_dadmm_general(ProblemInstance& inst, const netgraph::Coloring& coloring,
                            const netgraph::SteinerPlan& plan, double rho, const RunOptions& opts = {});
// Picks the variant the layout calls for, building a Steiner plan when needed.
RunRecord run_dadmm(ProblemInstance& inst, const netgraph::Coloring& coloring, double rho,
                    const RunOptions& opts = {});

RunRecord run_kekatos(ProblemInstance& inst, double rho, const RunOptions& opts = {},
                      const netgraph::SteinerPlan* plan = nullptr);
RunRecord run_schizas(ProblemInstance& inst, double rho, const RunOptions& opts = {});
RunRecord run_zhu(ProblemInstance& inst, double rho, const RunOptions& opts = {});

// Row-stochastic weights over N_p and p, stored densely (P x P).
Mat uniform_weights(const netgraph::Graph& g);
Mat metropolis_weights(const netgraph::Graph& g);

using StepRule = std::function<double(long k)>;  // k = 0, 1, ...
RunRecord run_subgrad_consensus(ProblemInstance& inst, const RunOptions& opts = {}, const Mat& weights = {},
                                const StepRule& step = {});
// Error is measured against mean(theta) over all node values.
RunRecord run_linear_consensus(const netgraph::Graph& g, const Vec& theta, const Mat& weights,
                               const RunOptions& opts = {});
// Star-shaped smooth instances; one CS per iteration.
RunRecord run_nesterov_distributed(ProblemInstance& inst, double L, const RunOptions& opts = {});
// Nesterov on the negated flow dual over node potentials; one potential per edge direction per CS.
RunRecord run_nesterov_flow_dual(ProblemInstance& inst, const netgraph::Digraph& dg, int scenario,
                                 const Vec& param, const Vec& d, double L, const RunOptions& opts = {});

struct RhoBound {
  double value = 0.0;
  bool unbounded = false;  // single color
  bool two_colors = false;
};
RhoBound check_rho_bound(const ProblemInstance& inst, const netgraph::Coloring& coloring);

// Sum over directed edges (i,j) of the components l with (i,j) in E_l (or E_l' under a plan).
long long analytic_scalars_per_cs(const ProblemInstance& inst, const netgraph::SteinerPlan* plan = nullptr);

}  // namespace dopt::algorithms
