#include <fstream>
#include <random>

#include "dopt/errors.hpp"
#include "dopt/harness/harness.hpp"
#include "dopt/problems/builders.hpp"
#include "dopt/problems/dmpc.hpp"

namespace dopt::harness {

using problems::Vec;

std::vector<std::string> problem_names() {
  return {"consensus", "bp-row",  "bpdn-row",  "lasso-row",     "bp-col",         "bpdn-col",
          "rlasso-col", "lasso-col", "svm", "flow1", "flow2", "dmpc-star", "dmpc-connected",
          "dmpc-nonconnected"};
}

std::vector<std::string> algorithm_names() {
  return {"dadmm", "dadmm-global", "dadmm-connected", "dadmm-general", "kekatos",
          "schizas", "zhu", "subgradient", "nesterov"};
}

bool uses_rho(const std::string& a) { return a != "subgradient"; }

netgraph::Graph make_network(const ExperimentConfig& cfg) {
  if (!cfg.edge_list.empty()) {
    std::ifstream in(cfg.edge_list);
    if (!in) throw ArgumentError("cannot open edge list '" + cfg.edge_list + "'");
    return netgraph::read_edge_list(in);
  }
  auto model = netgraph::parse_model(cfg.model.empty() ? "geometric" : cfg.model);
  return netgraph::gen_graph(model, cfg.nodes, cfg.seed);
}

Setup make_setup(const ExperimentConfig& cfg) { return make_setup(cfg, make_network(cfg)); }

Setup make_setup(const ExperimentConfig& cfg, const netgraph::Graph& g) {
  Setup s;
  int P = g.node_count();
  const std::string& pr = cfg.problem;
  auto row_data = [&](double noise) {
    auto sys = problems::gaussian_sparse(cfg.rows_per_node * P, cfg.columns, cfg.sparsity, noise, cfg.data_seed);
    return std::make_pair(problems::split_rows(sys.A, sys.b, P), sys.x0);
  };
  auto col_data = [&](double noise) {
    auto sys = problems::gaussian_sparse(cfg.rows, cfg.columns, cfg.sparsity, noise, cfg.data_seed);
    return std::make_pair(problems::split_columns(sys.A, sys.b, P), sys.x0);
  };
  auto lasso_gamma = [&](const Vec& x0) { return cfg.gamma.value_or(0.5 * x0.lpNorm<1>()); };

  if (pr == "consensus") {
    std::mt19937_64 rng(cfg.data_seed);
    std::normal_distribution<double> N(10.0, 100.0);
    Vec theta(P);
    for (int p = 0; p < P; ++p) theta[p] = N(rng);
    s.instance = problems::build_consensus(g, theta);
  } else if (pr == "bp-row") {
    s.instance = problems::build_bp_row(g, row_data(0.0).first);
  } else if (pr == "bpdn-row") {
    s.instance = problems::build_bpdn_row(g, row_data(cfg.noise).first, cfg.beta.value_or(0.3));
  } else if (pr == "lasso-row") {
    auto [d, x0] = row_data(cfg.noise);
    s.instance = problems::build_lasso_row(g, d, lasso_gamma(x0));
  } else if (pr == "bp-col") {
    s.instance = problems::build_bp_col_dual(g, col_data(0.0).first, cfg.delta);
  } else if (pr == "bpdn-col") {
    s.instance = problems::build_bpdn_col_dual(g, col_data(cfg.noise).first, cfg.beta.value_or(0.3), cfg.delta);
  } else if (pr == "rlasso-col") {
    s.instance = problems::build_rlasso_col_dual(g, col_data(cfg.noise).first, cfg.sigma, cfg.delta);
  } else if (pr == "lasso-col") {
    auto [d, x0] = col_data(cfg.noise);
    s.instance = problems::build_lasso_col_dual(g, d, lasso_gamma(x0), cfg.delta);
  } else if (pr == "svm") {
    auto pts = problems::iris_two_class();
    s.instance = problems::build_svm(g, pts.X, pts.y, cfg.beta.value_or(1.0),
                                     problems::assign_points(static_cast<int>(pts.X.rows()), P));
  } else if (pr == "flow1" || pr == "flow2") {
    s.scenario = pr == "flow1" ? 1 : 2;
    s.flow = problems::gen_flow(g, cfg.pairs, cfg.data_seed);
    s.instance = problems::build_netflow(s.flow->network, s.scenario, s.flow->param, s.flow->d);
  } else if (pr.rfind("dmpc-", 0) == 0) {
    auto kind = problems::parse_coupling(pr.substr(5));
    auto coupling = problems::gen_coupling(g, kind, cfg.horizon, cfg.data_seed, cfg.inputs);
    auto systems = problems::gen_mpc_systems(coupling, cfg.state_dim, cfg.stable, cfg.data_seed + 1);
    s.instance = problems::build_dmpc(g, systems, coupling);
  } else {
    throw ArgumentError("unknown problem '" + pr + "'");
  }
  s.graph = s.instance.graph;
  s.coloring = netgraph::color_graph(s.graph);
  return s;
}

algorithms::RunOptions run_options(const ExperimentConfig& cfg) {
  algorithms::RunOptions o;
  o.stop.target = cfg.tol;
  o.stop.max_cs = cfg.max_cs;
  if (!cfg.metric.empty()) o.stop.metric = problems::parse_metric(cfg.metric);
  return o;
}

RunRecord run_algorithm(const std::string& a, Setup& s, double rho, const algorithms::RunOptions& opts) {
  auto& inst = s.instance;
  if (a == "dadmm") return algorithms::run_dadmm(inst, s.coloring, rho, opts);
  if (a == "dadmm-global") return algorithms::run_dadmm_global(inst, s.coloring, rho, opts);
  if (a == "dadmm-connected") return algorithms::run_dadmm_connected(inst, s.coloring, rho, opts);
  if (a == "dadmm-general")
    return algorithms::run_dadmm_general(inst, s.coloring, netgraph::augment_layout(s.graph, inst.layout), rho, opts);
  if (a == "kekatos") {
    if (netgraph::classify_variable(s.graph, inst.layout).connected) return algorithms::run_kekatos(inst, rho, opts);
    auto plan = netgraph::augment_layout(s.graph, inst.layout);
    return algorithms::run_kekatos(inst, rho, opts, &plan);
  }
  if (a == "schizas") return algorithms::run_schizas(inst, rho, opts);
  if (a == "zhu") return algorithms::run_zhu(inst, rho, opts);
  if (a == "subgradient") return algorithms::run_subgrad_consensus(inst, opts);
  if (a == "nesterov") {
    if (s.flow)
      return algorithms::run_nesterov_flow_dual(inst, s.flow->network, s.scenario, s.flow->param, s.flow->d, rho,
                                                opts);
    return algorithms::run_nesterov_distributed(inst, rho, opts);
  }
  throw ArgumentError("unknown algorithm '" + a + "'");
}

}  // namespace dopt::harness
