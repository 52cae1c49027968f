#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dopt/errors.hpp"
#include "dopt/harness/harness.hpp"

namespace {

using namespace dopt;

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct RunFlags {
  std::string config, model, edge_list, problem, algorithm, rho, rho_grid, precision, tol, max_cs, out, metric;
  std::string nodes, seed, data_seed;
  std::vector<std::string> sets;
  bool full_scale = false;
};

void add_run_flags(CLI::App* app, RunFlags& f, bool sweep) {
  app->add_option("--config", f.config, "key = value experiment file");
  app->add_option("--model", f.model, "erdos-renyi, watts-strogatz, barabasi-albert, geometric, lattice");
  app->add_option("--nodes", f.nodes, "node count");
  app->add_option("--seed", f.seed, "network seed");
  app->add_option("--edge-list", f.edge_list, "read the network from an edge list");
  app->add_option("--problem", f.problem, "problem tag");
  app->add_option("--data-seed", f.data_seed, "problem data seed");
  app->add_option("--algorithm", f.algorithm, "comma-separated algorithms");
  app->add_option("--rho", f.rho, "augmented Lagrangian parameter (Lipschitz constant for nesterov)");
  if (sweep) {
    app->add_option("--rho-grid", f.rho_grid, "comma-separated grid");
    app->add_option("--precision", f.precision, "refinement precision xi");
  }
  app->add_option("--tol", f.tol, "target relative error");
  app->add_option("--max-cs", f.max_cs, "communication step cap");
  app->add_option("--metric", f.metric, "concat-inf, concat-2 or single-node");
  app->add_option("--out", f.out, "CSV output path (stdout when absent)");
  app->add_option("--set", f.sets, "extra config entry key=value")->take_all();
  app->add_flag("--full-scale", f.full_scale, "lift the desk-scale caps");
}

harness::ExperimentConfig build_config(const RunFlags& f) {
  harness::ExperimentConfig c = f.config.empty() ? harness::ExperimentConfig{} : harness::parse_config_file(f.config);
  auto put = [&](const char* key, const std::string& v) {
    if (!v.empty()) harness::set_config_key(c, key, v);
  };
  put("model", f.model);
  put("nodes", f.nodes);
  put("seed", f.seed);
  put("edge_list", f.edge_list);
  put("problem", f.problem);
  put("data_seed", f.data_seed);
  put("algorithm", f.algorithm);
  put("rho", f.rho);
  put("rho_grid", f.rho_grid);
  put("precision", f.precision);
  put("tol", f.tol);
  put("max_cs", f.max_cs);
  put("metric", f.metric);
  put("out", f.out);
  if (f.full_scale) c.full_scale = true;
  for (const auto& s : f.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ArgumentError("--set expects key=value, got '" + s + "'");
    if (!harness::set_config_key(c, s.substr(0, eq), s.substr(eq + 1)))
      throw ArgumentError("unknown key '" + s.substr(0, eq) + "'");
  }
  harness::validate(c);
  return c;
}

int run(const harness::ExperimentConfig& c) {
  std::ofstream file;
  std::ostream* csv = &std::cout;
  if (!c.out.empty()) {
    file.open(c.out);
    if (!file) throw std::runtime_error("cannot write '" + c.out + "'");
    csv = &file;
  }
  auto summary = harness::run_experiment(c, *csv);
  harness::write_summary(summary, c.out.empty() ? std::cerr : std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed ADMM laboratory"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a network and write its edge list");
  std::string gen_model = "geometric", gen_out, gen_coloring;
  int gen_nodes = 50;
  std::uint64_t gen_seed = 1;
  gen->add_option("--model", gen_model, "network model");
  gen->add_option("--nodes", gen_nodes, "node count");
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_option("--out", gen_out, "edge list path (stdout when absent)");
  gen->add_option("--coloring", gen_coloring, "also write the greedy coloring here");
  bool gen_full = false;
  gen->add_flag("--full-scale", gen_full, "allow more than 200 nodes");

  RunFlags solve_flags, sweep_flags, classify_flags;
  auto* solve = app.add_subcommand("solve", "run algorithms at one rho");
  add_run_flags(solve, solve_flags, false);
  auto* sweep = app.add_subcommand("sweep", "sweep rho over a grid, optionally refined");
  add_run_flags(sweep, sweep_flags, true);

  auto* bench = app.add_subcommand("bench", "run a benchmark suite");
  std::string suite, bench_out;
  std::vector<int> bench_nodes;
  harness::BenchOptions bopts;
  bench->add_option("suite", suite, "consensus-all-nets, cs-apps, netflow, dmpc")->required();
  bench->add_option("--nodes", bench_nodes, "network sizes")->delimiter(',');
  bench->add_option("--seed", bopts.seed, "seed");
  bench->add_option("--max-cs", bopts.max_cs, "communication step cap");
  bench->add_option("--tol", bopts.tol, "target relative error");
  bench->add_option("--out", bench_out, "CSV with every run");
  bench->add_flag("--full-scale", bopts.full_scale, "allow more than 200 nodes");

  auto* classify = app.add_subcommand("classify", "report the variable class and Steiner plan of a problem");
  add_run_flags(classify, classify_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*gen) {
      if (gen_nodes > 200 && !gen_full) throw ArgumentError("more than 200 nodes needs --full-scale");
      auto g = netgraph::gen_graph(netgraph::parse_model(gen_model), gen_nodes, gen_seed);
      if (gen_out.empty()) {
        netgraph::write_edge_list(g, std::cout);
      } else {
        std::ofstream out(gen_out);
        if (!out) throw std::runtime_error("cannot write '" + gen_out + "'");
        netgraph::write_edge_list(g, out);
      }
      if (!gen_coloring.empty()) {
        std::ofstream out(gen_coloring);
        if (!out) throw std::runtime_error("cannot write '" + gen_coloring + "'");
        netgraph::write_coloring(netgraph::color_graph(g), out);
      }
      return 0;
    }
    if (*solve) {
      auto c = build_config(solve_flags);
      if (!c.rho) {
        bool needs = false;
        for (const auto& a : c.algorithms) needs = needs || harness::uses_rho(a);
        if (needs) throw ArgumentError("solve needs --rho; use sweep for a grid");
      }
      return run(c);
    }
    if (*sweep) {
      auto c = build_config(sweep_flags);
      c.rho.reset();
      return run(c);
    }
    if (*bench) {
      bopts.sizes = bench_nodes;
      std::ofstream file;
      if (!bench_out.empty()) {
        file.open(bench_out);
        if (!file) throw std::runtime_error("cannot write '" + bench_out + "'");
      }
      harness::bench_suite(suite, bopts, std::cout, bench_out.empty() ? nullptr : &file);
      return 0;
    }
    if (*classify) {
      auto c = build_config(classify_flags);
      auto s = harness::make_setup(c);
      auto cls = netgraph::classify_variable(s.graph, s.instance.layout);
      netgraph::write_classification(cls, std::cout);
      std::cout << "colors: " << s.coloring.count() << '\n';
      if (!cls.connected) {
        auto plan = netgraph::augment_layout(s.graph, s.instance.layout);
        std::cout << "steiner plan (" << plan.augmented_count() << " components, " << plan.relay_node_count()
                  << " relay slots):\n";
        netgraph::write_steiner_plan(plan, std::cout);
      }
      return 0;
    }
  } catch (const ArgumentError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
