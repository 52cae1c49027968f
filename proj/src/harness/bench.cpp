#include <iomanip>
#include <ostream>

#include "dopt/errors.hpp"
#include "dopt/harness/harness.hpp"

namespace dopt::harness {

namespace {

struct Cell {
  double rho = 0.0;
  long cs = -1;
};

Cell best_run(Setup& s, const std::string& alg, const std::vector<double>& grid, const algorithms::RunOptions& o,
              const std::string& tag, std::ostream* csv) {
  std::vector<RunRecord> runs;
  Cell c;
  if (!uses_rho(alg)) {
    runs.push_back(run_algorithm(alg, s, 0.0, o));
    c.cs = runs.back().cs_to_target;
  } else {
    auto sw = sweep_rho([&](double rho) { return run_algorithm(alg, s, rho, o); }, grid, 0.0, &runs);
    c.rho = sw.best_rho;
    c.cs = sw.best_cs;
  }
  if (csv)
    for (const auto& r : runs) write_csv_rows(*csv, r, tag);
  return c;
}

std::string show(const Cell& c) {
  std::string s = c.cs >= 0 ? std::to_string(c.cs) : std::string(">cap");
  if (c.rho > 0) s += " (" + format_double(c.rho) + ")";
  return s;
}

algorithms::RunOptions options(const BenchOptions& b) {
  algorithms::RunOptions o;
  o.stop.target = b.tol;
  o.stop.max_cs = b.max_cs;
  return o;
}

void check_sizes(const BenchOptions& b, const std::vector<int>& sizes) {
  for (int P : sizes)
    if (P > 200 && !b.full_scale) throw ArgumentError("suite sizes above 200 need --full-scale");
}

}  // namespace

std::vector<std::string> suite_names() { return {"consensus-all-nets", "cs-apps", "netflow", "dmpc"}; }

void bench_suite(const std::string& name, const BenchOptions& b, std::ostream& report, std::ostream* csv) {
  auto o = options(b);
  auto grid = default_rho_grid();
  if (csv) write_csv_header(*csv);
  auto row = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) report << (i ? " | " : "") << std::left << std::setw(18) << cells[i];
    report << '\n';
  };

  if (name == "consensus-all-nets") {
    std::vector<int> sizes = b.sizes.empty() ? std::vector<int>{10, 50} : b.sizes;
    check_sizes(b, sizes);
    const std::vector<std::string> algs{"dadmm", "zhu", "schizas", "subgradient"};
    row({"model", "P", "dadmm", "zhu", "schizas", "subgradient"});
    for (const char* model : {"erdos-renyi", "watts-strogatz", "barabasi-albert", "geometric", "lattice"})
      for (int P : sizes) {
        ExperimentConfig cfg;
        cfg.model = model;
        cfg.nodes = P;
        cfg.seed = b.seed;
        cfg.data_seed = b.seed;
        cfg.problem = "consensus";
        Setup s = make_setup(cfg);
        std::vector<std::string> cells{model, std::to_string(P)};
        for (const auto& a : algs)
          cells.push_back(show(best_run(s, a, grid, o, "consensus@" + std::string(model) + "-" + std::to_string(P), csv)));
        row(cells);
      }
  } else if (name == "cs-apps") {
    std::vector<int> sizes = b.sizes.empty() ? std::vector<int>{10} : b.sizes;
    check_sizes(b, sizes);
    row({"problem", "P", "dadmm", "zhu", "schizas"});
    for (const char* prob : {"bp-row", "bpdn-row", "lasso-row", "bp-col", "bpdn-col", "rlasso-col", "lasso-col", "svm"})
      for (int P : sizes) {
        ExperimentConfig cfg;
        cfg.model = "geometric";
        cfg.nodes = P;
        cfg.seed = b.seed;
        cfg.data_seed = b.seed;
        cfg.problem = prob;
        cfg.rows_per_node = std::max(1, 40 / P);
        Setup s = make_setup(cfg);
        std::vector<std::string> cells{prob, std::to_string(P)};
        for (const char* a : {"dadmm", "zhu", "schizas"})
          cells.push_back(show(best_run(s, a, grid, o, std::string(prob) + "@geometric-" + std::to_string(P), csv)));
        row(cells);
      }
  } else if (name == "netflow") {
    std::vector<int> sizes = b.sizes.empty() ? std::vector<int>{200} : b.sizes;
    check_sizes(b, sizes);
    const std::vector<double> lgrid{1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 5000, 15000};
    row({"scenario", "P", "dadmm", "kekatos", "nesterov (L)"});
    for (const char* prob : {"flow1", "flow2"})
      for (int P : sizes) {
        ExperimentConfig cfg;
        cfg.model = "barabasi-albert";
        cfg.nodes = P;
        cfg.seed = b.seed;
        cfg.data_seed = b.seed;
        cfg.problem = prob;
        cfg.pairs = 2 * P;
        Setup s = make_setup(cfg);
        std::string tag = std::string(prob) + "@barabasi-albert-" + std::to_string(P);
        row({prob, std::to_string(P), show(best_run(s, "dadmm", grid, o, tag, csv)),
             show(best_run(s, "kekatos", grid, o, tag, csv)), show(best_run(s, "nesterov", lgrid, o, tag, csv))});
      }
  } else if (name == "dmpc") {
    std::vector<int> sizes = b.sizes.empty() ? std::vector<int>{30} : b.sizes;
    check_sizes(b, sizes);
    row({"coupling", "systems", "P", "dadmm", "kekatos"});
    for (const char* prob : {"dmpc-star", "dmpc-connected", "dmpc-nonconnected"})
      for (bool stable : {true, false})
        for (int P : sizes) {
          ExperimentConfig cfg;
          cfg.model = "geometric";
          cfg.nodes = P;
          cfg.seed = b.seed;
          cfg.data_seed = b.seed;
          cfg.problem = prob;
          cfg.stable = stable;
          Setup s = make_setup(cfg);
          std::string tag = std::string(prob) + (stable ? "-stable" : "-unstable") + "@geometric-" + std::to_string(P);
          row({prob, stable ? "stable" : "unstable", std::to_string(P), show(best_run(s, "dadmm", grid, o, tag, csv)),
               show(best_run(s, "kekatos", grid, o, tag, csv))});
        }
  } else {
    throw ArgumentError("unknown suite '" + name + "'");
  }
}

}  // namespace dopt::harness
