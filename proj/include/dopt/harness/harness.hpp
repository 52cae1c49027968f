#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dopt/algorithms/algorithms.hpp"
#include "dopt/netgraph/coloring.hpp"
#include "dopt/problems/netflow.hpp"

namespace dopt::harness {

using algorithms::RunRecord;
using algorithms::RunStatus;

std::vector<double> default_rho_grid();

struct ExperimentConfig {
  // Network: generated from model/nodes/seed, or read from edge_list.
  std::string model;  // empty means geometric unless edge_list is set
  int nodes = 50;
  std::uint64_t seed = 1;
  std::string edge_list;

  // Problem.
  std::string problem;
  std::uint64_t data_seed = 1;
  int rows_per_node = 4;  // row partitions
  int rows = 40;          // column partitions
  int columns = 100;
  int sparsity = 5;
  double noise = 0.01;    // bpdn, lasso, rlasso
  std::optional<double> beta;   // bpdn 0.3, svm 1
  std::optional<double> gamma;  // lasso: half the l1 norm of the sparse truth
  double delta = 1e-2;
  double sigma = 0.1;
  int pairs = 100;
  int horizon = 5;
  int state_dim = 3;
  int inputs = 1;
  bool stable = true;

  // Runs.
  std::vector<std::string> algorithms{"dadmm"};
  std::optional<double> rho;  // Lipschitz constant for nesterov
  std::vector<double> rho_grid = default_rho_grid();
  double precision = 0.0;     // 0 disables refinement
  double tol = 1e-4;
  long max_cs = 1000;
  std::string metric;         // empty means the instance default
  std::string out;
  bool full_scale = false;
};

// Flat "key = value" lines with '#' comments. Throws ParseError (line numbers) or ArgumentError.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig parse_config_file(const std::string& path);
void write_config(const ExperimentConfig& cfg, std::ostream& os);
// Sets one key from its text value; false for unknown keys.
bool set_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);
// Throws ArgumentError naming the first violated rule.
void validate(const ExperimentConfig& cfg);

std::vector<std::string> problem_names();
std::vector<std::string> algorithm_names();

struct Setup {
  netgraph::Graph graph;
  netgraph::Coloring coloring;
  problems::ProblemInstance instance;
  std::optional<problems::FlowData> flow;
  int scenario = 0;
};

netgraph::Graph make_network(const ExperimentConfig& cfg);
Setup make_setup(const ExperimentConfig& cfg);
// Builds the problem over a given network (flows orient it with data_seed).
Setup make_setup(const ExperimentConfig& cfg, const netgraph::Graph& g);

algorithms::RunOptions run_options(const ExperimentConfig& cfg);
// rho is the Lipschitz constant for nesterov and is ignored by subgradient.
RunRecord run_algorithm(const std::string& algorithm, Setup& setup, double rho, const algorithms::RunOptions& opts);
bool uses_rho(const std::string& algorithm);

// CSV with header algorithm,problem,rho,iteration,cs,scalars_sent,rel_error,status.
struct MetricsRow {
  std::string algorithm, problem;
  double rho = 0.0;
  long iteration = 0, cs = 0;
  long long scalars_sent = 0;
  double rel_error = 0.0;
  std::string status;
};
const char* csv_header();
void write_csv_header(std::ostream& os);
// Intermediate rows carry status "running"; the last row carries the final status.
void write_csv_rows(std::ostream& os, const RunRecord& r, const std::string& problem);
std::vector<MetricsRow> read_csv(std::istream& is);
std::string format_double(double v);

struct SweepPoint {
  double rho = 0.0;
  long cs = -1;  // CS to target, -1 when not reached
  RunStatus status = RunStatus::MaxCs;
  double final_error = 0.0;
};

struct SweepResult {
  double best_rho = 0.0;
  long best_cs = -1;
  bool converged = false;  // some evaluated point reached the target
  bool refined = false;
  bool certified = false;  // CS(rho - xi) >= CS(rho) <= CS(rho + xi)
  // Without convergence, best_rho is the point with the smallest final error.
  std::vector<SweepPoint> table;  // every evaluated rho, in evaluation order
};

using RunAt = std::function<RunRecord(double rho)>;
// Grid argmin of CS to target (ties to the smaller rho). With precision xi > 0: golden-section search
// over rho_g + j*xi between the grid neighbors of the winner rho_g, then steps of xi until certified.
SweepResult sweep_rho(const RunAt& run, const std::vector<double>& grid, double precision = 0.0,
                      std::vector<RunRecord>* runs = nullptr);

struct RunSummary {
  std::string algorithm;
  double rho = 0.0;
  RunStatus status = RunStatus::MaxCs;
  long cs_to_target = -1;
  double final_error = 0.0;
  bool swept = false;
  bool refined = false;
  bool certified = false;
};

// One run per algorithm at rho, or a sweep over the grid when rho is unset.
// Writes every run's rows to csv (header first) and returns one summary per algorithm.
std::vector<RunSummary> run_experiment(const ExperimentConfig& cfg, std::ostream& csv);
void write_summary(const std::vector<RunSummary>& s, std::ostream& os);

std::vector<std::string> suite_names();
struct BenchOptions {
  std::vector<int> sizes;  // empty means the suite default
  std::uint64_t seed = 1;
  long max_cs = 1000;
  double tol = 1e-4;
  bool full_scale = false;
};
// Writes a plain-text table to report and all run rows to csv (may be null).
void bench_suite(const std::string& name, const BenchOptions& opts, std::ostream& report, std::ostream* csv);

}  // namespace dopt::harness
