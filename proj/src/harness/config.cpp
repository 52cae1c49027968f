#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dopt/errors.hpp"
#include "dopt/harness/harness.hpp"

namespace dopt::harness {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ArgumentError(key + ": expected a number, got '" + v + "'");
  return x;
}

long to_long(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long x = 0;
  try {
    x = std::stol(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ArgumentError(key + ": expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ArgumentError(key + ": expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

}  // namespace

std::vector<double> default_rho_grid() { return {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 1e2}; }

bool set_config_key(ExperimentConfig& c, const std::string& key, const std::string& v) {
  if (key == "model") c.model = v;
  else if (key == "nodes") c.nodes = static_cast<int>(to_long(key, v));
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_long(key, v));
  else if (key == "edge_list") c.edge_list = v;
  else if (key == "problem") c.problem = v;
  else if (key == "data_seed") c.data_seed = static_cast<std::uint64_t>(to_long(key, v));
  else if (key == "rows_per_node") c.rows_per_node = static_cast<int>(to_long(key, v));
  else if (key == "rows") c.rows = static_cast<int>(to_long(key, v));
  else if (key == "columns") c.columns = static_cast<int>(to_long(key, v));
  else if (key == "sparsity") c.sparsity = static_cast<int>(to_long(key, v));
  else if (key == "noise") c.noise = to_double(key, v);
  else if (key == "beta") c.beta = to_double(key, v);
  else if (key == "gamma") c.gamma = to_double(key, v);
  else if (key == "delta") c.delta = to_double(key, v);
  else if (key == "sigma") c.sigma = to_double(key, v);
  else if (key == "pairs") c.pairs = static_cast<int>(to_long(key, v));
  else if (key == "horizon") c.horizon = static_cast<int>(to_long(key, v));
  else if (key == "state_dim") c.state_dim = static_cast<int>(to_long(key, v));
  else if (key == "inputs") c.inputs = static_cast<int>(to_long(key, v));
  else if (key == "stable") c.stable = to_bool(key, v);
  else if (key == "algorithm") c.algorithms = split_list(v);
  else if (key == "rho") c.rho = to_double(key, v);
  else if (key == "rho_grid") {
    c.rho_grid.clear();
    for (const auto& s : split_list(v)) c.rho_grid.push_back(to_double(key, s));
  } else if (key == "precision") c.precision = to_double(key, v);
  else if (key == "tol") c.tol = to_double(key, v);
  else if (key == "max_cs") c.max_cs = to_long(key, v);
  else if (key == "metric") c.metric = v;
  else if (key == "out") c.out = v;
  else if (key == "full_scale") c.full_scale = to_bool(key, v);
  else return false;
  return true;
}

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("missing key", lineno);
    try {
      if (!set_config_key(c, key, value)) throw ParseError("unknown key '" + key + "'", lineno);
    } catch (const ArgumentError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config '" + path + "'");
  return parse_config(in);
}

void write_config(const ExperimentConfig& c, std::ostream& os) {
  auto num = [](double v) { return format_double(v); };
  if (!c.model.empty()) os << "model = " << c.model << '\n';
  os << "nodes = " << c.nodes << '\n';
  os << "seed = " << c.seed << '\n';
  if (!c.edge_list.empty()) os << "edge_list = " << c.edge_list << '\n';
  if (!c.problem.empty()) os << "problem = " << c.problem << '\n';
  os << "data_seed = " << c.data_seed << '\n';
  os << "rows_per_node = " << c.rows_per_node << '\n';
  os << "rows = " << c.rows << '\n';
  os << "columns = " << c.columns << '\n';
  os << "sparsity = " << c.sparsity << '\n';
  os << "noise = " << num(c.noise) << '\n';
  if (c.beta) os << "beta = " << num(*c.beta) << '\n';
  if (c.gamma) os << "gamma = " << num(*c.gamma) << '\n';
  os << "delta = " << num(c.delta) << '\n';
  os << "sigma = " << num(c.sigma) << '\n';
  os << "pairs = " << c.pairs << '\n';
  os << "horizon = " << c.horizon << '\n';
  os << "state_dim = " << c.state_dim << '\n';
  os << "inputs = " << c.inputs << '\n';
  os << "stable = " << (c.stable ? "true" : "false") << '\n';
  os << "algorithm = " << join(c.algorithms) << '\n';
  if (c.rho) os << "rho = " << num(*c.rho) << '\n';
  std::vector<std::string> grid;
  for (double r : c.rho_grid) grid.push_back(num(r));
  os << "rho_grid = " << join(grid) << '\n';
  os << "precision = " << num(c.precision) << '\n';
  os << "tol = " << num(c.tol) << '\n';
  os << "max_cs = " << c.max_cs << '\n';
  if (!c.metric.empty()) os << "metric = " << c.metric << '\n';
  if (!c.out.empty()) os << "out = " << c.out << '\n';
  os << "full_scale = " << (c.full_scale ? "true" : "false") << '\n';
}

void validate(const ExperimentConfig& c) {
  if (c.problem.empty()) throw ArgumentError("no problem given");
  auto probs = problem_names();
  if (std::find(probs.begin(), probs.end(), c.problem) == probs.end())
    throw ArgumentError("unknown problem '" + c.problem + "'");
  if (!c.edge_list.empty() && !c.model.empty()) throw ArgumentError("give either a model or an edge list, not both");
  if (!c.edge_list.empty() && !std::ifstream(c.edge_list)) throw ArgumentError("edge list '" + c.edge_list + "' not found");
  if (!c.model.empty()) netgraph::parse_model(c.model);
  if (c.edge_list.empty() && c.nodes < 2) throw ArgumentError("nodes must be at least 2");
  if (!c.full_scale && c.edge_list.empty() && c.nodes > 200)
    throw ArgumentError("nodes above 200 need full_scale = true");
  if (c.algorithms.empty()) throw ArgumentError("no algorithm given");
  auto algs = algorithm_names();
  for (const auto& a : c.algorithms)
    if (std::find(algs.begin(), algs.end(), a) == algs.end()) throw ArgumentError("unknown algorithm '" + a + "'");
  if (c.rho && !(*c.rho > 0)) throw ArgumentError("rho must be positive");
  if (c.rho_grid.empty()) throw ArgumentError("rho grid is empty");
  for (double r : c.rho_grid)
    if (!(r > 0)) throw ArgumentError("rho grid values must be positive");
  if (!(c.precision >= 0)) throw ArgumentError("precision must be nonnegative");
  if (!(c.tol > 0)) throw ArgumentError("tol must be positive");
  if (c.max_cs < 0) throw ArgumentError("max_cs must be nonnegative");
  if (!c.metric.empty()) problems::parse_metric(c.metric);
  if (c.rows_per_node < 1 || c.rows < 1 || c.columns < 1 || c.sparsity < 0 || c.pairs < 1 || c.horizon < 1 ||
      c.state_dim < 1 || c.inputs < 1)
    throw ArgumentError("problem sizes must be positive");
  if (!c.full_scale && c.columns > 1000) throw ArgumentError("variable dimension above 1000 needs full_scale = true");
  if (!(c.delta > 0) || !(c.sigma > 0) || !(c.noise >= 0)) throw ArgumentError("delta and sigma must be positive");
  if (c.beta && !(*c.beta > 0)) throw ArgumentError("beta must be positive");
  if (c.gamma && !(*c.gamma > 0)) throw ArgumentError("gamma must be positive");
}

}  // namespace dopt::harness
