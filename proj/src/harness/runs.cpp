#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "dopt/errors.hpp"
#include "dopt/harness/harness.hpp"

namespace dopt::harness {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* csv_header() { return "algorithm,problem,rho,iteration,cs,scalars_sent,rel_error,status"; }

void write_csv_header(std::ostream& os) { os << csv_header() << '\n'; }

void write_csv_rows(std::ostream& os, const RunRecord& r, const std::string& problem) {
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    bool last = i + 1 == r.rows.size();
    os << r.algorithm << ',' << problem << ',' << format_double(r.rho) << ',' << row.iteration << ',' << row.cs
       << ',' << row.scalars << ',' << format_double(row.rel_error) << ','
       << (last ? algorithms::status_name(r.status) : "running") << '\n';
  }
}

std::vector<MetricsRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != csv_header()) throw ParseError("missing or wrong CSV header", 1);
  std::vector<MetricsRow> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 8) throw ParseError("expected 8 fields", lineno);
    try {
      MetricsRow r;
      r.algorithm = f[0];
      r.problem = f[1];
      r.rho = std::stod(f[2]);
      r.iteration = std::stol(f[3]);
      r.cs = std::stol(f[4]);
      r.scalars_sent = std::stoll(f[5]);
      r.rel_error = std::stod(f[6]);
      r.status = f[7];
      rows.push_back(std::move(r));
    } catch (const std::exception&) {
      throw ParseError("bad numeric field", lineno);
    }
  }
  return rows;
}

SweepResult sweep_rho(const RunAt& run, const std::vector<double>& grid, double precision,
                      std::vector<RunRecord>* runs) {
  if (grid.empty()) throw ArgumentError("rho grid is empty");
  SweepResult out;
  constexpr long kNever = std::numeric_limits<long>::max();
  std::map<double, SweepPoint> seen;
  auto eval = [&](double rho) {
    auto it = seen.find(rho);
    if (it != seen.end()) return it->second;
    RunRecord r = run(rho);
    SweepPoint pt{rho, r.cs_to_target, r.status, r.rows.empty() ? 1.0 : r.rows.back().rel_error};
    if (!std::isfinite(pt.final_error)) pt.final_error = std::numeric_limits<double>::infinity();
    seen[rho] = pt;
    out.table.push_back(pt);
    if (runs) runs->push_back(std::move(r));
    return pt;
  };
  auto cost = [](const SweepPoint& p) { return p.cs >= 0 ? p.cs : kNever; };

  std::vector<double> g(grid);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  std::size_t bi = 0;
  long bc = kNever;
  for (std::size_t i = 0; i < g.size(); ++i) {
    long c = cost(eval(g[i]));
    if (c < bc) {
      bc = c;
      bi = i;
    }
  }
  out.converged = bc != kNever;
  if (!out.converged) {
    double be = std::numeric_limits<double>::infinity();
    for (double r : g)
      if (seen[r].final_error < be) {
        be = seen[r].final_error;
        out.best_rho = r;
      }
    if (!std::isfinite(be)) out.best_rho = g.front();
    return out;
  }
  double anchor = g[bi];
  out.best_rho = anchor;
  out.best_cs = bc;
  if (!(precision > 0)) return out;

  out.refined = true;
  // Decimal precisions such as 0.1 give exact lattice points m / 10 when the anchor lies on them.
  double inv = 1.0 / precision;
  double m0 = anchor * inv;
  bool decimal = std::abs(inv - std::round(inv)) < 1e-9 && std::abs(m0 - std::round(m0)) < 1e-9;
  auto at = [&](long j) {
    if (decimal) return (std::round(m0) + static_cast<double>(j)) / std::round(inv);
    return anchor + static_cast<double>(j) * precision;
  };
  auto cost_j = [&](long j) { return at(j) > 0 ? cost(eval(at(j))) : kNever; };
  double lo = bi > 0 ? g[bi - 1] : anchor / 10.0;
  double hi = bi + 1 < g.size() ? g[bi + 1] : anchor * 10.0;
  long ja = static_cast<long>(std::ceil((lo - anchor) / precision));
  long jb = static_cast<long>(std::floor((hi - anchor) / precision));
  while (at(ja) <= 0) ++ja;
  const double phi = 0.3819660112501051;
  while (jb - ja > 2) {
    long step = std::max(1L, std::lround(phi * static_cast<double>(jb - ja)));
    long c = ja + step, d = jb - step;
    if (c >= d) break;
    if (cost_j(c) <= cost_j(d))
      jb = d;
    else
      ja = c;
  }
  for (long j = ja; j <= jb; ++j) cost_j(j);

  long cur = 0;
  long cur_cost = bc;
  for (long j = ja; j <= jb; ++j) {
    long c = cost_j(j);
    if (c < cur_cost || (c == cur_cost && j < cur)) {
      cur = j;
      cur_cost = c;
    }
  }
  for (int moves = 0; moves < 200; ++moves) {
    long left = cost_j(cur - 1), right = cost_j(cur + 1);
    if (left >= cur_cost && right >= cur_cost) {
      out.certified = true;
      break;
    }
    if (left < cur_cost && left <= right) {
      --cur;
      cur_cost = left;
    } else {
      ++cur;
      cur_cost = right;
    }
  }
  out.best_rho = at(cur);
  out.best_cs = cur_cost;
  return out;
}

std::vector<RunSummary> run_experiment(const ExperimentConfig& cfg, std::ostream& csv) {
  validate(cfg);
  Setup setup = make_setup(cfg);
  auto opts = run_options(cfg);
  write_csv_header(csv);
  std::vector<RunSummary> out;
  for (const auto& alg : cfg.algorithms) {
    RunSummary s;
    s.algorithm = alg;
    if (cfg.rho || !uses_rho(alg)) {
      double rho = cfg.rho.value_or(0.0);
      RunRecord r = run_algorithm(alg, setup, rho, opts);
      write_csv_rows(csv, r, cfg.problem);
      s.rho = r.rho;
      s.status = r.status;
      s.cs_to_target = r.cs_to_target;
      s.final_error = r.rows.empty() ? 1.0 : r.rows.back().rel_error;
    } else {
      std::vector<RunRecord> runs;
      auto sw = sweep_rho([&](double rho) { return run_algorithm(alg, setup, rho, opts); }, cfg.rho_grid,
                          cfg.precision, &runs);
      for (const auto& r : runs) write_csv_rows(csv, r, cfg.problem);
      s.swept = true;
      s.refined = sw.refined;
      s.certified = sw.certified;
      s.rho = sw.best_rho;
      s.cs_to_target = sw.best_cs;
      for (const auto& p : sw.table)
        if (p.rho == sw.best_rho) {
          s.status = p.status;
          s.final_error = p.final_error;
        }
    }
    out.push_back(s);
  }
  return out;
}

void write_summary(const std::vector<RunSummary>& s, std::ostream& os) {
  for (const auto& r : s) {
    os << r.algorithm << ": rho=" << format_double(r.rho) << " status=" << algorithms::status_name(r.status)
       << " cs_to_target=";
    if (r.cs_to_target >= 0)
      os << r.cs_to_target;
    else
      os << "none";
    os << " final_error=" << format_double(r.final_error);
    if (r.refined)
      os << (r.certified ? " (refined, certified)" : " (refined, not certified)");
    else if (r.swept)
      os << " (grid best)";
    os << '\n';
  }
}

}  // namespace dopt::harness
