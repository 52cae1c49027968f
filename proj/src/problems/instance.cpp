#include "dopt/problems/instance.hpp"

#include <cmath>
#include <limits>

#include "dopt/errors.hpp"

namespace dopt::problems {

Vec LocalObjective::gradient(const Vec&) const {
  throw ContractError("node function has no gradient oracle");
}

std::string metric_name(ErrorMetric m) {
  switch (m) {
    case ErrorMetric::ConcatInf: return "concat-inf";
    case ErrorMetric::Concat2: return "concat-2";
    case ErrorMetric::SingleNode: return "single-node";
  }
  return "?";
}

ErrorMetric parse_metric(const std::string& s) {
  if (s == "concat-inf") return ErrorMetric::ConcatInf;
  if (s == "concat-2") return ErrorMetric::Concat2;
  if (s == "single-node") return ErrorMetric::SingleNode;
  throw ArgumentError("unknown error metric '" + s + "'");
}

Vec gather(const Vec& x, const std::vector<int>& support) {
  Vec out(support.size());
  for (std::size_t k = 0; k < support.size(); ++k) out[k] = x[support[k]];
  return out;
}

namespace {

double ratio(double num, double den) {
  if (!std::isfinite(num)) return std::numeric_limits<double>::infinity();
  return den > 0 ? num / den : num;
}

}  // namespace

double ProblemInstance::rel_error(const Estimates& x, ErrorMetric m) const {
  bool inf = m == ErrorMetric::ConcatInf;
  if (report) {
    Vec r = report(x);
    Vec d = r - report_ref;
    return inf ? ratio(d.lpNorm<Eigen::Infinity>(), report_ref.lpNorm<Eigen::Infinity>())
               : ratio(d.norm(), report_ref.norm());
  }
  if (m == ErrorMetric::SingleNode) {
    Vec ref = gather(x_ref, layout.S(0));
    return ratio((x[0] - ref).norm(), ref.norm());
  }
  double num = 0.0, den = 0.0;
  for (int p = 0; p < P(); ++p) {
    const auto& S = layout.S(p);
    for (std::size_t k = 0; k < S.size(); ++k) {
      double e = x[p][k] - x_ref[S[k]];
      double r = x_ref[S[k]];
      if (inf) {
        num = std::max(num, std::abs(e));
        den = std::max(den, std::abs(r));
      } else {
        num += e * e;
        den += r * r;
      }
      if (!std::isfinite(e)) return std::numeric_limits<double>::infinity();
    }
  }
  return inf ? ratio(num, den) : ratio(std::sqrt(num), std::sqrt(den));
}

double ProblemInstance::objective(const Vec& x) const {
  double f = 0.0;
  for (const auto& node : nodes) f += node->value(gather(x, node->support()));
  return f;
}

Vec ProblemInstance::average(const Estimates& x) const {
  Vec sum = Vec::Zero(n());
  Vec cnt = Vec::Zero(n());
  for (int p = 0; p < P(); ++p) {
    const auto& S = layout.S(p);
    for (std::size_t k = 0; k < S.size(); ++k) {
      sum[S[k]] += x[p][k];
      cnt[S[k]] += 1.0;
    }
  }
  return sum.cwiseQuotient(cnt);
}

Estimates ProblemInstance::start() const {
  if (!initial.empty()) return initial;
  Estimates e(P());
  for (int p = 0; p < P(); ++p) e[p] = Vec::Zero(static_cast<Eigen::Index>(layout.S(p).size()));
  return e;
}

void ProblemInstance::reset() {
  for (auto& node : nodes) node->reset();
}

long ProblemInstance::truncations() const {
  long t = 0;
  for (const auto& node : nodes) t += node->truncations();
  return t;
}

}  // namespace dopt::problems
