#include <algorithm>
#include <cassert>
#include <limits>

#include "dopt/algorithms/algorithms.hpp"
#include "dopt/errors.hpp"
#include "record.hpp"

namespace dopt::algorithms {

using netgraph::Coloring;
using netgraph::SteinerPlan;

namespace {

void require_rho(double rho) {
  if (!(rho > 0)) throw ArgumentError("rho must be positive");
}

void require_global(const ProblemInstance& inst, const char* who) {
  for (int p = 0; p < inst.P(); ++p)
    if (static_cast<int>(inst.layout.S(p).size()) != inst.n())
      throw ContractError(std::string(who) + " needs a global variable");
  if (inst.P() < 2) throw ContractError(std::string(who) + " needs at least two nodes");
}

void require_coloring(const ProblemInstance& inst, const Coloring& c) {
  if (static_cast<int>(c.color_of.size()) != inst.P() || !netgraph::is_proper(inst.graph, c))
    throw ContractError("coloring does not fit the network");
}

// Debug-only schedule check: a neighbor of smaller color must already hold
// iteration k+1, any other neighbor must still hold iteration k.
class StalenessGuard {
 public:
  explicit StalenessGuard(int P) {
#ifndef NDEBUG
    stamp_.assign(P, 0);
#else
    (void)P;
#endif
  }
  void check(const Coloring& c, const netgraph::Graph& g, int p, long k) const {
#ifndef NDEBUG
    for (int j : g.neighbors(p)) {
      long want = c.color_of[j] < c.color_of[p] ? k + 1 : k;
      assert(stamp_[j] == want && "stale or premature neighbor read");
    }
#else
    (void)c, (void)g, (void)p, (void)k;
#endif
  }
  void publish(int p, long k) {
#ifndef NDEBUG
    stamp_[p] = k + 1;
#else
    (void)p, (void)k;
#endif
  }

 private:
#ifndef NDEBUG
  std::vector<long> stamp_;
#endif
};

// Per-node copy slots over S_p and the relay set S_p', with neighbor links
// restricted to the (augmented) induced subgraph of each component.
struct Slot {
  int comp = 0;
  bool relay = false;
  std::vector<std::pair<int, int>> nbr;  // (node j, slot index at j)
};

struct SlotLayout {
  std::vector<std::vector<Slot>> slots;
  std::vector<std::vector<int>> own;  // slot index of S_p[k]
  long long scalars_per_cs = 0;
};

SlotLayout make_slots(const ProblemInstance& inst, const SteinerPlan& plan) {
  int P = inst.P();
  SlotLayout L;
  L.slots.resize(P);
  L.own.resize(P);
  for (int p = 0; p < P; ++p) {
    const auto& S = inst.layout.S(p);
    const auto& R = plan.relays[p];
    std::vector<int> all;
    std::merge(S.begin(), S.end(), R.begin(), R.end(), std::back_inserter(all));
    for (int l : all) {
      Slot s;
      s.comp = l;
      s.relay = !std::binary_search(S.begin(), S.end(), l);
      if (!s.relay) L.own[p].push_back(static_cast<int>(L.slots[p].size()));
      L.slots[p].push_back(std::move(s));
    }
  }
  auto slot_of = [&](int p, int l) {
    const auto& sl = L.slots[p];
    auto it = std::lower_bound(sl.begin(), sl.end(), l, [](const Slot& s, int c) { return s.comp < c; });
    if (it == sl.end() || it->comp != l) throw ContractError("steiner plan edge leaves the component");
    return static_cast<int>(it - sl.begin());
  };
  for (int l = 0; l < inst.n(); ++l)
    for (const auto& [a, b] : plan.components[l].edges) {
      int sa = slot_of(a, l), sb = slot_of(b, l);
      L.slots[a][sa].nbr.emplace_back(b, sb);
      L.slots[b][sb].nbr.emplace_back(a, sa);
    }
  for (auto& node : L.slots)
    for (auto& s : node) {
      std::sort(s.nbr.begin(), s.nbr.end());
      L.scalars_per_cs += static_cast<long long>(s.nbr.size());
    }
  return L;
}

using Copies = std::vector<Vec>;

Estimates own_part(const SlotLayout& L, const Copies& x) {
  Estimates out(x.size());
  for (std::size_t p = 0; p < x.size(); ++p) {
    out[p].resize(L.own[p].size());
    for (std::size_t k = 0; k < L.own[p].size(); ++k) out[p][k] = x[p][L.own[p][k]];
  }
  return out;
}

Copies initial_copies(const ProblemInstance& inst, const SlotLayout& L) {
  Estimates s = inst.start();
  Copies x(inst.P());
  for (int p = 0; p < inst.P(); ++p) {
    x[p] = Vec::Zero(L.slots[p].size());
    for (std::size_t k = 0; k < L.own[p].size(); ++k) x[p][L.own[p][k]] = s[p][k];
  }
  return x;
}

// Solves node p's subproblem for slot-level (v, w): own slots through the
// oracle, relay slots by the closed form -v/w.
void local_update(ProblemInstance& inst, const SlotLayout& L, int p, const Vec& v, const Vec& w, Vec& out) {
  const auto& own = L.own[p];
  Vec vo(own.size()), wo(own.size());
  for (std::size_t k = 0; k < own.size(); ++k) {
    vo[k] = v[own[k]];
    wo[k] = w[own[k]];
  }
  Vec xo = inst.nodes[p]->solve(vo, wo);
  for (std::size_t s = 0; s < L.slots[p].size(); ++s)
    if (L.slots[p][s].relay) out[s] = -v[s] / w[s];
  for (std::size_t k = 0; k < own.size(); ++k) out[own[k]] = xo[k];
}

RunRecord slot_dadmm(ProblemInstance& inst, const Coloring& coloring, const SteinerPlan& plan, double rho,
                     const RunOptions& opts, std::string name) {
  require_rho(rho);
  require_coloring(inst, coloring);
  inst.reset();
  SlotLayout L = make_slots(inst, plan);
  int P = inst.P();
  Copies x = initial_copies(inst, L);
  Copies gamma(P);
  for (int p = 0; p < P; ++p) gamma[p] = Vec::Zero(L.slots[p].size());
  detail::Recorder rec(&inst, opts, std::move(name), rho, 1, L.scalars_per_cs);
  StalenessGuard guard(P);
  try {
    bool go = rec.begin(own_part(L, x));
    while (go) {
      long k = rec.iteration();
      for (const auto& cls : coloring.classes)
        for (int p : cls) {
          guard.check(coloring, inst.graph, p, k);
          const auto& sl = L.slots[p];
          Vec v(sl.size()), w(sl.size());
          for (std::size_t s = 0; s < sl.size(); ++s) {
            double sum = 0.0;
            for (const auto& [j, t] : sl[s].nbr) sum += x[j][t];
            v[s] = gamma[p][s] - rho * sum;
            w[s] = rho * static_cast<double>(sl[s].nbr.size());
          }
          local_update(inst, L, p, v, w, x[p]);
          guard.publish(p, k);
        }
      for (int p = 0; p < P; ++p) {
        const auto& sl = L.slots[p];
        for (std::size_t s = 0; s < sl.size(); ++s) {
          double acc = 0.0;
          for (const auto& [j, t] : sl[s].nbr) acc += x[p][s] - x[j][t];
          gamma[p][s] += rho * acc;
        }
      }
      go = rec.step(own_part(L, x));
    }
  } catch (const NumericalError& e) {
    rec.fail(e.what());
  }
  return rec.finish(own_part(L, x));
}

}  // namespace

RunRecord run_dadmm_global(ProblemInstance& inst, const Coloring& coloring, double rho, const RunOptions& opts) {
  require_rho(rho);
  require_global(inst, "run_dadmm_global");
  require_coloring(inst, coloring);
  inst.reset();
  int P = inst.P(), n = inst.n();
  const auto& g = inst.graph;
  Estimates x = inst.start();
  std::vector<Vec> gamma(P, Vec::Zero(n));
  long long per_cs = 2LL * g.edge_count() * n;
  detail::Recorder rec(&inst, opts, "dadmm-global", rho, 1, per_cs);
  StalenessGuard guard(P);
  try {
    bool go = rec.begin(x);
    while (go) {
      long k = rec.iteration();
      for (const auto& cls : coloring.classes)
        for (int p : cls) {
          guard.check(coloring, g, p, k);
          double D = g.degree(p);
          double tau = 1.0 / (rho * D);
          Vec z = Vec::Zero(n);
          for (int j : g.neighbors(p)) z += x[j];
          z /= D;
          Vec eta = z - tau * gamma[p];
          x[p] = inst.nodes[p]->solve(-eta / tau, Vec::Constant(n, 1.0 / tau));
          guard.publish(p, k);
        }
      for (int p = 0; p < P; ++p) {
        Vec acc = Vec::Zero(n);
        for (int j : g.neighbors(p)) acc += x[p] - x[j];
        gamma[p] += rho * acc;
      }
      go = rec.step(x);
    }
  } catch (const NumericalError& e) {
    rec.fail(e.what());
  }
  return rec.finish(std::move(x));
}

RunRecord run_dadmm_connected(ProblemInstance& inst, const Coloring& coloring, double rho,
                              const RunOptions& opts) {
  auto cls = netgraph::classify_variable(inst.graph, inst.layout);
  if (!cls.connected)
    throw ContractError("variable is not connected; use run_dadmm_general with a Steiner plan");
  return slot_dadmm(inst, coloring, netgraph::identity_plan(inst.layout), rho, opts, "dadmm-connected");
}

RunRecord run_dadmm_general(ProblemInstance& inst, const Coloring& coloring, const SteinerPlan& plan, double rho,
                            const RunOptions& opts) {
  netgraph::validate_plan(inst.graph, inst.layout, plan);
  return slot_dadmm(inst, coloring, plan, rho, opts, "dadmm-general");
}

RunRecord run_dadmm(ProblemInstance& inst, const Coloring& coloring, double rho, const RunOptions& opts) {
  auto cls = netgraph::classify_variable(inst.graph, inst.layout);
  RunRecord r;
  if (cls.verdict == netgraph::VariableClass::Global)
    r = run_dadmm_global(inst, coloring, rho, opts);
  else if (cls.connected)
    r = run_dadmm_connected(inst, coloring, rho, opts);
  else
    r = run_dadmm_general(inst, coloring, netgraph::augment_layout(inst.graph, inst.layout), rho, opts);
  r.algorithm = "dadmm";
  return r;
}

RunRecord run_kekatos(ProblemInstance& inst, double rho, const RunOptions& opts, const SteinerPlan* plan) {
  require_rho(rho);
  SteinerPlan identity;
  if (plan) {
    netgraph::validate_plan(inst.graph, inst.layout, *plan);
  } else {
    if (!netgraph::classify_variable(inst.graph, inst.layout).connected)
      throw ContractError("kekatos needs a connected variable or a Steiner plan");
    identity = netgraph::identity_plan(inst.layout);
    plan = &identity;
  }
  inst.reset();
  SlotLayout L = make_slots(inst, *plan);
  int P = inst.P();
  Copies x = initial_copies(inst, L);
  Copies gamma(P);
  for (int p = 0; p < P; ++p) gamma[p] = Vec::Zero(L.slots[p].size());
  detail::Recorder rec(&inst, opts, "kekatos", rho, 1, L.scalars_per_cs);
  try {
    bool go = rec.begin(own_part(L, x));
    while (go) {
      Copies next = x;
      for (int p = 0; p < P; ++p) {
        const auto& sl = L.slots[p];
        Vec v(sl.size()), w(sl.size());
        for (std::size_t s = 0; s < sl.size(); ++s) {
          double D = static_cast<double>(sl[s].nbr.size());
          double sum = D * x[p][s];
          for (const auto& [j, t] : sl[s].nbr) sum += x[j][t];
          v[s] = gamma[p][s] - 0.5 * rho * sum;
          w[s] = rho * D;
        }
        local_update(inst, L, p, v, w, next[p]);
      }
      x.swap(next);
      for (int p = 0; p < P; ++p) {
        const auto& sl = L.slots[p];
        for (std::size_t s = 0; s < sl.size(); ++s) {
          double acc = 0.0;
          for (const auto& [j, t] : sl[s].nbr) acc += x[p][s] - x[j][t];
          gamma[p][s] += 0.5 * rho * acc;
        }
      }
      go = rec.step(own_part(L, x));
    }
  } catch (const NumericalError& e) {
    rec.fail(e.what());
  }
  return rec.finish(own_part(L, x));
}

RunRecord run_schizas(ProblemInstance& inst, double rho, const RunOptions& opts) {
  require_rho(rho);
  require_global(inst, "run_schizas");
  inst.reset();
  int P = inst.P(), n = inst.n();
  const auto& g = inst.graph;
  Estimates x = inst.start();
  std::vector<Vec> z(P, Vec::Zero(n)), mu(P, Vec::Zero(n)), eta(P, Vec::Zero(n));
  auto avg_plus = [&](const std::vector<Vec>& y, int p) {
    Vec s = y[p];
    for (int j : g.neighbors(p)) s += y[j];
    return Vec(s / (g.degree(p) + 1.0));
  };
  detail::Recorder rec(&inst, opts, "schizas", rho, 2, 2LL * g.edge_count() * n);
  try {
    bool go = rec.begin(x);
    while (go) {
      std::vector<Vec> znew(P), xnew(P);
      for (int p = 0; p < P; ++p) {
        double tau = 1.0 / (rho * (g.degree(p) + 1.0));
        znew[p] = tau * mu[p] + avg_plus(x, p);
      }
      for (int p = 0; p < P; ++p) {
        double tau = 1.0 / (rho * (g.degree(p) + 1.0));
        Vec arg = avg_plus(znew, p) - tau * eta[p];
        xnew[p] = inst.nodes[p]->solve(-arg / tau, Vec::Constant(n, 1.0 / tau));
      }
      for (int p = 0; p < P; ++p) {
        double tau = 1.0 / (rho * (g.degree(p) + 1.0));
        mu[p] += (avg_plus(xnew, p) - znew[p]) / tau;
        eta[p] += (xnew[p] - avg_plus(znew, p)) / tau;
      }
      z.swap(znew);
      x.swap(xnew);
      go = rec.step(x);
    }
  } catch (const NumericalError& e) {
    rec.fail(e.what());
  }
  return rec.finish(std::move(x));
}

RunRecord run_zhu(ProblemInstance& inst, double rho, const RunOptions& opts) {
  require_rho(rho);
  require_global(inst, "run_zhu");
  inst.reset();
  int P = inst.P(), n = inst.n();
  const auto& g = inst.graph;
  Estimates x = inst.start();
  std::vector<Vec> mu(P, Vec::Zero(n));
  detail::Recorder rec(&inst, opts, "zhu", rho, 1, 2LL * g.edge_count() * n);
  try {
    bool go = rec.begin(x);
    while (go) {
      std::vector<Vec> xnew(P);
      for (int p = 0; p < P; ++p) {
        double D = g.degree(p);
        double tau = 1.0 / (2.0 * rho * D);
        Vec s = Vec::Zero(n);
        for (int j : g.neighbors(p)) s += x[p] + x[j];
        Vec arg = s / (2.0 * D) - tau * mu[p];
        xnew[p] = inst.nodes[p]->solve(-arg / tau, Vec::Constant(n, 1.0 / tau));
      }
      x.swap(xnew);
      for (int p = 0; p < P; ++p) {
        double D = g.degree(p);
        double tau = 1.0 / (2.0 * rho * D);
        Vec avg = Vec::Zero(n);
        for (int j : g.neighbors(p)) avg += x[j];
        mu[p] += (x[p] - avg / D) / (2.0 * tau);
      }
      go = rec.step(x);
    }
  } catch (const NumericalError& e) {
    rec.fail(e.what());
  }
  return rec.finish(std::move(x));
}

long long analytic_scalars_per_cs(const ProblemInstance& inst, const SteinerPlan* plan) {
  long long total = 0;
  for (const auto& [i, j] : inst.graph.edges()) {
    if (!plan) {
      const auto& a = inst.layout.S(i);
      const auto& b = inst.layout.S(j);
      std::vector<int> common;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
      total += 2LL * static_cast<long long>(common.size());
      continue;
    }
    auto ext = [&](int p) {
      std::vector<int> s;
      const auto& S = inst.layout.S(p);
      const auto& R = plan->relays[p];
      std::merge(S.begin(), S.end(), R.begin(), R.end(), std::back_inserter(s));
      return s;
    };
    std::vector<int> a = ext(i), b = ext(j), common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    for (int l : common) {
      const auto& E = plan->components[l].edges;
      if (std::binary_search(E.begin(), E.end(), netgraph::Edge{i, j})) total += 2;
    }
  }
  return total;
}

RhoBound check_rho_bound(const ProblemInstance& inst, const Coloring& coloring) {
  require_coloring(inst, coloring);
  int P = inst.P();
  std::vector<double> mu(P);
  std::vector<int> dmax(P, 0);
  for (int p = 0; p < P; ++p) {
    auto m = inst.nodes[p]->modulus();
    if (!m || !(*m > 0)) throw ContractError("node " + std::to_string(p + 1) + " has no strong convexity modulus");
    mu[p] = *m;
    for (int l : inst.layout.S(p)) dmax[p] = std::max(dmax[p], inst.layout.degree(p, l));
  }
  RhoBound b;
  int C = coloring.count();
  b.two_colors = C == 2;
  if (C == 1) {
    b.unbounded = true;
    b.value = std::numeric_limits<double>::infinity();
    return b;
  }
  b.value = std::numeric_limits<double>::infinity();
  for (const auto& cls : coloring.classes) {
    double sum = 0.0;
    int dm = 0;
    for (int p : cls) {
      sum += mu[p];
      dm = std::max(dm, dmax[p]);
    }
    if (dm == 0) continue;
    b.value = std::min(b.value, 2.0 * sum / (3.0 * (C - 1) * dm));
  }
  return b;
}

std::string status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxCs: return "max-cs";
    case RunStatus::Diverged: return "diverged";
  }
  return "?";
}

}  // namespace dopt::algorithms
