#pragma once

#include <cstdint>

#include "dopt/netgraph/graph.hpp"
#include "dopt/problems/instance.hpp"

namespace dopt::problems {

struct FlowData {
  netgraph::Digraph network;
  Vec param;  // a_ij (scenario 1) or c_ij (scenario 2), one per arc
  Vec d;      // injections, sum zero
};

// Random orientation, arc parameters and f/100 injections from source/sink pairs;
// values drawn from {10,20,30,40,50,100} with probabilities {.2,.2,.2,.2,.1,.1}.
FlowData gen_flow(const netgraph::Graph& g, int pairs, std::uint64_t seed);

// Scenario 1: phi(x) = 1/2 (x - a)^2. Scenario 2: phi(x) = x/(c - x), 0 <= x < c.
// Node p holds 1/2 of each incident phi plus the balance constraint b_p'x = d_p.
ProblemInstance build_netflow(const netgraph::Digraph& dg, int scenario, const Vec& param, const Vec& d);

// Flow minimizing sum phi(x) - nu'(Bx - d) for node potentials nu; B x(nu) - d is the
// gradient of the negated dual.
Vec flow_from_potentials(const netgraph::Digraph& dg, int scenario, const Vec& param, const Vec& nu);

// Scenario 1 KKT residual: max(||x - a + B'nu||_inf, ||Bx - d||_inf) with least-squares nu.
double flow_kkt_residual(const netgraph::Digraph& dg, const Vec& a, const Vec& d, const Vec& x);

}  // namespace dopt::problems
