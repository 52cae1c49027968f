#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dopt/netgraph/graph.hpp"
#include "dopt/problems/instance.hpp"

namespace dopt::problems {

// x_p[t+1] = A x_p[t] + sum_j B[j] u_j[t] over the inputs driving p at time t.
struct MpcSystem {
  Mat A;
  std::map<int, Mat> B;  // keyed by driving node j
  Mat Qbar, Qf, Rbar;
  Vec x0;
};

struct MpcCoupling {
  int T = 5;
  int m = 1;  // inputs per node
  // drives[j][t]: ascending nodes whose state u_j[t] enters; always contains j.
  std::vector<std::vector<std::vector<int>>> drives;
};

enum class CouplingKind { Star, Connected, NonConnected };
CouplingKind parse_coupling(const std::string& s);
std::string coupling_name(CouplingKind k);

// Star: N_j plus j. Connected: 3 fringe expansions per node, shared by all t.
// Non-connected: 3 picks per (j, t) from all nodes, fringe nodes weighted 2:1.
MpcCoupling gen_coupling(const netgraph::Graph& g, CouplingKind kind, int T, std::uint64_t seed, int m = 1,
                         int expansions = 3);

// Gaussian A and B; stable systems are rescaled to spectral radius 1. Q = I, Qf = I, R = I.
std::vector<MpcSystem> gen_mpc_systems(const MpcCoupling& coupling, int state_dim, bool stable,
                                       std::uint64_t seed);

// Component index of input i of node j at time t.
inline int mpc_component(int j, int t, int i, int T, int m) { return (j * T + t) * m + i; }

// f_p(u) = u'E_p u + w_p'u + const after eliminating the states.
ProblemInstance build_dmpc(const netgraph::Graph& g, const std::vector<MpcSystem>& systems,
                           const MpcCoupling& coupling);

}  // namespace dopt::problems
