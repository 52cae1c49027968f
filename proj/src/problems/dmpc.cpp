#include "dopt/problems/dmpc.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <Eigen/Eigenvalues>

#include "dopt/errors.hpp"

namespace dopt::problems {

namespace {

class MpcNode final : public LocalObjective {
 public:
  MpcNode(std::vector<int> support, Mat E, Vec w, double cst)
      : LocalObjective(std::move(support)), E_(std::move(E)), w_(std::move(w)), cst_(cst) {
    Eigen::SelfAdjointEigenSolver<Mat> es(E_, Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues().minCoeff();
    if (lo > 0) mu_ = 2 * lo;
  }

  Vec solve(const Vec& v, const Vec& w) override {
    if (w.size() != cached_w_.size() || w != cached_w_) {
      Mat H = 2 * E_;
      H.diagonal() += w;
      factor_.compute(H);
      if (factor_.info() != Eigen::Success) throw NumericalError("mpc node Hessian is not positive definite");
      cached_w_ = w;
    }
    return factor_.solve(-(w_ + v));
  }
  double value(const Vec& x) const override { return x.dot(E_ * x) + w_.dot(x) + cst_; }
  bool smooth() const override { return true; }
  Vec gradient(const Vec& x) const override { return 2 * E_ * x + w_; }
  std::optional<double> modulus() const override {
    if (mu_ > 0) return mu_;
    return std::nullopt;
  }

 private:
  Mat E_;
  Vec w_;
  double cst_;
  double mu_ = 0.0;
  Vec cached_w_;
  Eigen::LLT<Mat> factor_;
};

}  // namespace

CouplingKind parse_coupling(const std::string& s) {
  if (s == "star") return CouplingKind::Star;
  if (s == "connected") return CouplingKind::Connected;
  if (s == "non-connected" || s == "nonconnected") return CouplingKind::NonConnected;
  throw ArgumentError("unknown coupling '" + s + "'");
}

std::string coupling_name(CouplingKind k) {
  switch (k) {
    case CouplingKind::Star: return "star";
    case CouplingKind::Connected: return "connected";
    case CouplingKind::NonConnected: return "non-connected";
  }
  return "?";
}

MpcCoupling gen_coupling(const netgraph::Graph& g, CouplingKind kind, int T, std::uint64_t seed, int m,
                         int expansions) {
  if (T < 1 || m < 1 || expansions < 0) throw ArgumentError("coupling needs T >= 1, m >= 1, expansions >= 0");
  int P = g.node_count();
  std::mt19937_64 rng(seed);
  MpcCoupling c;
  c.T = T;
  c.m = m;
  c.drives.assign(P, std::vector<std::vector<int>>(T));

  auto grow = [&](int j, bool anywhere) {
    std::set<int> in{j};
    std::set<int> fringe(g.neighbors(j).begin(), g.neighbors(j).end());
    for (int e = 0; e < expansions; ++e) {
      int q = -1;
      if (!anywhere) {
        if (fringe.empty()) break;
        std::vector<int> f(fringe.begin(), fringe.end());
        std::uniform_int_distribution<std::size_t> pick(0, f.size() - 1);
        q = f[pick(rng)];
      } else {
        std::vector<int> cand;
        std::vector<double> wts;
        for (int v = 0; v < P; ++v)
          if (!in.count(v)) {
            cand.push_back(v);
            wts.push_back(fringe.count(v) ? 2.0 : 1.0);
          }
        if (cand.empty()) break;
        std::discrete_distribution<std::size_t> pick(wts.begin(), wts.end());
        q = cand[pick(rng)];
      }
      in.insert(q);
      fringe.erase(q);
      for (int r : g.neighbors(q))
        if (!in.count(r)) fringe.insert(r);
    }
    return std::vector<int>(in.begin(), in.end());
  };

  for (int j = 0; j < P; ++j) {
    switch (kind) {
      case CouplingKind::Star: {
        std::vector<int> s(g.neighbors(j));
        s.push_back(j);
        std::sort(s.begin(), s.end());
        for (int t = 0; t < T; ++t) c.drives[j][t] = s;
        break;
      }
      case CouplingKind::Connected: {
        auto s = grow(j, false);
        for (int t = 0; t < T; ++t) c.drives[j][t] = s;
        break;
      }
      case CouplingKind::NonConnected:
        for (int t = 0; t < T; ++t) c.drives[j][t] = grow(j, true);
        break;
    }
  }
  return c;
}

std::vector<MpcSystem> gen_mpc_systems(const MpcCoupling& coupling, int state_dim, bool stable,
                                       std::uint64_t seed) {
  if (state_dim < 1) throw ArgumentError("state dimension must be positive");
  int P = static_cast<int>(coupling.drives.size());
  std::vector<std::set<int>> drivers(P);
  for (int j = 0; j < P; ++j)
    for (const auto& nodes : coupling.drives[j])
      for (int q : nodes) drivers[q].insert(j);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  auto gauss = [&](int r, int c) {
    Mat M(r, c);
    for (int i = 0; i < r; ++i)
      for (int k = 0; k < c; ++k) M(i, k) = N(rng);
    return M;
  };
  std::vector<MpcSystem> sys(P);
  for (int p = 0; p < P; ++p) {
    auto& s = sys[p];
    s.A = gauss(state_dim, state_dim);
    if (stable) {
      double rad = Eigen::EigenSolver<Mat>(s.A, false).eigenvalues().cwiseAbs().maxCoeff();
      if (rad > 1.0) s.A /= rad;
    }
    s.x0 = gauss(state_dim, 1).col(0);
    for (int j : drivers[p]) s.B[j] = gauss(state_dim, coupling.m);
    s.Qbar = Mat::Identity(state_dim, state_dim);
    s.Qf = Mat::Identity(state_dim, state_dim);
    s.Rbar = Mat::Identity(coupling.m, coupling.m);
  }
  return sys;
}

ProblemInstance build_dmpc(const netgraph::Graph& g, const std::vector<MpcSystem>& systems,
                           const MpcCoupling& coupling) {
  int P = g.node_count();
  int T = coupling.T, m = coupling.m;
  if (static_cast<int>(systems.size()) != P || static_cast<int>(coupling.drives.size()) != P)
    throw ArgumentError("mpc data needs one system per node");
  for (int j = 0; j < P; ++j) {
    if (static_cast<int>(coupling.drives[j].size()) != T) throw ArgumentError("coupling horizon mismatch");
    for (const auto& nodes : coupling.drives[j])
      if (!std::binary_search(nodes.begin(), nodes.end(), j))
        throw ArgumentError("every input must drive its own node");
  }
  int n = P * T * m;
  std::vector<std::vector<int>> S(P);
  for (int j = 0; j < P; ++j)
    for (int t = 0; t < T; ++t)
      for (int q : coupling.drives[j][t])
        for (int i = 0; i < m; ++i) S[q].push_back(mpc_component(j, t, i, T, m));
  for (auto& s : S) std::sort(s.begin(), s.end());

  ProblemInstance inst;
  inst.application = "dmpc";
  inst.params["T"] = T;
  inst.graph = g;
  inst.layout = netgraph::VariableLayout(g, n, S);

  Mat H = Mat::Zero(n, n);
  Vec h = Vec::Zero(n);
  for (int p = 0; p < P; ++p) {
    const auto& sys = systems[p];
    int ns = static_cast<int>(sys.A.rows());
    if (sys.Rbar.rows() != m || sys.Rbar.cols() != m) throw ArgumentError("R has the wrong size");
    if (Eigen::LLT<Mat>(sys.Rbar).info() != Eigen::Success) throw ArgumentError("R must be positive definite");
    const auto& Sp = inst.layout.S(p);
    int k = static_cast<int>(Sp.size());
    std::vector<Mat> Apow(T + 1);
    Apow[0] = Mat::Identity(ns, ns);
    for (int s = 1; s <= T; ++s) Apow[s] = sys.A * Apow[s - 1];
    Mat C = Mat::Zero(ns * (T + 1), k);
    Vec D0(ns * (T + 1));
    for (int s = 0; s <= T; ++s) D0.segment(s * ns, ns) = Apow[s] * sys.x0;
    Mat R = Mat::Zero(k, k);
    for (int c = 0; c < k; ++c) {
      int comp = Sp[c];
      int i = comp % m, t = (comp / m) % T, j = comp / (m * T);
      auto it = sys.B.find(j);
      if (it == sys.B.end()) throw ArgumentError("missing input map B for a driving node");
      for (int s = t + 1; s <= T; ++s) C.block(s * ns, c, ns, 1) = Apow[s - 1 - t] * it->second.col(i);
      if (j == p)
        for (int c2 = 0; c2 < k; ++c2) {
          int o = Sp[c2];
          if (o / (m * T) == p && (o / m) % T == t) R(c, c2) = sys.Rbar(i, o % m);
        }
    }
    Mat Q = Mat::Zero(ns * (T + 1), ns * (T + 1));
    for (int s = 0; s < T; ++s) Q.block(s * ns, s * ns, ns, ns) = sys.Qbar;
    Q.block(T * ns, T * ns, ns, ns) = sys.Qf;
    Mat E = R + C.transpose() * Q * C;
    E = 0.5 * (E + E.transpose());
    Vec w = 2 * C.transpose() * Q * D0;
    double cst = D0.dot(Q * D0);
    for (int a = 0; a < k; ++a) {
      h[Sp[a]] += w[a];
      for (int b = 0; b < k; ++b) H(Sp[a], Sp[b]) += 2 * E(a, b);
    }
    inst.nodes.push_back(std::make_unique<MpcNode>(Sp, std::move(E), std::move(w), cst));
  }
  Eigen::LLT<Mat> llt(H);
  if (llt.info() != Eigen::Success) throw NumericalError("stacked MPC Hessian is not positive definite");
  inst.x_ref = llt.solve(-h);
  inst.f_ref = inst.objective(inst.x_ref);
  inst.metric = ErrorMetric::ConcatInf;
  return inst;
}

}  // namespace dopt::problems
