#pragma once

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "kpip/flownet.hpp"
#include "kpip/kvector.hpp"
#include "kpip/pip.hpp"

namespace kpip {

// d(a,b): 1 on distinct nonzero labels, 0 on equal, 1/2 when exactly one side
// is unassigned.
inline Rat potts_d(int a, int b) {
  if (a == b) return Rat(0);
  if (a != 0 && b != 0) return Rat(1);
  return Rat(1, 2);
}

// Weighted graph with per-vertex unary tables over S_k; the unary tables must
// each be k-submodular on their own (g(a)+g(b) >= 2 g(0) for distinct a,b>0).
struct PottsInstance {
  int n = 0;
  int k = 1;
  struct Edge {
    int u, v;
    Rat lambda;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<Rat>> unary;  // unary[i][a], a in 0..k

  void check() const {
    if (n < 1 || k < 1) throw domain_error("potts instance needs n >= 1, k >= 1");
    if ((int)unary.size() != n) throw domain_error("unary table count != n");
    for (const auto& u : unary)
      if ((int)u.size() != k + 1) throw domain_error("unary tables must cover 0..k");
    std::vector<std::vector<int>> adj(n);
    for (const auto& e : edges) {
      if (e.u == e.v || e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
        throw domain_error("bad edge");
      if (!(e.lambda > Rat(0))) throw domain_error("edge weights must be positive");
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
    std::vector<bool> seen(n, false);
    std::vector<int> stk{0};
    seen[0] = true;
    while (!stk.empty()) {
      int v = stk.back();
      stk.pop_back();
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = true;
          stk.push_back(w);
        }
    }
    for (bool b : seen)
      if (!b) throw domain_error("graph must be connected");
    for (int i = 0; i < n; ++i)
      for (int a = 1; a <= k; ++a)
        for (int b = a + 1; b <= k; ++b)
          if (unary[i][a] + unary[i][b] < unary[i][0] + unary[i][0])
            throw domain_error("unary table at vertex " + std::to_string(i) +
                               " is not k-submodular");
  }

  Rat value(const KVector& x) const {
    Rat v(0);
    for (int i = 0; i < n; ++i) v += unary[i][x[i]];
    for (const auto& e : edges) v += e.lambda * potts_d(x[e.u], x[e.v]);
    return v;
  }

  // Potts energy of a full labeling (labels 1..k): unary plus lambda per
  // disagreeing edge.
  Rat energy(const std::vector<int>& labels) const {
    Rat v(0);
    for (int i = 0; i < n; ++i) v += unary[i][labels[i]];
    for (const auto& e : edges)
      if (labels[e.u] != labels[e.v]) v += e.lambda;
    return v;
  }

  TableFunction table() const {
    TableFunction f(n, k);
    for (long long idx = 0; idx < f.size(); ++idx)
      f.set(idx, ExtVal(value(KVector::from_index(idx, n, k))));
    return f;
  }
};

enum class Relaxation { kAverage, kKovtun };

// Extends raw k-label unary tables by a 0-label: the averaged relaxation sets
// g(0) to the best pair average, the Kovtun variant recenters each label by
// the best other label and pins g(0) = 0.
inline PottsInstance relax_potts(int n, int k, const std::vector<PottsInstance::Edge>& edges,
                                 const std::vector<std::vector<Rat>>& raw, Relaxation mode) {
  if (k < 2) throw domain_error("relaxation needs k >= 2");
  if ((int)raw.size() != n) throw domain_error("raw unary count != n");
  PottsInstance inst;
  inst.n = n;
  inst.k = k;
  inst.edges = edges;
  inst.unary.assign(n, std::vector<Rat>(k + 1, Rat(0)));
  for (int i = 0; i < n; ++i) {
    if ((int)raw[i].size() != k) throw domain_error("raw unary table must have k entries");
    if (mode == Relaxation::kAverage) {
      for (int a = 1; a <= k; ++a) inst.unary[i][a] = raw[i][a - 1];
      bool first = true;
      Rat best(0);
      for (int a = 1; a <= k; ++a)
        for (int b = a + 1; b <= k; ++b) {
          Rat cand = (raw[i][a - 1] + raw[i][b - 1]) / Rat(2);
          if (first || cand < best) best = cand;
          first = false;
        }
      inst.unary[i][0] = best;
    } else {
      for (int a = 1; a <= k; ++a) {
        Rat other;
        bool first = true;
        for (int b = 1; b <= k; ++b) {
          if (b == a) continue;
          if (first || raw[i][b - 1] < other) other = raw[i][b - 1];
          first = false;
        }
        inst.unary[i][a] = (raw[i][a - 1] - other) / Rat(2);
      }
      inst.unary[i][0] = Rat(0);
    }
  }
  inst.check();
  return inst;
}

// gamma_i minimizes the unary table (smallest label wins ties), mu_i doubles
// the gap to g(0), sigma_{i,a} is the per-label surplus.
struct UnaryDecomposition {
  std::vector<int> gamma;
  std::vector<Rat> mu;
  std::vector<std::vector<Rat>> sigma;  // sigma[i][a-1], a in 1..k
};

inline UnaryDecomposition decompose_unary(const PottsInstance& inst) {
  UnaryDecomposition dec;
  dec.gamma.resize(inst.n);
  dec.mu.resize(inst.n);
  dec.sigma.assign(inst.n, std::vector<Rat>(inst.k, Rat(0)));
  for (int i = 0; i < inst.n; ++i) {
    int g = 0;
    for (int a = 1; a <= inst.k; ++a)
      if (inst.unary[i][a] < inst.unary[i][g]) g = a;
    dec.gamma[i] = g;
    dec.mu[i] = (inst.unary[i][0] - inst.unary[i][g]) * Rat(2);
    for (int a = 1; a <= inst.k; ++a) {
      if (a == g) continue;
      Rat s = inst.unary[i][a] - inst.unary[i][0] - inst.unary[i][0] + inst.unary[i][g];
      if (s < Rat(0))
        throw domain_error("unary table at vertex " + std::to_string(i) +
                           " is not k-submodular (negative sigma)");
      dec.sigma[i][a - 1] = s;
    }
    // identity check over all of S_k
    for (int a = 0; a <= inst.k; ++a) {
      Rat rhs = inst.unary[i][g] + dec.mu[i] * potts_d(g, a);
      if (a >= 1 && a != g) rhs += dec.sigma[i][a - 1];
      if (rhs != inst.unary[i][a]) throw domain_error("unary decomposition identity failed");
    }
  }
  return dec;
}

// Undirected terminal+fringe network, capacities rescaled to integers by a
// single common multiplier so that cut ties stay exact.
struct PottsNetwork {
  int n = 0, k = 1;
  long long scale = 1;  // capacities are scale * original
  int nv = 0;           // 0..n-1 graph, n..n+k-1 terminals, then fringes
  std::vector<std::vector<int>> fringe_id;  // [i][a-1], -1 when absent
  std::vector<int> owner;                   // per vertex: graph vertex owning a fringe, -1
  std::vector<int> flabel;                  // per vertex: fringe label, -1
  struct UEdge {
    int a, b;
    long long cap;
  };
  std::vector<UEdge> edges;
  std::vector<long long> big_g;  // 2*scale*g_i(a), index i*(k+1)+a
  std::vector<int> gamma;
  long long base = 0;  // sum_i big_g(i, gamma_i)

  int terminal(int alpha) const { return n + alpha - 1; }
  bool is_terminal(int v) const { return v >= n && v < n + k; }
  bool is_fringe(int v) const { return v >= n + k; }
  long long g2(int i, int a) const { return big_g[i * (k + 1) + a]; }

  // Capacity of a vertex subset, given as a membership mask over all nv ids.
  long long cut_capacity(const std::vector<bool>& in) const {
    long long c = 0;
    for (const auto& e : edges)
      if (in[e.a] != in[e.b]) c += e.cap;
    return c;
  }
};

inline long long lcm_ll(long long a, long long b) { return a / std::gcd(a, b) * b; }

inline PottsNetwork build_potts_network(const PottsInstance& inst) {
  inst.check();
  UnaryDecomposition dec = decompose_unary(inst);
  PottsNetwork pn;
  pn.n = inst.n;
  pn.k = inst.k;
  pn.gamma = dec.gamma;
  long long L = 1;
  for (const auto& e : inst.edges) L = lcm_ll(L, e.lambda.den());
  for (const auto& u : inst.unary)
    for (const auto& v : u) L = lcm_ll(L, (v * Rat(2)).den());
  pn.scale = L;
  pn.big_g.assign(inst.n * (inst.k + 1), 0);
  for (int i = 0; i < inst.n; ++i)
    for (int a = 0; a <= inst.k; ++a) {
      Rat scaled = inst.unary[i][a] * Rat(2) * Rat(L);
      if (!scaled.is_integer()) throw domain_error("scaling failed to clear denominators");
      pn.big_g[i * (inst.k + 1) + a] = scaled.num();
    }
  for (int i = 0; i < inst.n; ++i) pn.base += pn.g2(i, dec.gamma[i]);
  pn.nv = inst.n + inst.k;
  pn.owner.assign(pn.nv, -1);
  pn.flabel.assign(pn.nv, -1);
  pn.fringe_id.assign(inst.n, std::vector<int>(inst.k, -1));
  for (const auto& e : inst.edges) {
    Rat cap = e.lambda * Rat(L);
    pn.edges.push_back({e.u, e.v, cap.num()});
  }
  for (int i = 0; i < inst.n; ++i) {
    // terminal edge {i, s_gamma} of capacity mu_i
    if (dec.mu[i] > Rat(0)) {
      Rat cap = dec.mu[i] * Rat(L);
      pn.edges.push_back({i, pn.terminal(dec.gamma[i]), cap.num()});
    }
    // fringe edge {i, i^a} of capacity 2*sigma_{i,a}
    for (int a = 1; a <= inst.k; ++a) {
      if (!(dec.sigma[i][a - 1] > Rat(0))) continue;
      int f = pn.nv++;
      pn.owner.push_back(i);
      pn.flabel.push_back(a);
      pn.fringe_id[i][a - 1] = f;
      Rat cap = dec.sigma[i][a - 1] * Rat(2) * Rat(L);
      pn.edges.push_back({i, f, cap.num()});
    }
  }
  return pn;
}

// Ordered partition (X_0,...,X_k) of the network vertices; parts[a] holds the
// membership mask of X_a.
struct SemiMulticut {
  std::vector<std::vector<bool>> parts;
  long long capacity_sum = 0;  // sum over a >= 1 of c(X_a); twice the semi-multicut weight
};

// The admissible semi-multicut of an assignment: vertex i joins X_{x_i},
// terminals join their own part, fringes follow the placement rule.
inline SemiMulticut semi_multicut_of(const PottsNetwork& pn, const KVector& x) {
  SemiMulticut sm;
  sm.parts.assign(pn.k + 1, std::vector<bool>(pn.nv, false));
  auto place = [&](int v, int part) { sm.parts[part][v] = true; };
  for (int a = 1; a <= pn.k; ++a) place(pn.terminal(a), a);
  for (int i = 0; i < pn.n; ++i) place(i, x[i]);
  for (int v = 0; v < pn.nv; ++v) {
    if (!pn.is_fringe(v)) continue;
    int i = pn.owner[v], a = pn.flabel[v];
    int part_of_i = x[i];
    if (part_of_i == 0 || part_of_i == a)
      place(v, 0);
    else
      place(v, part_of_i);
  }
  for (int a = 1; a <= pn.k; ++a) sm.capacity_sum += pn.cut_capacity(sm.parts[a]);
  return sm;
}

// Scaled Potts value 2*scale*g(x); the quantity the semi-multicut identity
// speaks about.
inline long long potts_value2(const PottsNetwork& pn, const PottsInstance& inst, const KVector& x) {
  Rat v = inst.value(x) * Rat(2) * Rat(pn.scale);
  if (!v.is_integer()) throw domain_error("scaled value not integral");
  return v.num();
}

// Picard-Queyranne poset of the minimum alpha-isolating cuts, elements
// restricted to graph vertices.
struct IsolatingCutPoset {
  int alpha = 0;
  long long cut_value = 0;              // scaled min alpha-cut capacity
  std::vector<int> base;                // minimal min alpha-cut, graph vertices only
  std::vector<std::vector<int>> elems;  // Sigma_alpha, sorted vertex sets in V
  std::vector<std::vector<bool>> leq;
};

// Directed two-terminal reduction for label alpha: other terminals and
// alpha-fringes merge into the sink, beta-fringes vanish.
struct AlphaReduction {
  FlowNetwork net;          // vertices 0..n-1 graph, n = s_alpha, n+1 = sink
  std::vector<int> arc_fwd;  // per potts edge: arc id u->v or -1
  std::vector<int> arc_bwd;  // per potts edge: arc id v->u or -1
};

inline AlphaReduction alpha_reduction(const PottsNetwork& pn, int alpha) {
  AlphaReduction red;
  for (int i = 0; i < pn.n; ++i) red.net.add_vertex("v" + std::to_string(i));
  int s = red.net.add_vertex("s_alpha");
  int t = red.net.add_vertex("sink");
  red.net.s = s;
  red.net.t = t;
  auto map_vertex = [&](int v) -> int {
    if (v < pn.n) return v;
    if (pn.is_terminal(v)) return v == pn.terminal(alpha) ? s : t;
    return pn.flabel[v] == alpha ? t : -1;  // beta-fringes vanish
  };
  red.arc_fwd.assign(pn.edges.size(), -1);
  red.arc_bwd.assign(pn.edges.size(), -1);
  for (size_t e = 0; e < pn.edges.size(); ++e) {
    int a = map_vertex(pn.edges[e].a);
    int b = map_vertex(pn.edges[e].b);
    if (a < 0 || b < 0) continue;
    red.arc_fwd[e] = red.net.add_arc(a, b, pn.edges[e].cap);
    red.arc_bwd[e] = red.net.add_arc(b, a, pn.edges[e].cap);
  }
  return red;
}

inline IsolatingCutPoset isolating_poset_from_residual(const PottsNetwork& pn, int alpha,
                                                       const AlphaReduction& red,
                                                       const ResidualGraph& rg) {
  IsolatingCutPoset icp;
  icp.alpha = alpha;
  auto rc = condense(red.net.s, red.net.t, rg);
  if (rc.reach[rc.s_scc][rc.t_scc])
    throw domain_error("residual still augments; the flow is not maximum");
  auto pq = pq_poset_from_condensation(rc);
  for (const auto& el : pq.elems)
    for (int v : el)
      if (v >= pn.n) throw domain_error("Sigma element contains a terminal or fringe");
  icp.elems = pq.elems;
  icp.leq = pq.leq;
  for (int v : pq.base)
    if (v < pn.n) icp.base.push_back(v);
  return icp;
}

inline IsolatingCutPoset alpha_mincut(const PottsNetwork& pn, int alpha) {
  AlphaReduction red = alpha_reduction(pn, alpha);
  auto mf = max_flow(red.net);
  auto rg = residual(red.net, mf.flow);
  IsolatingCutPoset icp = isolating_poset_from_residual(pn, alpha, red, rg);
  icp.cut_value = mf.value;
  return icp;
}

// Full alpha-cut (with terminals and admissible fringes) from a V-subset.
inline std::vector<bool> full_alpha_cut(const PottsNetwork& pn, int alpha,
                                        const std::vector<int>& graph_verts) {
  std::vector<bool> in(pn.nv, false);
  in[pn.terminal(alpha)] = true;
  for (int v : graph_verts) in[v] = true;
  for (int v = 0; v < pn.nv; ++v)
    if (pn.is_fringe(v) && pn.flabel[v] != alpha && in[pn.owner[v]]) in[v] = true;
  return in;
}

// Minimum admissible semi-multicut: the minimal minimum alpha-cuts, which are
// pairwise disjoint, plus the leftovers as X_0.
inline SemiMulticut min_semi_multicut(const PottsNetwork& pn,
                                      const std::vector<IsolatingCutPoset>& layers) {
  SemiMulticut sm;
  sm.parts.assign(pn.k + 1, std::vector<bool>(pn.nv, false));
  std::vector<int> part_of(pn.nv, 0);
  for (int a = 1; a <= pn.k; ++a) {
    auto in = full_alpha_cut(pn, a, layers[a - 1].base);
    for (int v = 0; v < pn.nv; ++v)
      if (in[v]) {
        if (part_of[v] != 0) throw domain_error("minimal isolating cuts overlap");
        part_of[v] = a;
      }
  }
  for (int v = 0; v < pn.nv; ++v) sm.parts[part_of[v]][v] = true;
  for (int a = 1; a <= pn.k; ++a) sm.capacity_sum += pn.cut_capacity(sm.parts[a]);
  return sm;
}

inline KVector assignment_of(const PottsNetwork& pn, const SemiMulticut& sm) {
  KVector x(pn.n, pn.k);
  for (int a = 1; a <= pn.k; ++a)
    for (int i = 0; i < pn.n; ++i)
      if (sm.parts[a][i]) x.set(i, a);
  return x;
}

// The glued PIP over all layers: disjoint layer posets, minimal inconsistency
// between equal vertex sets of different layers.
struct GluedPip {
  Pip pip;
  std::vector<int> layer_of;                // per element
  std::vector<std::vector<int>> elem_set;   // per element, sorted V-subset
  std::vector<IsolatingCutPoset> layers;

  // Cut map: an ideal picks per-layer extra components on top of the
  // minimal cut bases.
  KVector minimizer_of(const PottsNetwork& pn, const std::vector<bool>& ideal) const {
    KVector x(pn.n, pn.k);
    for (int a = 1; a <= pn.k; ++a)
      for (int v : layers[a - 1].base) x.set(v, a);
    for (size_t e = 0; e < layer_of.size(); ++e)
      if (ideal[e])
        for (int v : elem_set[e]) {
          if (x[v] != 0 && x[v] != layer_of[e]) throw domain_error("inconsistent ideal image");
          x.set(v, layer_of[e]);
        }
    return x;
  }

  std::vector<KVector> all_minimizers(const PottsNetwork& pn) const {
    std::vector<KVector> out;
    pip.for_each_consistent_ideal([&](const std::vector<bool>& ideal) {
      out.push_back(minimizer_of(pn, ideal));
      return true;
    });
    std::sort(out.begin(), out.end());
    return out;
  }
};

inline GluedPip glue_pip(const std::vector<IsolatingCutPoset>& layers) {
  GluedPip gp;
  gp.layers = layers;
  std::vector<std::pair<int, int>> ids;  // (layer index, element index)
  for (size_t l = 0; l < layers.size(); ++l)
    for (size_t e = 0; e < layers[l].elems.size(); ++e) ids.emplace_back((int)l, (int)e);
  Pip p((int)ids.size());
  for (size_t i = 0; i < ids.size(); ++i) {
    auto [l, e] = ids[i];
    gp.layer_of.push_back(layers[l].alpha);
    gp.elem_set.push_back(layers[l].elems[e]);
    std::vector<long long> payload{layers[l].alpha};
    for (int v : layers[l].elems[e]) payload.push_back(v);
    p.set_payload((int)i, payload);
  }
  for (size_t i = 0; i < ids.size(); ++i)
    for (size_t j = 0; j < ids.size(); ++j) {
      if (i == j) continue;
      auto [la, ea] = ids[i];
      auto [lb, eb] = ids[j];
      if (la == lb && layers[la].leq[ea][eb]) p.add_order((int)i, (int)j);
    }
  // Layer-intersection sanity: elements of different layers are equal or
  // disjoint, and
  // shared chains reverse their order.
  for (size_t i = 0; i < ids.size(); ++i)
    for (size_t j = i + 1; j < ids.size(); ++j) {
      auto [la, ea] = ids[i];
      auto [lb, eb] = ids[j];
      if (la == lb) continue;
      const auto& A = gp.elem_set[i];
      const auto& B = gp.elem_set[j];
      std::vector<int> inter;
      std::set_intersection(A.begin(), A.end(), B.begin(), B.end(), std::back_inserter(inter));
      if (!inter.empty() && A != B)
        throw domain_error("layers share a partial component");
      if (A == B) p.add_min_inconsistent((int)i, (int)j);
    }
  if (!p.finalize()) throw domain_error("glued order is cyclic");
  auto ec = p.check_elementary();
  for (int e = 0; e < p.size(); ++e) p.set_part(e, ec.parts[e]);
  gp.pip = std::move(p);
  return gp;
}

struct PottsBuild {
  PottsNetwork network;
  GluedPip glued;
  KVector minimum_minimizer;
  long long min_value2 = 0;  // 2*scale*min(g)
};

// Direct route: one maximum flow per label. The per-label computations only
// read the immutable network, so they may run on worker threads.
inline PottsBuild build_pip_potts(const PottsInstance& inst, int jobs = 1) {
  PottsBuild out;
  out.network = build_potts_network(inst);
  std::vector<IsolatingCutPoset> layers(inst.k);
  if (jobs <= 1 || inst.k <= 1) {
    for (int a = 1; a <= inst.k; ++a) layers[a - 1] = alpha_mincut(out.network, a);
  } else {
    std::atomic<int> next{1};
    std::vector<std::thread> pool;
    auto worker = [&]() {
      while (true) {
        int a = next.fetch_add(1);
        if (a > inst.k) break;
        layers[a - 1] = alpha_mincut(out.network, a);
      }
    };
    for (int j = 1; j < std::min(jobs, inst.k); ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
  }
  out.glued = glue_pip(layers);
  auto sm = min_semi_multicut(out.network, layers);
  out.minimum_minimizer = assignment_of(out.network, sm);
  out.min_value2 = sm.capacity_sum + out.network.base;
  return out;
}

}  // namespace kpip
