#pragma once

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "kpip/kvector.hpp"

namespace kpip {

// Directed s-t network with exact integer capacities. Parallel arcs allowed;
// arc ids are stable (insertion order), which keeps flows reproducible.
struct FlowNetwork {
  struct Arc {
    int from, to;
    long long cap;
  };
  int nv = 0;
  int s = -1, t = -1;
  std::vector<Arc> arcs;
  std::vector<std::string> names;

  int add_vertex(std::string name = "") {
    names.push_back(name.empty() ? std::to_string(nv) : std::move(name));
    return nv++;
  }
  int add_arc(int u, int v, long long c) {
    if (c < 0) throw domain_error("negative capacity");
    arcs.push_back({u, v, c});
    return (int)arcs.size() - 1;
  }
};

struct MaxFlowResult {
  long long value = 0;
  std::vector<long long> flow;  // aligned with net.arcs
};

// Dinic with fixed arc ordering.
inline MaxFlowResult max_flow(const FlowNetwork& net) {
  const int n = net.nv;
  struct E {
    int to;
    long long cap;
    int rev;
    int orig;  // original arc id, -1 for reverse edges
  };
  std::vector<std::vector<E>> g(n);
  for (int i = 0; i < (int)net.arcs.size(); ++i) {
    const auto& a = net.arcs[i];
    g[a.from].push_back({a.to, a.cap, (int)g[a.to].size(), i});
    g[a.to].push_back({a.from, 0, (int)g[a.from].size() - 1, -1});
  }
  std::vector<int> level(n), iter(n);
  auto bfs = [&]() {
    std::fill(level.begin(), level.end(), -1);
    std::queue<int> q;
    level[net.s] = 0;
    q.push(net.s);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (const auto& e : g[v])
        if (e.cap > 0 && level[e.to] < 0) {
          level[e.to] = level[v] + 1;
          q.push(e.to);
        }
    }
    return level[net.t] >= 0;
  };
  std::function<long long(int, long long)> dfs = [&](int v, long long f) -> long long {
    if (v == net.t) return f;
    for (int& i = iter[v]; i < (int)g[v].size(); ++i) {
      E& e = g[v][i];
      if (e.cap > 0 && level[v] < level[e.to]) {
        long long d = dfs(e.to, std::min(f, e.cap));
        if (d > 0) {
          e.cap -= d;
          g[e.to][e.rev].cap += d;
          return d;
        }
      }
    }
    return 0;
  };
  MaxFlowResult res;
  res.flow.assign(net.arcs.size(), 0);
  while (bfs()) {
    std::fill(iter.begin(), iter.end(), 0);
    long long f;
    while ((f = dfs(net.s, (1LL << 62))) > 0) res.value += f;
  }
  for (int v = 0; v < n; ++v)
    for (const auto& e : g[v])
      if (e.orig >= 0) res.flow[e.orig] = net.arcs[e.orig].cap - e.cap;
  return res;
}

// Residual adjacency A_phi: forward arcs below capacity plus reverses of
// arcs carrying flow.
struct ResidualGraph {
  int nv = 0;
  std::vector<std::vector<int>> adj;
};

inline ResidualGraph residual(const FlowNetwork& net, const std::vector<long long>& flow) {
  if (flow.size() != net.arcs.size()) throw domain_error("flow/arc size mismatch");
  std::vector<long long> excess(net.nv, 0);
  ResidualGraph rg;
  rg.nv = net.nv;
  rg.adj.assign(net.nv, {});
  for (size_t i = 0; i < net.arcs.size(); ++i) {
    const auto& a = net.arcs[i];
    if (flow[i] < 0 || flow[i] > a.cap) throw domain_error("infeasible flow");
    excess[a.to] += flow[i];
    excess[a.from] -= flow[i];
    if (flow[i] < a.cap) rg.adj[a.from].push_back(a.to);
    if (flow[i] > 0) rg.adj[a.to].push_back(a.from);
  }
  for (int v = 0; v < net.nv; ++v) {
    if (v == net.s || v == net.t) continue;
    if (excess[v] != 0) throw domain_error("flow conservation violated");
  }
  for (auto& lst : rg.adj) {
    std::sort(lst.begin(), lst.end());
    lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
  }
  return rg;
}

// Strongly connected components of the residual graph plus condensation
// reachability; the raw material for every poset extraction here.
struct ResidualCondensation {
  int nscc = 0;
  std::vector<int> scc_of;                 // vertex -> scc
  std::vector<std::vector<int>> scc_verts; // sorted members per scc
  std::vector<std::vector<int>> succ;      // condensation successors, deduped
  std::vector<std::vector<bool>> reach;    // reach[a][b]: b reachable from a
  std::vector<int> topo;                   // condensation topological order
  int s_scc = -1, t_scc = -1;
};

inline ResidualCondensation condense(int s, int t, const ResidualGraph& rg) {
  const int n = rg.nv;
  ResidualCondensation rc;
  rc.scc_of.assign(n, -1);
  // iterative Tarjan
  std::vector<int> low(n, -1), num(n, -1), stk, comp_stack;
  std::vector<bool> on_stack(n, false);
  int counter = 0;
  std::vector<std::pair<int, int>> call;  // (vertex, next child index)
  for (int root = 0; root < n; ++root) {
    if (num[root] >= 0) continue;
    call.emplace_back(root, 0);
    while (!call.empty()) {
      auto& [v, ci] = call.back();
      if (ci == 0) {
        num[v] = low[v] = counter++;
        comp_stack.push_back(v);
        on_stack[v] = true;
      }
      if (ci < (int)rg.adj[v].size()) {
        int w = rg.adj[v][ci++];
        if (num[w] < 0)
          call.emplace_back(w, 0);
        else if (on_stack[w])
          low[v] = std::min(low[v], num[w]);
      } else {
        if (low[v] == num[v]) {
          std::vector<int> members;
          while (true) {
            int w = comp_stack.back();
            comp_stack.pop_back();
            on_stack[w] = false;
            rc.scc_of[w] = rc.nscc;
            members.push_back(w);
            if (w == v) break;
          }
          std::sort(members.begin(), members.end());
          rc.scc_verts.push_back(std::move(members));
          ++rc.nscc;
        }
        int child = v;
        call.pop_back();
        if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[child]);
      }
    }
  }
  rc.succ.assign(rc.nscc, {});
  for (int v = 0; v < n; ++v)
    for (int w : rg.adj[v])
      if (rc.scc_of[v] != rc.scc_of[w]) rc.succ[rc.scc_of[v]].push_back(rc.scc_of[w]);
  for (auto& lst : rc.succ) {
    std::sort(lst.begin(), lst.end());
    lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
  }
  // Tarjan emits components in reverse topological order.
  rc.topo.resize(rc.nscc);
  for (int i = 0; i < rc.nscc; ++i) rc.topo[i] = rc.nscc - 1 - i;
  rc.reach.assign(rc.nscc, std::vector<bool>(rc.nscc, false));
  for (int idx = rc.nscc - 1; idx >= 0; --idx) {
    int c = rc.topo[idx];
    rc.reach[c][c] = true;
    for (int d : rc.succ[c])
      for (int e = 0; e < rc.nscc; ++e)
        if (rc.reach[d][e]) rc.reach[c][e] = true;
  }
  rc.s_scc = rc.scc_of[s];
  rc.t_scc = rc.scc_of[t];
  return rc;
}

// Poset of all minimum s-t cuts: SCCs of the residual graph without the
// source and sink sides, ordered by reverse reachability. Ideals correspond
// to minimum cuts through tau.
struct PqPoset {
  std::vector<std::vector<int>> elems;  // sorted vertex sets
  std::vector<std::vector<bool>> leq;   // leq[i][j] iff elems[i] reachable from elems[j]
  std::vector<int> base;                // X_0: vertices reachable from s

  std::vector<int> tau(const std::vector<bool>& ideal) const {
    std::vector<int> cut = base;
    for (size_t i = 0; i < elems.size(); ++i)
      if (ideal[i]) cut.insert(cut.end(), elems[i].begin(), elems[i].end());
    std::sort(cut.begin(), cut.end());
    return cut;
  }

  // All minimum cuts, via exhaustive ideal enumeration. Desk scale only.
  std::vector<std::vector<int>> all_min_cuts() const {
    std::vector<std::vector<int>> cuts;
    int m = (int)elems.size();
    std::vector<bool> ideal(m, false);
    std::function<void(int)> rec = [&](int pos) {
      if (pos == m) {
        cuts.push_back(tau(ideal));
        return;
      }
      rec(pos + 1);
      bool ok = true;
      for (int d = 0; d < m && ok; ++d)
        if (d != pos && leq[d][pos] && !ideal[d]) ok = false;
      if (ok) {
        ideal[pos] = true;
        rec(pos + 1);
        ideal[pos] = false;
      }
    };
    rec(0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
  }
};

inline PqPoset pq_poset_from_condensation(const ResidualCondensation& rc) {
  PqPoset pq;
  std::vector<int> id(rc.nscc, -1);
  for (int c = 0; c < rc.nscc; ++c) {
    bool from_s = rc.reach[rc.s_scc][c];
    bool to_t = rc.reach[c][rc.t_scc];
    if (from_s || to_t) continue;
    id[c] = (int)pq.elems.size();
    pq.elems.push_back(rc.scc_verts[c]);
  }
  int m = (int)pq.elems.size();
  pq.leq.assign(m, std::vector<bool>(m, false));
  for (int c = 0; c < rc.nscc; ++c) {
    if (id[c] < 0) continue;
    for (int d = 0; d < rc.nscc; ++d)
      if (id[d] >= 0 && rc.reach[d][c]) pq.leq[id[c]][id[d]] = true;  // c reachable from d => c <= d
  }
  for (int c = 0; c < rc.nscc; ++c)
    if (rc.reach[rc.s_scc][c])
      for (int v : rc.scc_verts[c]) pq.base.push_back(v);
  std::sort(pq.base.begin(), pq.base.end());
  return pq;
}

inline PqPoset pq_poset(const FlowNetwork& net) {
  auto mf = max_flow(net);
  auto rg = residual(net, mf.flow);
  auto rc = condense(net.s, net.t, rg);
  return pq_poset_from_condensation(rc);
}

// tau(empty) = vertices reachable from s in the residual graph; the unique
// inclusion-minimal minimum cut.
inline std::vector<int> minimal_min_cut(const FlowNetwork& net) {
  auto mf = max_flow(net);
  auto rg = residual(net, mf.flow);
  std::vector<bool> seen(net.nv, false);
  std::vector<int> stk{net.s};
  seen[net.s] = true;
  while (!stk.empty()) {
    int v = stk.back();
    stk.pop_back();
    for (int w : rg.adj[v])
      if (!seen[w]) {
        seen[w] = true;
        stk.push_back(w);
      }
  }
  std::vector<int> cut;
  for (int v = 0; v < net.nv; ++v)
    if (seen[v]) cut.push_back(v);
  return cut;
}

inline long long cut_capacity(const FlowNetwork& net, const std::vector<bool>& in_cut) {
  long long c = 0;
  for (const auto& a : net.arcs)
    if (in_cut[a.from] && !in_cut[a.to]) c += a.cap;
  return c;
}

// Exhaustive minimum-cut family; the independent oracle the poset is tested against.
inline std::vector<std::vector<int>> brute_min_cut_family(const FlowNetwork& net) {
  std::vector<int> free_verts;
  for (int v = 0; v < net.nv; ++v)
    if (v != net.s && v != net.t) free_verts.push_back(v);
  if (free_verts.size() > 24) throw domain_error("network too large for brute-force cuts");
  long long best = -1;
  std::vector<std::vector<int>> fam;
  for (long long mask = 0; mask < (1LL << free_verts.size()); ++mask) {
    std::vector<bool> in(net.nv, false);
    in[net.s] = true;
    std::vector<int> cut{net.s};
    for (size_t i = 0; i < free_verts.size(); ++i)
      if (mask >> i & 1) {
        in[free_verts[i]] = true;
        cut.push_back(free_verts[i]);
      }
    long long c = cut_capacity(net, in);
    if (best < 0 || c < best) {
      best = c;
      fam.clear();
    }
    if (c == best) {
      std::sort(cut.begin(), cut.end());
      fam.push_back(cut);
    }
  }
  std::sort(fam.begin(), fam.end());
  return fam;
}

}  // namespace kpip
