#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <vector>

#include "kpip/potts.hpp"
#include "kpip/rational.hpp"

namespace kpip {

// A T-path of the multiflow: runs between two terminals, or between a
// terminal and one of its own fringes, never through a terminal.
struct TPath {
  int va = -1, la = 0;     // endpoint A: terminal vertex and its label
  int vb = -1, lb = 0;     // endpoint B: terminal vertex or fringe vertex
  bool b_fringe = false;   // endpoint B is a fringe of label la
  std::vector<int> edges;  // edge ids, ordered from A to B
  Rat value;
};

struct Multiflow {
  std::vector<TPath> paths;

  Rat terminal_value(int label) const {
    Rat v(0);
    for (const auto& p : paths)
      if (p.la == label || (!p.b_fringe && p.lb == label)) v += p.value;
    return v;
  }
};

namespace mfdetail {

struct internal_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dinic over an exact capacity type; used with long long and Rat.
template <typename Cap>
struct Dinic {
  struct E {
    int to;
    Cap cap;
    int rev;
  };
  std::vector<std::vector<E>> g;
  explicit Dinic(int n) : g(n) {}
  int add(int u, int v, Cap c) {
    g[u].push_back({v, c, (int)g[v].size()});
    g[v].push_back({u, Cap(0), (int)g[u].size() - 1});
    return (int)g[u].size() - 1;
  }
  Cap flow_through(int u, int idx, Cap orig) const { return orig - g[u][idx].cap; }

  Cap run(int s, int t) {
    const int n = (int)g.size();
    Cap total(0);
    std::vector<int> level(n), iter(n);
    auto bfs = [&]() {
      std::fill(level.begin(), level.end(), -1);
      std::queue<int> q;
      level[s] = 0;
      q.push(s);
      while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (const auto& e : g[v])
          if (e.cap > Cap(0) && level[e.to] < 0) {
            level[e.to] = level[v] + 1;
            q.push(e.to);
          }
      }
      return level[t] >= 0;
    };
    Cap inf(0);
    for (const auto& lst : g)
      for (const auto& e : lst) inf += (e.cap > Cap(0) ? e.cap : Cap(0));
    inf += Cap(1);
    std::function<Cap(int, Cap)> dfs = [&](int v, Cap f) -> Cap {
      if (v == t) return f;
      for (int& i = iter[v]; i < (int)g[v].size(); ++i) {
        E& e = g[v][i];
        if (e.cap > Cap(0) && level[v] < level[e.to]) {
          Cap d = dfs(e.to, std::min(f, e.cap));
          if (d > Cap(0)) {
            e.cap -= d;
            g[e.to][e.rev].cap += d;
            return d;
          }
        }
      }
      return Cap(0);
    };
    while (bfs()) {
      std::fill(iter.begin(), iter.end(), 0);
      Cap f;
      while ((f = dfs(s, inf)) > Cap(0)) total += f;
    }
    return total;
  }

  std::vector<bool> source_side(int s) const {
    std::vector<bool> seen(g.size(), false);
    std::vector<int> stk{s};
    seen[s] = true;
    while (!stk.empty()) {
      int v = stk.back();
      stk.pop_back();
      for (const auto& e : g[v])
        if (e.cap > Cap(0) && !seen[e.to]) {
          seen[e.to] = true;
          stk.push_back(e.to);
        }
    }
    return seen;
  }
};

struct Terminal {
  int vertex = -1;
  int label = 0;
  std::vector<int> fringes;  // fringe vertex ids owned by this terminal
};

struct SubNet {
  struct Edge {
    int id;  // stable id across the recursion
    int a, b;
    long long cap;
  };
  std::vector<int> verts;
  std::vector<Edge> edges;
  std::vector<Terminal> terminals;

  int fringe_owner_label(int v) const {
    for (const auto& t : terminals)
      for (int f : t.fringes)
        if (f == v) return t.label;
    return -1;
  }
};

// Positive directed flow components keyed by (from, to) with per-edge-id
// values; opposite directions of the same edge id cancel on insertion.
struct DirFlow {
  std::map<std::pair<int, int>, std::map<int, Rat>> f;

  void add(int u, int v, int eid, Rat val) {
    if (val.is_zero()) return;
    if (val < Rat(0)) {
      add(v, u, eid, -val);
      return;
    }
    auto rit = f.find({v, u});
    if (rit != f.end()) {
      auto cit = rit->second.find(eid);
      if (cit != rit->second.end()) {
        Rat cancel = std::min(val, cit->second);
        cit->second -= cancel;
        val -= cancel;
        if (cit->second.is_zero()) rit->second.erase(cit);
        if (rit->second.empty()) f.erase(rit);
      }
    }
    if (!val.is_zero()) f[{u, v}][eid] += val;
  }

  // First outgoing component at u, if any: (to, eid, value).
  bool first_out(int u, int& to, int& eid, Rat& val) const {
    auto it = f.lower_bound({u, INT32_MIN});
    if (it == f.end() || it->first.first != u || it->second.empty()) return false;
    to = it->first.second;
    eid = it->second.begin()->first;
    val = it->second.begin()->second;
    return true;
  }

  Rat get(int u, int v, int eid) const {
    auto it = f.find({u, v});
    if (it == f.end()) return Rat(0);
    auto cit = it->second.find(eid);
    return cit == it->second.end() ? Rat(0) : cit->second;
  }

  void dec(int u, int v, int eid, Rat val) {
    auto it = f.find({u, v});
    auto cit = it->second.find(eid);
    cit->second -= val;
    if (cit->second.is_zero()) it->second.erase(cit);
    if (it->second.empty()) f.erase(it);
  }
};

}  // namespace mfdetail

// Computes a locking multiflow of the Potts terminal+fringe network: one
// multiflow whose per-label subflows are simultaneously maximum.
// Terminal halving with cut contraction handles many labels;
// leaves of at most three terminals are solved by pinned flow portfolios with
// exact verification.
class LockingSolver {
  using Terminal = mfdetail::Terminal;
  using SubNet = mfdetail::SubNet;
  using DirFlow = mfdetail::DirFlow;
  template <typename C>
  using Dinic = mfdetail::Dinic<C>;

 public:
  explicit LockingSolver(const PottsNetwork& pn) : pn_(pn) {
    next_vertex_ = pn.nv;
    next_label_ = pn.k + 1;
  }

  Multiflow solve() {
    SubNet root;
    for (int v = 0; v < pn_.nv; ++v) root.verts.push_back(v);
    for (size_t e = 0; e < pn_.edges.size(); ++e)
      root.edges.push_back({(int)e, pn_.edges[e].a, pn_.edges[e].b, pn_.edges[e].cap});
    for (int a = 1; a <= pn_.k; ++a) {
      Terminal t;
      t.vertex = pn_.terminal(a);
      t.label = a;
      for (int v = 0; v < pn_.nv; ++v)
        if (pn_.is_fringe(v) && pn_.flabel[v] == a) t.fringes.push_back(v);
      root.terminals.push_back(t);
    }
    Multiflow f = lock(root);
    verify(root, f);
    return f;
  }

  // Minimum alpha-cut value of a subnetwork terminal: own fringes forced to
  // the far side, other fringes dropped (they follow their owner for free).
  static long long isolating_cut_value(const SubNet& net, const Terminal& t) {
    std::set<int> fr = all_fringes(net);
    std::map<int, int> id;
    for (int v : net.verts)
      if (!fr.count(v)) id[v] = (int)id.size();
    int sink = (int)id.size();
    Dinic<long long> din(sink + 1);
    std::set<int> own(t.fringes.begin(), t.fringes.end());
    long long inf = 1;
    for (const auto& e : net.edges) inf += e.cap;
    for (const auto& e : net.edges) {
      bool fa = fr.count(e.a) > 0, fb = fr.count(e.b) > 0;
      if (fa && fb) throw domain_error("fringe-fringe edge");
      if (!fa && !fb) {
        din.add(id.at(e.a), id.at(e.b), e.cap);
        din.add(id.at(e.b), id.at(e.a), e.cap);
      } else {
        int f = fa ? e.a : e.b;
        int owner = fa ? e.b : e.a;
        if (own.count(f)) din.add(id.at(owner), sink, e.cap);
        // other terminals' fringes follow their owner at no cost
      }
    }
    for (const auto& u : net.terminals)
      if (u.vertex != t.vertex) din.add(id.at(u.vertex), sink, inf);
    return din.run(id.at(t.vertex), sink);
  }

 private:
  const PottsNetwork& pn_;
  int next_vertex_ = 0;
  int next_label_ = 0;

  static std::set<int> all_fringes(const SubNet& net) {
    std::set<int> fr;
    for (const auto& t : net.terminals) fr.insert(t.fringes.begin(), t.fringes.end());
    return fr;
  }

  // Minimum cut separating one terminal from the others in the fringeless
  // projection (all fringe edges ignored).
  static long long projection_cut_value(const SubNet& net, const Terminal& t) {
    if (net.terminals.size() <= 1) return 0;
    std::set<int> fr = all_fringes(net);
    std::map<int, int> id;
    for (int v : net.verts)
      if (!fr.count(v)) id[v] = (int)id.size();
    int sink = (int)id.size();
    Dinic<long long> din(sink + 1);
    long long inf = 1;
    for (const auto& e : net.edges) inf += e.cap;
    for (const auto& e : net.edges) {
      if (fr.count(e.a) || fr.count(e.b)) continue;
      din.add(id.at(e.a), id.at(e.b), e.cap);
      din.add(id.at(e.b), id.at(e.a), e.cap);
    }
    for (const auto& u : net.terminals)
      if (u.vertex != t.vertex) din.add(id.at(u.vertex), sink, inf);
    return din.run(id.at(t.vertex), sink);
  }

  Multiflow lock(const SubNet& net) {
    if (net.terminals.size() >= 4) return divide(net);
    return leaf(net);
  }

  // ---- divide: halve the terminal set along a minimum separating cut ------

  Multiflow divide(const SubNet& net) {
    std::vector<Terminal> terms = net.terminals;
    std::sort(terms.begin(), terms.end(),
              [](const Terminal& a, const Terminal& b) { return a.label < b.label; });
    size_t half = terms.size() / 2;
    std::vector<Terminal> left(terms.begin(), terms.begin() + half);
    std::vector<Terminal> right(terms.begin() + half, terms.end());

    std::set<int> fr = all_fringes(net);
    std::map<int, int> id;
    for (int v : net.verts)
      if (!fr.count(v)) id[v] = (int)id.size();
    int src = (int)id.size(), snk = src + 1;
    Dinic<long long> din(snk + 1);
    long long inf = 1;
    for (const auto& e : net.edges) inf += e.cap;
    for (const auto& e : net.edges) {
      if (fr.count(e.a) || fr.count(e.b)) continue;
      din.add(id.at(e.a), id.at(e.b), e.cap);
      din.add(id.at(e.b), id.at(e.a), e.cap);
    }
    for (const auto& t : left) din.add(src, id.at(t.vertex), inf);
    for (const auto& t : right) din.add(id.at(t.vertex), snk, inf);
    din.run(src, snk);
    auto side = din.source_side(src);
    std::map<int, int> owner_of;
    for (const auto& e : net.edges) {
      if (fr.count(e.a)) owner_of[e.a] = e.b;
      if (fr.count(e.b)) owner_of[e.b] = e.a;
    }
    std::set<int> in_x;  // full left side, fringes following their owners
    for (int v : net.verts)
      if (!fr.count(v) && side[id.at(v)]) in_x.insert(v);
    for (const auto& t : right)
      if (in_x.count(t.vertex)) throw mfdetail::internal_error("separating cut leaks a terminal");
    for (int v : net.verts)
      if (fr.count(v) && in_x.count(owner_of.at(v))) in_x.insert(v);

    std::set<int> left_labels, right_labels;
    for (const auto& t : left) left_labels.insert(t.label);
    for (const auto& t : right) right_labels.insert(t.label);

    int sprime = next_vertex_++, sprime_label = next_label_++;
    int sdouble = next_vertex_++, sdouble_label = next_label_++;

    SubNet net_l = contract_side(net, in_x, true, left, left_labels, sprime, sprime_label);
    SubNet net_r = contract_side(net, in_x, false, right, right_labels, sdouble, sdouble_label);

    Multiflow fl = lock(net_l);
    Multiflow fr2 = lock(net_r);
    return aggregate(net, in_x, fl, sprime_label, fr2, sdouble_label);
  }

  SubNet contract_side(const SubNet& net, const std::set<int>& in_x, bool keep_inside,
                       const std::vector<Terminal>& own_terms, const std::set<int>& own_labels,
                       int contraction_vertex, int contraction_label) const {
    std::set<int> fr = all_fringes(net);
    auto kept_vertex = [&](int v) {
      bool inside = in_x.count(v) > 0;
      if (inside != keep_inside) return false;
      if (!fr.count(v)) return true;
      return own_labels.count(net.fringe_owner_label(v)) > 0;
    };
    SubNet out;
    for (int v : net.verts)
      if (kept_vertex(v)) out.verts.push_back(v);
    out.verts.push_back(contraction_vertex);
    std::set<int> kept(out.verts.begin(), out.verts.end());
    for (const auto& e : net.edges) {
      bool ina = in_x.count(e.a) > 0, inb = in_x.count(e.b) > 0;
      if (ina != inb) {
        if (fr.count(e.a) || fr.count(e.b))
          throw mfdetail::internal_error("fringe edge crosses a separating cut");
        int inner = (ina == keep_inside) ? e.a : e.b;
        out.edges.push_back({e.id, inner, contraction_vertex, e.cap});
      } else if (kept.count(e.a) && kept.count(e.b)) {
        out.edges.push_back(e);
      }
    }
    for (Terminal t : own_terms) {
      std::vector<int> fringes;
      for (int f : t.fringes)
        if (kept.count(f)) fringes.push_back(f);
      t.fringes = std::move(fringes);
      out.terminals.push_back(t);
    }
    Terminal c;
    c.vertex = contraction_vertex;
    c.label = contraction_label;
    out.terminals.push_back(c);
    return out;
  }

  Multiflow aggregate(const SubNet& net, const std::set<int>& in_x, const Multiflow& fl,
                      int sprime_label, const Multiflow& fr2, int sdouble_label) const {
    Multiflow out;
    std::map<int, std::vector<TPath>> leftq, rightq;  // crossing edge id -> paths
    auto route = [&](const Multiflow& f, int contraction_label,
                     std::map<int, std::vector<TPath>>& q) {
      for (const auto& p : f.paths) {
        if (p.la == contraction_label) {
          TPath r = flipped(p);
          q[r.edges.back()].push_back(std::move(r));
        } else if (!p.b_fringe && p.lb == contraction_label) {
          q[p.edges.back()].push_back(p);
        } else {
          out.paths.push_back(p);
        }
      }
    };
    route(fl, sprime_label, leftq);
    route(fr2, sdouble_label, rightq);
    for (const auto& e : net.edges) {
      if ((in_x.count(e.a) > 0) == (in_x.count(e.b) > 0)) continue;
      auto& ls = leftq[e.id];
      auto& rs = rightq[e.id];
      Rat tl(0), tr(0);
      for (const auto& p : ls) tl += p.value;
      for (const auto& p : rs) tr += p.value;
      if (tl != Rat(e.cap) || tr != Rat(e.cap))
        throw mfdetail::internal_error("aggregation: crossing edge not saturated on both sides");
      size_t i = 0, j = 0;
      Rat ri = i < ls.size() ? ls[i].value : Rat(0);
      Rat rj = j < rs.size() ? rs[j].value : Rat(0);
      while (i < ls.size() && j < rs.size()) {
        Rat d = std::min(ri, rj);
        TPath merged;
        merged.va = ls[i].va;
        merged.la = ls[i].la;
        if (rs[j].b_fringe) throw mfdetail::internal_error("contraction path ends at a fringe");
        merged.vb = rs[j].va;
        merged.lb = rs[j].la;
        merged.b_fringe = false;
        merged.edges = ls[i].edges;
        for (size_t e2 = rs[j].edges.size() - 1; e2-- > 0;) merged.edges.push_back(rs[j].edges[e2]);
        merged.value = d;
        out.paths.push_back(std::move(merged));
        ri -= d;
        rj -= d;
        if (ri.is_zero() && ++i < ls.size()) ri = ls[i].value;
        if (rj.is_zero() && ++j < rs.size()) rj = rs[j].value;
      }
    }
    return out;
  }

  static TPath flipped(const TPath& p) {
    if (p.b_fringe) throw mfdetail::internal_error("cannot root a path at a fringe");
    TPath r;
    r.va = p.vb;
    r.la = p.lb;
    r.vb = p.va;
    r.lb = p.la;
    r.b_fringe = false;
    r.edges.assign(p.edges.rbegin(), p.edges.rend());
    r.value = p.value;
    return r;
  }

  // ---- leaf solver: at most three terminals -------------------------------

  struct PhasePlan {
    std::vector<int> order;
    bool hu_pairs = false;
  };

  Multiflow leaf(const SubNet& net) const {
    const int r = (int)net.terminals.size();
    if (r == 0) return {};
    std::vector<long long> c(r), m(r);
    for (int i = 0; i < r; ++i) {
      c[i] = isolating_cut_value(net, net.terminals[i]);
      m[i] = projection_cut_value(net, net.terminals[i]);
      if (c[i] < m[i]) throw mfdetail::internal_error("isolating cut below projection cut");
    }
    std::vector<std::vector<Rat>> lambda(r, std::vector<Rat>(r, Rat(0)));
    if (r == 2) {
      if (m[0] != m[1]) throw mfdetail::internal_error("pair cut values disagree");
      lambda[0][1] = lambda[1][0] = Rat(m[0]);
    } else if (r == 3) {
      for (int i = 0; i < 3; ++i) {
        int j = (i + 1) % 3, l = (i + 2) % 3;
        Rat lam = (Rat(m[i]) + Rat(m[j]) - Rat(m[l])) / Rat(2);
        if (lam < Rat(0)) throw mfdetail::internal_error("cut values violate the triangle bound");
        lambda[i][j] = lambda[j][i] = lam;
      }
    }
    // TODO: fold the plan portfolio into one provably complete construction
    // (the two-commodity averaging generalized to carry the fringe quotas).
    std::vector<PhasePlan> plans;
    if (r == 3) {
      std::vector<int> perm{0, 1, 2};
      do {
        plans.push_back({perm, true});
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    std::vector<int> perm(r);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      plans.push_back({perm, false});
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::string last_err = "no plan applicable";
    for (const auto& plan : plans) {
      try {
        Multiflow f = leaf_attempt(net, c, m, lambda, plan);
        verify(net, f);
        return f;
      } catch (const mfdetail::internal_error& e) {
        last_err = e.what();
      }
    }
    throw domain_error(std::string("locking leaf failed: ") + last_err);
  }

  Multiflow leaf_attempt(const SubNet& net, const std::vector<long long>& c,
                         const std::vector<long long>& m,
                         const std::vector<std::vector<Rat>>& lambda, const PhasePlan& plan) const {
    const int r = (int)net.terminals.size();
    Multiflow out;
    std::map<int, Rat> used;
    auto remaining = [&](const SubNet::Edge& e) {
      auto it = used.find(e.id);
      Rat rem = it == used.end() ? Rat(e.cap) : Rat(e.cap) - it->second;
      if (rem < Rat(0)) throw mfdetail::internal_error("negative remaining capacity");
      return rem;
    };
    auto commit = [&](std::vector<TPath>&& paths) {
      for (auto& p : paths) {
        for (int eid : p.edges) used[eid] += p.value;
        out.paths.push_back(std::move(p));
      }
    };
    std::vector<std::vector<Rat>> want = lambda;
    std::vector<Rat> fringe_want(r);
    for (int i = 0; i < r; ++i) {
      fringe_want[i] = Rat(c[i]) - Rat(m[i]);
      if (net.terminals[i].fringes.empty() && !fringe_want[i].is_zero())
        throw mfdetail::internal_error("fringe demand without fringes");
    }
    if (plan.hu_pairs && r == 3) {
      commit(hu_pair_flows(net, plan.order, lambda, remaining));
      for (auto& row : want)
        for (auto& v : row) v = Rat(0);
    }
    for (int idx : plan.order) {
      std::vector<std::pair<int, Rat>> sinks;
      for (int j = 0; j < r; ++j)
        if (!want[idx][j].is_zero()) {
          sinks.emplace_back(j, want[idx][j]);
          want[idx][j] = want[j][idx] = Rat(0);
        }
      if (sinks.empty() && fringe_want[idx].is_zero()) continue;
      commit(pinned_flow(net, idx, sinks, fringe_want[idx], remaining));
      fringe_want[idx] = Rat(0);
    }
    return out;
  }

  // Single-commodity pinned flow from one terminal: exact sink quotas toward
  // other terminals plus a pooled quota into its own fringes. Terminals are
  // split so flow cannot pass through them.
  template <typename RemainFn>
  std::vector<TPath> pinned_flow(const SubNet& net, int ti,
                                 const std::vector<std::pair<int, Rat>>& sinks, Rat fringe_total,
                                 const RemainFn& remaining) const {
    Rat total = fringe_total;
    for (const auto& [j, d] : sinks) total += d;
    if (total.is_zero()) return {};
    const Terminal& t = net.terminals[ti];
    std::set<int> own(t.fringes.begin(), t.fringes.end());
    std::set<int> fr = all_fringes(net);
    std::set<int> term_verts;
    for (const auto& u : net.terminals) term_verts.insert(u.vertex);
    std::map<int, int> base;
    int nn = 0;
    for (int v : net.verts) {
      if (fr.count(v) && !own.count(v)) continue;  // foreign fringes are inert
      base[v] = nn;
      nn += term_verts.count(v) ? 2 : 1;
    }
    int sigma = nn++, pi = nn++, pool = nn++;
    Dinic<Rat> din(nn);
    auto vin = [&](int v) { return base.at(v); };
    auto vout = [&](int v) { return base.at(v) + (term_verts.count(v) ? 1 : 0); };
    struct ArcRef {
      int eid;
      int u, idx;
      Rat cap;
      int from_v, to_v;
    };
    std::vector<ArcRef> arcs;
    for (const auto& e : net.edges) {
      bool fa = fr.count(e.a) > 0, fb = fr.count(e.b) > 0;
      if (fa || fb) {
        int f = fa ? e.a : e.b;
        int o = fa ? e.b : e.a;
        if (!own.count(f)) continue;
        Rat cap = remaining(e);
        int u = vout(o);
        int idx = din.add(u, vin(f), cap);
        arcs.push_back({e.id, u, idx, cap, o, f});
        din.add(vin(f), pool, cap);
        continue;
      }
      Rat cap = remaining(e);
      int u1 = vout(e.a), u2 = vout(e.b);
      int i1 = din.add(u1, vin(e.b), cap);
      arcs.push_back({e.id, u1, i1, cap, e.a, e.b});
      int i2 = din.add(u2, vin(e.a), cap);
      arcs.push_back({e.id, u2, i2, cap, e.b, e.a});
    }
    din.add(sigma, vout(t.vertex), total);
    if (!fringe_total.is_zero()) din.add(pool, pi, fringe_total);
    for (const auto& [j, d] : sinks) din.add(vin(net.terminals[j].vertex), pi, d);
    Rat got = din.run(sigma, pi);
    if (got != total) throw mfdetail::internal_error("pinned flow fell short");
    DirFlow flow;
    for (const auto& a : arcs) flow.add(a.from_v, a.to_v, a.eid, din.flow_through(a.u, a.idx, a.cap));
    return extract_tpaths(net, t, own, flow);
  }

  // Hu-style averaging for the three-terminal pair system, in the order
  // (i, j, l): commodity A routes i's pair flows, commodity B routes the
  // (j,l) flow; u = A + B and w = A - B are plain transshipments whose half
  // sum and difference satisfy the joint capacity exactly.
  template <typename RemainFn>
  std::vector<TPath> hu_pair_flows(const SubNet& net, const std::vector<int>& order,
                                   const std::vector<std::vector<Rat>>& lambda,
                                   const RemainFn& remaining) const {
    int i = order[0], j = order[1], l = order[2];
    std::set<int> fr = all_fringes(net);
    std::set<int> term_verts;
    for (const auto& u : net.terminals) term_verts.insert(u.vertex);
    std::map<int, int> base;
    int nn = 0;
    for (int v : net.verts) {
      if (fr.count(v)) continue;
      base[v] = nn;
      nn += term_verts.count(v) ? 2 : 1;
    }
    int sigma = nn++, pi = nn++;
    auto vin = [&](int v) { return base.at(v); };
    auto vout = [&](int v) { return base.at(v) + (term_verts.count(v) ? 1 : 0); };
    struct ArcRef {
      int eid;
      int u, idx;
      Rat cap;
      int from_v, to_v;
    };
    // gross terminal in/out quotas per commodity sum
    const int tvi = net.terminals[i].vertex, tvj = net.terminals[j].vertex,
              tvl = net.terminals[l].vertex;
    Rat lij = lambda[i][j], lil = lambda[i][l], ljl = lambda[j][l];
    struct Quota {
      std::vector<std::pair<int, Rat>> sup;  // vertex, amount out
      std::vector<std::pair<int, Rat>> dem;  // vertex, amount in
    };
    Quota qu, qw;
    qu.sup = {{tvi, lij + lil}, {tvj, ljl}};
    qu.dem = {{tvj, lij}, {tvl, lil + ljl}};
    qw.sup = {{tvi, lij + lil}, {tvl, ljl}};
    qw.dem = {{tvj, lij + ljl}, {tvl, lil}};
    auto solve = [&](const Quota& q, std::vector<ArcRef>& arcs, Dinic<Rat>& din) {
      for (const auto& e : net.edges) {
        if (fr.count(e.a) || fr.count(e.b)) continue;
        Rat cap = remaining(e);
        int i1 = din.add(vout(e.a), vin(e.b), cap);
        arcs.push_back({e.id, vout(e.a), i1, cap, e.a, e.b});
        int i2 = din.add(vout(e.b), vin(e.a), cap);
        arcs.push_back({e.id, vout(e.b), i2, cap, e.b, e.a});
      }
      Rat total(0);
      for (const auto& [v, amt] : q.sup) {
        if (!amt.is_zero()) din.add(sigma, vout(v), amt);
        total += amt;
      }
      for (const auto& [v, amt] : q.dem)
        if (!amt.is_zero()) din.add(vin(v), pi, amt);
      Rat got = din.run(sigma, pi);
      if (got != total) throw mfdetail::internal_error("pair transshipment infeasible");
    };
    std::vector<ArcRef> arcs_u, arcs_w;
    Dinic<Rat> din_u(nn), din_w(nn);
    solve(qu, arcs_u, din_u);
    solve(qw, arcs_w, din_w);
    // signed accumulation per (direction, edge id)
    std::map<std::tuple<int, int, int>, Rat> su, sw;
    auto accumulate = [](const std::vector<ArcRef>& arcs, Dinic<Rat>& din,
                         std::map<std::tuple<int, int, int>, Rat>& out) {
      for (const auto& a : arcs) {
        Rat f = din.flow_through(a.u, a.idx, a.cap);
        if (!f.is_zero()) out[{a.from_v, a.to_v, a.eid}] += f;
      }
    };
    accumulate(arcs_u, din_u, su);
    accumulate(arcs_w, din_w, sw);
    std::set<std::tuple<int, int, int>> keys;
    for (const auto& [k2, v2] : su) keys.insert(k2);
    for (const auto& [k2, v2] : sw) keys.insert(k2);
    DirFlow x, y;
    for (const auto& k2 : keys) {
      auto [a, b, eid] = k2;
      Rat uu = su.count(k2) ? su.at(k2) : Rat(0);
      Rat ww = sw.count(k2) ? sw.at(k2) : Rat(0);
      x.add(a, b, eid, (uu + ww) / Rat(2));
      y.add(a, b, eid, (uu - ww) / Rat(2));
    }
    std::set<int> no_fringes;
    std::vector<TPath> paths = extract_tpaths(net, net.terminals[i], no_fringes, x);
    std::vector<TPath> more = extract_tpaths(net, net.terminals[j], no_fringes, y);
    paths.insert(paths.end(), more.begin(), more.end());
    return paths;
  }

  // Walks positive flow from a source terminal into terminal- or own-fringe-
  // terminated simple paths; cycles met on the way are canceled.
  std::vector<TPath> extract_tpaths(const SubNet& net, const Terminal& src,
                                    const std::set<int>& own_fringes, DirFlow& flow) const {
    std::set<int> term_verts;
    for (const auto& u : net.terminals) term_verts.insert(u.vertex);
    std::vector<TPath> out;
    while (true) {
      int v = src.vertex;
      std::vector<int> seq{v};
      std::vector<int> eids;
      std::map<int, int> pos{{v, 0}};
      bool done = false;
      while (true) {
        int to, eid;
        Rat val;
        if (!flow.first_out(v, to, eid, val)) {
          if (seq.size() == 1) done = true;  // source exhausted
          else
            throw mfdetail::internal_error("flow path ends at a plain vertex");
          break;
        }
        if (pos.count(to)) {
          // cancel the detected cycle, restart the walk
          Rat d = val;
          for (int s2 = pos[to]; s2 + 1 < (int)seq.size(); ++s2)
            d = std::min(d, flow.get(seq[s2], seq[s2 + 1], eids[s2]));
          for (int s2 = pos[to]; s2 + 1 < (int)seq.size(); ++s2)
            flow.dec(seq[s2], seq[s2 + 1], eids[s2], d);
          flow.dec(v, to, eid, d);
          seq.assign(1, src.vertex);
          eids.clear();
          pos.clear();
          pos[src.vertex] = 0;
          v = src.vertex;
          continue;
        }
        seq.push_back(to);
        eids.push_back(eid);
        pos[to] = (int)seq.size() - 1;
        v = to;
        if (term_verts.count(v) || own_fringes.count(v)) break;
      }
      if (done) break;
      Rat d = flow.get(seq[0], seq[1], eids[0]);
      for (size_t s2 = 0; s2 + 1 < seq.size(); ++s2)
        d = std::min(d, flow.get(seq[s2], seq[s2 + 1], eids[s2]));
      int last = seq.back();
      TPath p;
      p.va = src.vertex;
      p.la = src.label;
      p.vb = last;
      if (own_fringes.count(last)) {
        p.b_fringe = true;
        p.lb = src.label;
      } else {
        p.b_fringe = false;
        for (const auto& u : net.terminals)
          if (u.vertex == last) p.lb = u.label;
        if (p.lb == src.label)
          throw mfdetail::internal_error("path returns to its own terminal");
      }
      p.edges = eids;
      p.value = d;
      for (size_t s2 = 0; s2 + 1 < seq.size(); ++s2) flow.dec(seq[s2], seq[s2 + 1], eids[s2], d);
      out.push_back(std::move(p));
    }
    return out;
  }

  // Exact post-checks: joint capacity per edge and the locking value per
  // terminal.
  void verify(const SubNet& net, const Multiflow& f) const {
    std::map<int, Rat> used;
    for (const auto& p : f.paths) {
      if (!(p.value > Rat(0))) throw mfdetail::internal_error("nonpositive path value");
      for (int eid : p.edges) used[eid] += p.value;
    }
    std::map<int, long long> caps;
    for (const auto& e : net.edges) caps[e.id] = e.cap;
    for (const auto& [eid, u] : used) {
      auto it = caps.find(eid);
      if (it == caps.end() || u > Rat(it->second))
        throw mfdetail::internal_error("edge capacity exceeded");
    }
    for (const auto& t : net.terminals) {
      Rat v = f.terminal_value(t.label);
      long long want = isolating_cut_value(net, t);
      if (v != Rat(want)) throw mfdetail::internal_error("terminal flow misses its cut value");
    }
  }
};

// Per-label node-arc flows of the multiflow on the alpha reductions; rebuilds
// each Sigma_alpha from the residual graph of f_alpha.
inline std::vector<IsolatingCutPoset> sigma_from_locking(const PottsNetwork& pn,
                                                         const Multiflow& f) {
  std::vector<IsolatingCutPoset> out;
  for (int alpha = 1; alpha <= pn.k; ++alpha) {
    AlphaReduction red = alpha_reduction(pn, alpha);
    std::vector<Rat> arc_flow(red.net.arcs.size(), Rat(0));
    Rat value(0);
    for (const auto& p : f.paths) {
      bool fwd = p.la == alpha;
      bool bwd = !p.b_fringe && p.lb == alpha;
      if (!fwd && !bwd) continue;
      value += p.value;
      std::vector<int> eids = p.edges;
      int at = fwd ? p.va : p.vb;
      if (!fwd) std::reverse(eids.begin(), eids.end());
      for (int eid : eids) {
        const auto& e = pn.edges[eid];
        if (e.a != at && e.b != at) throw domain_error("path does not chain");
        int arc = e.a == at ? red.arc_fwd[eid] : red.arc_bwd[eid];
        if (arc < 0) throw domain_error("alpha path uses an edge outside its reduction");
        arc_flow[arc] += p.value;
        at = e.a == at ? e.b : e.a;
      }
    }
    ResidualGraph rg;
    rg.nv = red.net.nv;
    rg.adj.assign(red.net.nv, {});
    for (size_t a = 0; a < red.net.arcs.size(); ++a) {
      const auto& arc = red.net.arcs[a];
      if (arc_flow[a] > Rat(arc.cap)) throw domain_error("alpha flow exceeds capacity");
      if (arc_flow[a] < Rat(arc.cap)) rg.adj[arc.from].push_back(arc.to);
      if (arc_flow[a] > Rat(0)) rg.adj[arc.to].push_back(arc.from);
    }
    for (auto& lst : rg.adj) {
      std::sort(lst.begin(), lst.end());
      lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
    }
    IsolatingCutPoset icp = isolating_poset_from_residual(pn, alpha, red, rg);
    if (!value.is_integer()) throw domain_error("alpha flow value is not integral");
    icp.cut_value = value.num();
    out.push_back(icp);
  }
  return out;
}

inline Multiflow locking_multiflow(const PottsNetwork& pn) {
  LockingSolver solver(pn);
  return solver.solve();
}

}  // namespace kpip
