#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kpip/birkhoff.hpp"
#include "kpip/flownet.hpp"
#include "kpip/kvector.hpp"
#include "kpip/pip.hpp"

namespace kpip {

// Directed s-t network whose non-terminal vertices are grouped into U_1..U_n,
// one group of k vertices per variable; cuts hitting every group at most once
// are in bijection with S_k^n.
struct GroupedNetwork {
  FlowNetwork net;
  std::vector<std::vector<int>> groups;  // groups[i][alpha-1] = vertex id of v_i^{alpha}
  Rat offset;                            // the constant K of the representation

  int n() const { return (int)groups.size(); }
  int k() const { return groups.empty() ? 0 : (int)groups[0].size(); }

  void check() const {
    std::vector<int> owner(net.nv, -1);
    for (const auto& g : groups) {
      if ((int)g.size() != k()) throw domain_error("groups must all have k vertices");
      for (int v : g) {
        if (v == net.s || v == net.t) throw domain_error("terminal inside a group");
        if (owner[v] != -1) throw domain_error("vertex in two groups");
        owner[v] = 1;
      }
    }
    for (int v = 0; v < net.nv; ++v)
      if (v != net.s && v != net.t && owner[v] == -1)
        throw domain_error("non-terminal vertex outside all groups");
  }
};

// psi(x) = {s} union {v_i^{x_i} : i in supp x}, as a sorted vertex list.
inline std::vector<int> psi(const GroupedNetwork& gn, const KVector& x) {
  if (x.n() != gn.n() || x.k() != gn.k()) throw domain_error("psi: dimension mismatch");
  std::vector<int> cut{gn.net.s};
  for (int i = 0; i < x.n(); ++i)
    if (x[i] != 0) cut.push_back(gn.groups[i][x[i] - 1]);
  std::sort(cut.begin(), cut.end());
  return cut;
}

inline std::optional<KVector> psi_inverse(const GroupedNetwork& gn, const std::vector<int>& cut) {
  std::set<int> in(cut.begin(), cut.end());
  if (!in.count(gn.net.s) || in.count(gn.net.t)) return std::nullopt;
  KVector x(gn.n(), gn.k());
  size_t seen = 1;
  for (int i = 0; i < gn.n(); ++i) {
    int hit = 0;
    for (int a = 1; a <= gn.k(); ++a)
      if (in.count(gn.groups[i][a - 1])) {
        ++hit;
        x.set(i, a);
      }
    if (hit > 1) return std::nullopt;  // not legal
    seen += hit;
  }
  if (seen != in.size()) return std::nullopt;  // stray vertex
  return x;
}

// X-down: drop every group the cut hits two or more times.
inline std::vector<int> legalize(const GroupedNetwork& gn, const std::vector<int>& cut) {
  std::set<int> in(cut.begin(), cut.end());
  if (!in.count(gn.net.s) || in.count(gn.net.t)) throw domain_error("legalize: not an s-t cut");
  for (int i = 0; i < gn.n(); ++i) {
    int hits = 0;
    for (int v : gn.groups[i]) hits += in.count(v);
    if (hits >= 2)
      for (int v : gn.groups[i]) in.erase(v);
  }
  return {in.begin(), in.end()};
}

inline long long grouped_cut_capacity(const GroupedNetwork& gn, const std::vector<int>& cut) {
  std::vector<bool> in(gn.net.nv, false);
  for (int v : cut) in[v] = true;
  return cut_capacity(gn.net, in);
}

struct RepresentationCheck {
  bool ok = false;
  std::string reason;
};

// NR1 over every point of S_k^n, NR2 over every s-t cut. Exponential in the
// vertex count; desk scale only.
inline RepresentationCheck verify_representation(const GroupedNetwork& gn, const TableFunction& f) {
  RepresentationCheck rc;
  if (f.n() != gn.n() || f.k() != gn.k()) {
    rc.reason = "dimension mismatch";
    return rc;
  }
  for (long long idx = 0; idx < f.size(); ++idx) {
    KVector x = KVector::from_index(idx, f.n(), f.k());
    if (f.at(idx).is_inf()) {
      rc.reason = "NR1 fails: network routes need finite values, f(" + x.str() + ") = inf";
      return rc;
    }
    Rat modeled = Rat(grouped_cut_capacity(gn, psi(gn, x))) + gn.offset;
    if (modeled != f.at(idx).finite()) {
      rc.reason = "NR1 fails at x = " + x.str() + ": c(psi(x)) + K = " + modeled.str() +
                  " but f(x) = " + f.at(idx).str();
      return rc;
    }
  }
  std::vector<int> free_verts;
  for (int v = 0; v < gn.net.nv; ++v)
    if (v != gn.net.s && v != gn.net.t) free_verts.push_back(v);
  if (free_verts.size() > 22) throw domain_error("network too large for NR2 enumeration");
  for (long long mask = 0; mask < (1LL << free_verts.size()); ++mask) {
    std::vector<int> cut{gn.net.s};
    for (size_t i = 0; i < free_verts.size(); ++i)
      if (mask >> i & 1) cut.push_back(free_verts[i]);
    std::sort(cut.begin(), cut.end());
    long long full = grouped_cut_capacity(gn, cut);
    long long legal = grouped_cut_capacity(gn, legalize(gn, cut));
    if (legal > full) {
      rc.reason = "NR2 fails: c(X-down) > c(X) for some cut";
      return rc;
    }
  }
  rc.ok = true;
  return rc;
}

namespace detail {

// Group index hit by an SCC, per group; -1 none, -2 two-or-more.
inline std::vector<int> group_hits(const GroupedNetwork& gn, const std::vector<int>& verts) {
  std::vector<int> owner(gn.net.nv, -1);
  for (int i = 0; i < gn.n(); ++i)
    for (int v : gn.groups[i]) owner[v] = i;
  std::vector<int> hits;
  for (int v : verts)
    if (owner[v] >= 0) hits.push_back(owner[v]);
  std::sort(hits.begin(), hits.end());
  return hits;
}

}  // namespace detail

struct SigmaExtraction {
  ResidualCondensation rc;
  std::vector<int> kept;                 // scc ids surviving the exclusion rules
  std::vector<std::vector<int>> elems;   // their vertex sets (kept order)
  std::vector<int> base;                 // X_0
};

// Algorithm-3 style extraction: drop source/sink sides and rule-3 sccs, then
// sweep in reverse topological order accumulating per-scc group hits; any
// doubly-hit group removes the scc and everything that reaches it.
inline SigmaExtraction apply_exclusion_rules(const GroupedNetwork& gn, const ResidualCondensation& rc) {
  SigmaExtraction ex;
  ex.rc = rc;
  const int m = rc.nscc;
  std::vector<bool> alive(m, true);
  std::vector<std::vector<int>> hits(m);
  for (int c = 0; c < m; ++c) hits[c] = detail::group_hits(gn, rc.scc_verts[c]);

  auto kill_reaching = [&](int target) {
    for (int c = 0; c < m; ++c)
      if (alive[c] && rc.reach[c][target]) alive[c] = false;
  };
  for (int c = 0; c < m; ++c) {
    if (rc.reach[rc.s_scc][c] || rc.reach[c][rc.t_scc]) alive[c] = false;
  }
  // rule 3: sccs holding two vertices of one group, and everything above them
  for (int c = 0; c < m; ++c)
    if (std::adjacent_find(hits[c].begin(), hits[c].end()) != hits[c].end()) kill_reaching(c);

  // rule 4 via reverse-topological accumulation of U_X
  std::vector<std::set<std::pair<int, int>>> ux(m);  // (group, scc that hit it)
  for (int idx = m - 1; idx >= 0; --idx) {
    int c = rc.topo[idx];
    if (!alive[c]) continue;
    std::set<std::pair<int, int>> acc;
    for (int gidx : hits[c]) acc.emplace(gidx, c);
    bool bad = false;
    for (int d : rc.succ[c]) {
      if (!alive[d]) continue;
      for (const auto& pr : ux[d]) acc.insert(pr);
    }
    std::map<int, std::set<int>> per_group;
    for (const auto& [g, c2] : acc) per_group[g].insert(c2);
    for (const auto& [g, who] : per_group)
      if (who.size() >= 2) bad = true;
    if (bad) {
      kill_reaching(c);
    } else {
      ux[c] = std::move(acc);
    }
  }
  for (int idx = 0; idx < m; ++idx) {
    int c = rc.topo[idx];
    if (alive[c]) {
      ex.kept.push_back(c);
      ex.elems.push_back(rc.scc_verts[c]);
    }
  }
  for (int c = 0; c < m; ++c)
    if (rc.reach[rc.s_scc][c])
      for (int v : rc.scc_verts[c]) ex.base.push_back(v);
  std::sort(ex.base.begin(), ex.base.end());
  return ex;
}

// Literal quadratic implementation of the four exclusion rules over all
// scc pairs; the independent oracle the sweep is tested against.
inline std::vector<int> exclusion_rules_oracle(const GroupedNetwork& gn, const ResidualCondensation& rc) {
  const int m = rc.nscc;
  std::vector<std::vector<int>> hits(m);
  for (int c = 0; c < m; ++c) hits[c] = detail::group_hits(gn, rc.scc_verts[c]);
  std::vector<int> kept;
  for (int c = 0; c < m; ++c) {
    if (rc.reach[rc.s_scc][c] || rc.reach[c][rc.t_scc]) continue;
    bool excluded = false;
    // rule 3: reachable to an scc containing >= 2 vertices of one group
    for (int d = 0; d < m && !excluded; ++d)
      if (rc.reach[c][d] &&
          std::adjacent_find(hits[d].begin(), hits[d].end()) != hits[d].end())
        excluded = true;
    // rule 4: reachable to distinct sccs hitting the same group once each
    for (int d = 0; d < m && !excluded; ++d) {
      if (!rc.reach[c][d]) continue;
      for (int e = d + 1; e < m && !excluded; ++e) {
        if (!rc.reach[c][e]) continue;
        for (int g : hits[d])
          if (std::binary_search(hits[e].begin(), hits[e].end(), g)) {
            excluded = true;
            break;
          }
      }
    }
    if (!excluded) kept.push_back(c);
  }
  return kept;
}

struct NetworkPip {
  Pip pip;                    // payloads: sorted scc vertex sets
  SigmaExtraction sigma;
  long long min_cut_value = 0;
  KVector minimum_minimizer;  // psi^{-1}(X_0)

  // Consistent ideals map through tau then psi^{-1} to minimizers.
  std::vector<KVector> minimizers(const GroupedNetwork& gn) const {
    std::vector<KVector> out;
    pip.for_each_consistent_ideal([&](const std::vector<bool>& ideal) {
      std::vector<int> cut = sigma.base;
      for (int e = 0; e < pip.size(); ++e)
        if (ideal[e]) cut.insert(cut.end(), sigma.elems[e].begin(), sigma.elems[e].end());
      std::sort(cut.begin(), cut.end());
      auto x = psi_inverse(gn, cut);
      if (!x) throw domain_error("ideal image is not a legal cut; network violates NR1/NR2");
      out.push_back(*x);
      return true;
    });
    std::sort(out.begin(), out.end());
    return out;
  }
};

// Full extraction: Sigma with reverse-reachability order, inconsistency
// from shared group hits, minimal pairs by componentwise domination.
inline NetworkPip pip_from_network(const GroupedNetwork& gn) {
  gn.check();
  NetworkPip out;
  auto mf = max_flow(gn.net);
  out.min_cut_value = mf.value;
  auto rg = residual(gn.net, mf.flow);
  auto rc = condense(gn.net.s, gn.net.t, rg);
  out.sigma = apply_exclusion_rules(gn, rc);

  const auto& elems = out.sigma.elems;
  const int m = (int)elems.size();
  std::vector<std::vector<int>> hits(m);
  for (int e = 0; e < m; ++e) hits[e] = detail::group_hits(gn, elems[e]);
  // order: X <= Y iff X reachable from Y
  std::vector<std::vector<bool>> leq(m, std::vector<bool>(m, false));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      leq[a][b] = rc.reach[out.sigma.kept[b]][out.sigma.kept[a]];
  // base inconsistency: distinct elements hitting one group each
  std::vector<std::pair<int, int>> shared;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      for (int g : hits[a])
        if (std::binary_search(hits[b].begin(), hits[b].end(), g)) {
          shared.emplace_back(a, b);
          break;
        }
  // keep the componentwise-minimal pairs only
  std::vector<std::pair<int, int>> minimal;
  for (auto [a, b] : shared) {
    bool dominated = false;
    for (auto [c, d] : shared) {
      if (c == a && d == b) continue;
      if ((leq[c][a] && leq[d][b]) || (leq[d][a] && leq[c][b])) {
        dominated = true;
        break;
      }
    }
    if (!dominated) minimal.emplace_back(a, b);
  }
  Pip p(m);
  for (int e = 0; e < m; ++e) {
    std::vector<long long> payload(elems[e].begin(), elems[e].end());
    p.set_payload(e, payload);
  }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (a != b && leq[a][b]) p.add_order(a, b);
  for (auto [a, b] : minimal) p.add_min_inconsistent(a, b);
  if (!p.finalize()) throw domain_error("residual order is cyclic");
  auto ec = p.check_elementary();
  for (int e = 0; e < m; ++e) p.set_part(e, ec.parts[e]);
  out.pip = std::move(p);
  auto x0 = psi_inverse(gn, out.sigma.base);
  if (!x0) throw domain_error("minimal minimum cut is not legal; network violates NR1/NR2");
  out.minimum_minimizer = *x0;
  return out;
}

}  // namespace kpip
