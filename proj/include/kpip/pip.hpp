#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kpip/kvector.hpp"

namespace kpip {

// Poset with inconsistent pairs. Elements are 0..size-1; the order is kept as
// a cached reachability closure over the input edges, minimal inconsistent
// pairs are stored explicitly, and the full inconsistency relation is always
// derived. Payloads are opaque integer sequences (label vectors, SCC vertex
// sets) used for canonicalization and cross-route comparisons.
class Pip {
 public:
  Pip() : m_(0) {}
  explicit Pip(int m) : m_(m), payload_(m), part_(m, -1), leq_(m, std::vector<bool>(m, false)) {
    for (int i = 0; i < m_; ++i) leq_[i][i] = true;
  }

  int size() const { return m_; }

  void set_payload(int e, std::vector<long long> p) { payload_[e] = std::move(p); }
  const std::vector<long long>& payload(int e) const { return payload_[e]; }
  void set_part(int e, int p) { part_[e] = p; }
  int part(int e) const { return part_[e]; }
  bool has_parts() const {
    for (int p : part_)
      if (p < 0) return m_ == 0;
    return true;
  }

  // Order edge lo <= hi; closure is recomputed on finalize().
  void add_order(int lo, int hi) { edges_.emplace_back(lo, hi); }
  void add_min_inconsistent(int a, int b) {
    if (a == b) throw domain_error("inconsistent pair needs distinct elements");
    if (a > b) std::swap(a, b);
    minc_.emplace_back(a, b);
  }

  // Computes the reachability closure. Returns false on a cyclic order.
  bool finalize() {
    std::sort(minc_.begin(), minc_.end());
    minc_.erase(std::unique(minc_.begin(), minc_.end()), minc_.end());
    std::vector<std::vector<int>> up(m_);
    std::vector<int> indeg(m_, 0);
    for (auto [lo, hi] : edges_) {
      up[lo].push_back(hi);
      ++indeg[hi];
    }
    // Kahn order; propagate reachability from tops downward.
    std::vector<int> topo, q;
    for (int i = 0; i < m_; ++i)
      if (indeg[i] == 0) q.push_back(i);
    while (!q.empty()) {
      int v = q.back();
      q.pop_back();
      topo.push_back(v);
      for (int w : up[v])
        if (--indeg[w] == 0) q.push_back(w);
    }
    if ((int)topo.size() != m_) {
      acyclic_ = false;
      return false;
    }
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < m_; ++j) leq_[i][j] = false;
      leq_[i][i] = true;
    }
    for (int idx = m_ - 1; idx >= 0; --idx) {
      int v = topo[idx];
      for (int w : up[v])
        for (int j = 0; j < m_; ++j)
          if (leq_[w][j]) leq_[v][j] = true;
    }
    acyclic_ = true;
    return true;
  }

  bool leq(int a, int b) const { return leq_[a][b]; }
  bool lt(int a, int b) const { return a != b && leq_[a][b]; }
  const std::vector<std::pair<int, int>>& min_inconsistent() const { return minc_; }

  // Covering edges of the order (transitive reduction), sorted.
  std::vector<std::pair<int, int>> covers() const {
    std::vector<std::pair<int, int>> cov;
    for (int a = 0; a < m_; ++a)
      for (int b = 0; b < m_; ++b) {
        if (!lt(a, b)) continue;
        bool direct = true;
        for (int c = 0; c < m_ && direct; ++c)
          if (c != a && c != b && lt(a, c) && lt(c, b)) direct = false;
        if (direct) cov.emplace_back(a, b);
      }
    return cov;
  }

  // First violated PIP axiom, if any: "acyclic", "MIC1" or "MIC2".
  std::optional<std::string> validate() const {
    if (!acyclic_) return "acyclic";
    for (auto [a, b] : minc_) {
      for (int r = 0; r < m_; ++r)
        if (leq_[a][r] && leq_[b][r])
          return std::string("MIC1: pair {") + std::to_string(a) + "," + std::to_string(b) +
                 "} has common upper bound " + std::to_string(r);
    }
    for (auto [a, b] : minc_)
      for (auto [c, d] : minc_) {
        if (a == c && b == d) continue;
        bool dominates = (leq_[c][a] && leq_[d][b]) || (leq_[d][a] && leq_[c][b]);
        if (dominates)
          return std::string("MIC2: pair {") + std::to_string(c) + "," + std::to_string(d) +
                 "} lies below pair {" + std::to_string(a) + "," + std::to_string(b) + "}";
      }
    return std::nullopt;
  }

  // Full inconsistency relation: p ~ q iff some minimal pair sits below (p,q).
  std::vector<std::pair<int, int>> inconsistency_closure() const {
    std::set<std::pair<int, int>> out;
    for (int p = 0; p < m_; ++p)
      for (int q = p + 1; q < m_; ++q)
        for (auto [a, b] : minc_) {
          if ((leq_[a][p] && leq_[b][q]) || (leq_[b][p] && leq_[a][q])) {
            out.emplace(p, q);
            break;
          }
        }
    return {out.begin(), out.end()};
  }

  bool is_consistent_ideal(const std::vector<bool>& in) const {
    for (int e = 0; e < m_; ++e) {
      if (!in[e]) continue;
      for (int d = 0; d < m_; ++d)
        if (lt(d, e) && !in[d]) return false;
    }
    for (auto [a, b] : minc_)
      if (in[a] && in[b]) return false;
    return true;
  }

  // Streams every consistent ideal exactly once (canonical branching over a
  // fixed linear extension). The visitor returns false to stop early.
  bool for_each_consistent_ideal(const std::function<bool(const std::vector<bool>&)>& visit) const {
    std::vector<int> order = linear_extension();
    std::vector<bool> in(m_, false);
    std::function<bool(int)> rec = [&](int pos) -> bool {
      if (pos == (int)order.size()) return visit(in);
      int e = order[pos];
      if (!rec(pos + 1)) return false;  // exclude e
      bool can = true;
      for (int d = 0; d < m_ && can; ++d)
        if (lt(d, e) && !in[d]) can = false;
      for (auto [a, b] : minc_) {
        if (!can) break;
        if ((a == e && in[b]) || (b == e && in[a])) can = false;
      }
      if (can) {
        in[e] = true;
        if (!rec(pos + 1)) return false;
        in[e] = false;
      }
      return true;
    };
    return rec(0);
  }

  long long count_consistent_ideals() const {
    long long c = 0;
    for_each_consistent_ideal([&](const std::vector<bool>&) {
      ++c;
      return true;
    });
    return c;
  }

  struct ElementaryCheck {
    bool ok = false;
    std::string violation;          // "EP0" / "EP1" / "EP2" with detail
    std::vector<int> parts;         // recovered part id per element
  };

  // Recovers parts as connected components of the minimal-inconsistency graph
  // (EP0 forces exactly that shape) and checks EP0/EP1/EP2.
  ElementaryCheck check_elementary() const {
    ElementaryCheck res;
    res.parts.assign(m_, -1);
    // connected components of the minimal-inconsistency graph
    std::vector<std::vector<int>> adj(m_);
    for (auto [a, b] : minc_) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    int np = 0;
    for (int i = 0; i < m_; ++i) {
      if (res.parts[i] >= 0) continue;
      std::vector<int> stack{i};
      res.parts[i] = np;
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[v])
          if (res.parts[w] < 0) {
            res.parts[w] = np;
            stack.push_back(w);
          }
      }
      ++np;
    }
    std::vector<std::vector<int>> members(np);
    for (int i = 0; i < m_; ++i) members[res.parts[i]].push_back(i);
    // EP0: each component must be a clique of the minimal-inconsistency graph
    std::set<std::pair<int, int>> mset(minc_.begin(), minc_.end());
    for (const auto& mem : members)
      for (size_t i = 0; i < mem.size(); ++i)
        for (size_t j = i + 1; j < mem.size(); ++j) {
          auto pr = std::minmax(mem[i], mem[j]);
          if (!mset.count({pr.first, pr.second})) {
            res.violation = "EP0: part is not a minimal-inconsistency clique";
            return res;
          }
        }
    // EP1
    for (int i = 0; i < np; ++i)
      for (int j = 0; j < np; ++j) {
        if (i == j || members[i].size() < 2 || members[j].size() != 1) continue;
        int y = members[j][0];
        for (int x : members[i])
          if (lt(x, y)) {
            res.violation = "EP1: element of a large part lies below a singleton part";
            return res;
          }
      }
    // EP2
    for (int i = 0; i < np; ++i)
      for (int j = i + 1; j < np; ++j) {
        if (members[i].size() < 2 || members[j].size() < 2) continue;
        bool any_comparable = false;
        for (int x : members[i])
          for (int y : members[j])
            if (lt(x, y) || lt(y, x)) any_comparable = true;
        if (!any_comparable) continue;  // EP2-1
        bool ok22 = false;
        for (int xo : members[i]) {
          for (int yo : members[j]) {
            bool good = true;
            for (int x : members[i])
              if (x != xo && !lt(yo, x)) good = false;
            for (int y : members[j])
              if (y != yo && !lt(xo, y)) good = false;
            if (good) {
              ok22 = true;
              break;
            }
          }
          if (ok22) break;
        }
        if (!ok22) {
          res.violation = "EP2: comparable large parts lack the pivot pair";
          return res;
        }
      }
    res.ok = true;
    return res;
  }

  // Canonical relabeling: part ids ordered by their minimal payload, elements
  // sorted by (part id, payload). Requires payloads on all elements.
  Pip canonical() const {
    if (m_ == 0) {
      Pip out(0);
      out.finalize();
      return out;
    }
    ElementaryCheck ec = check_elementary();
    const std::vector<int>& parts = ec.parts;
    int np = *std::max_element(parts.begin(), parts.end()) + 1;
    std::vector<std::vector<long long>> part_key(np);
    for (int e = 0; e < m_; ++e) {
      if (part_key[parts[e]].empty() || payload_[e] < part_key[parts[e]])
        part_key[parts[e]] = payload_[e];
    }
    std::vector<int> elems(m_);
    for (int i = 0; i < m_; ++i) elems[i] = i;
    std::sort(elems.begin(), elems.end(), [&](int a, int b) {
      if (part_key[parts[a]] != part_key[parts[b]]) return part_key[parts[a]] < part_key[parts[b]];
      return payload_[a] < payload_[b];
    });
    std::vector<int> newid(m_);
    for (int i = 0; i < m_; ++i) newid[elems[i]] = i;
    Pip out(m_);
    std::map<int, int> part_renum;
    for (int i = 0; i < m_; ++i) {
      int e = elems[i];
      out.set_payload(i, payload_[e]);
      auto it = part_renum.find(parts[e]);
      if (it == part_renum.end()) it = part_renum.emplace(parts[e], (int)part_renum.size()).first;
      out.set_part(i, it->second);
    }
    for (int a = 0; a < m_; ++a)
      for (int b = 0; b < m_; ++b)
        if (lt(a, b)) out.add_order(newid[a], newid[b]);
    for (auto [a, b] : minc_) out.add_min_inconsistent(newid[a], newid[b]);
    out.finalize();
    return out;
  }

  friend bool operator==(const Pip& a, const Pip& b) {
    return a.m_ == b.m_ && a.payload_ == b.payload_ && a.part_ == b.part_ && a.leq_ == b.leq_ &&
           a.minc_ == b.minc_;
  }
  friend bool operator!=(const Pip& a, const Pip& b) { return !(a == b); }

  std::vector<int> linear_extension() const {
    std::vector<int> order;
    std::vector<bool> placed(m_, false);
    for (int step = 0; step < m_; ++step) {
      for (int e = 0; e < m_; ++e) {
        if (placed[e]) continue;
        bool minimal = true;
        for (int d = 0; d < m_ && minimal; ++d)
          if (!placed[d] && lt(d, e)) minimal = false;
        if (minimal) {
          order.push_back(e);
          placed[e] = true;
          break;
        }
      }
    }
    return order;
  }

 private:
  int m_;
  bool acyclic_ = true;
  std::vector<std::vector<long long>> payload_;
  std::vector<int> part_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<bool>> leq_;
  std::vector<std::pair<int, int>> minc_;
};

}  // namespace kpip
