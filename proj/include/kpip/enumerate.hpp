#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kpip/bigint.hpp"
#include "kpip/pip.hpp"
#include "kpip/potts.hpp"

namespace kpip {

// ---- generic poset ideal machinery ----------------------------------------

struct SmallPoset {
  int m = 0;
  std::vector<std::vector<bool>> leq;  // reflexive

  bool lt(int a, int b) const { return a != b && leq[a][b]; }
};

// Streams every ideal (downward-closed subset) exactly once via canonical
// include/exclude branching on a fixed linear extension.
inline bool for_each_poset_ideal(const SmallPoset& p,
                                 const std::function<bool(const std::vector<bool>&)>& visit) {
  std::vector<int> order;
  {
    std::vector<bool> placed(p.m, false);
    for (int step = 0; step < p.m; ++step)
      for (int e = 0; e < p.m; ++e) {
        if (placed[e]) continue;
        bool minimal = true;
        for (int d = 0; d < p.m && minimal; ++d)
          if (!placed[d] && p.lt(d, e)) minimal = false;
        if (minimal) {
          order.push_back(e);
          placed[e] = true;
          break;
        }
      }
  }
  std::vector<bool> in(p.m, false);
  std::function<bool(int)> rec = [&](int pos) -> bool {
    if (pos == p.m) return visit(in);
    int e = order[pos];
    if (!rec(pos + 1)) return false;
    bool can = true;
    for (int d = 0; d < p.m && can; ++d)
      if (p.lt(d, e) && !in[d]) can = false;
    if (can) {
      in[e] = true;
      if (!rec(pos + 1)) return false;
      in[e] = false;
    }
    return true;
  };
  return rec(0);
}

// Exact ideal count by recursive splitting on a minimal element with
// memoization over remaining-element masks. Components beyond 62 elements are
// outside desk scale.
inline BigUint count_poset_ideals(const SmallPoset& p) {
  if (p.m > 62) throw domain_error("poset component too large for exact counting");
  std::map<unsigned long long, BigUint> memo;
  std::function<BigUint(unsigned long long)> rec = [&](unsigned long long mask) -> BigUint {
    if (mask == 0) return BigUint(1);
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    // a minimal element of the remaining poset
    int e = -1;
    for (int v = 0; v < p.m && e < 0; ++v) {
      if (!(mask >> v & 1ULL)) continue;
      bool minimal = true;
      for (int d = 0; d < p.m && minimal; ++d)
        if ((mask >> d & 1ULL) && p.lt(d, v)) minimal = false;
      if (minimal) e = v;
    }
    unsigned long long without = mask;  // drop the up-set of e
    for (int v = 0; v < p.m; ++v)
      if ((mask >> v & 1ULL) && (v == e || p.lt(e, v))) without &= ~(1ULL << v);
    BigUint res = rec(without) + rec(mask & ~(1ULL << e));
    memo.emplace(mask, res);
    return res;
  };
  return rec(p.m == 64 ? ~0ULL : ((1ULL << p.m) - 1));
}

inline std::vector<std::vector<int>> poset_components(const SmallPoset& p) {
  std::vector<int> comp(p.m, -1);
  int nc = 0;
  for (int v = 0; v < p.m; ++v) {
    if (comp[v] >= 0) continue;
    std::vector<int> stk{v};
    comp[v] = nc;
    while (!stk.empty()) {
      int u = stk.back();
      stk.pop_back();
      for (int w = 0; w < p.m; ++w)
        if (comp[w] < 0 && (p.lt(u, w) || p.lt(w, u))) {
          comp[w] = nc;
          stk.push_back(w);
        }
    }
    ++nc;
  }
  std::vector<std::vector<int>> out(nc);
  for (int v = 0; v < p.m; ++v) out[comp[v]].push_back(v);
  return out;
}

// ---- maximal consistent ideals ---------------------------------------------

// Backtracking enumeration with a maximality certificate per emission: an
// ideal is maximal iff no outside element can be added together with its
// down-set without breaking consistency.
inline bool for_each_maximal_consistent_ideal(
    const Pip& p, const std::function<bool(const std::vector<bool>&)>& visit) {
  std::vector<int> order = p.linear_extension();
  std::vector<bool> in(p.size(), false);
  auto extendable = [&](const std::vector<bool>& ideal, int e) {
    // can ideal + down-set of e stay a consistent ideal?
    std::vector<bool> trial = ideal;
    for (int d = 0; d < p.size(); ++d)
      if (d == e || p.lt(d, e)) trial[d] = true;
    for (auto [a, b] : p.min_inconsistent())
      if (trial[a] && trial[b]) return false;
    return true;
  };
  std::function<bool(int)> rec = [&](int pos) -> bool {
    if (pos == (int)order.size()) {
      for (int e = 0; e < p.size(); ++e)
        if (!in[e] && extendable(in, e)) return true;  // not maximal; skip
      return visit(in);
    }
    int e = order[pos];
    bool can = true;
    for (int d = 0; d < p.size() && can; ++d)
      if (p.lt(d, e) && !in[d]) can = false;
    for (auto [a, b] : p.min_inconsistent()) {
      if (!can) break;
      if ((a == e && in[b]) || (b == e && in[a])) can = false;
    }
    if (can) {
      in[e] = true;
      if (!rec(pos + 1)) return false;
      in[e] = false;
    }
    if (!rec(pos + 1)) return false;
    return true;
  };
  return rec(0);
}

// ---- the R-poset of a Potts build ------------------------------------------

// Disjoint blocks Sigma_{alpha,beta} (alpha < beta) carrying the Sigma_alpha
// order; the fixed sets Sigma_{alpha,0} are the layer elements shared with no
// other layer.
struct RPoset {
  struct Block {
    int alpha = 0, beta = 0;
    std::vector<std::vector<int>> sets;  // shared SCC vertex sets
    SmallPoset order;                    // inherited from the alpha layer
  };
  std::vector<Block> blocks;
  // per layer alpha (1-based): indices of its elements that are private
  std::vector<std::vector<int>> layer_private;
  std::vector<IsolatingCutPoset> layers;
  // Unattached instance (no terminal edges at all): the whole graph is one
  // boundary-free component shared by every fringe-free label, and a maximal
  // minimizer just picks one of those labels for it.
  bool whole_graph_choice = false;
  std::vector<int> whole_graph;
  std::vector<int> whole_graph_labels;  // the labels whose layer is {whole_graph}

  int total_elements() const {
    int s = 0;
    for (const auto& b : blocks) s += b.order.m;
    return s;
  }
};

inline RPoset build_r_poset(const std::vector<IsolatingCutPoset>& layers) {
  RPoset r;
  r.layers = layers;
  int k = (int)layers.size();
  r.layer_private.assign(k + 1, {});
  std::map<std::vector<int>, std::vector<int>> owners;  // set -> layers (1-based)
  for (int a = 1; a <= k; ++a)
    for (const auto& s : layers[a - 1].elems) owners[s].push_back(a);
  for (const auto& [s, who] : owners) {
    if (who.size() <= 2) continue;
    // Sharing across three or more layers forces a boundary-free component,
    // which connectivity limits to the whole graph on instances without
    // terminal edges: every layer is then {whole graph} or empty.
    bool degenerate = true;
    for (int a = 1; a <= k && degenerate; ++a) {
      const auto& la = layers[a - 1];
      bool shares = la.elems.size() == 1 && la.elems[0] == s;
      degenerate = la.base.empty() && (shares || la.elems.empty());
    }
    if (!degenerate) throw domain_error("component shared by three layers");
    r.whole_graph_choice = true;
    r.whole_graph = s;
    for (int a : who) r.whole_graph_labels.push_back(a);
    return r;
  }
  for (int a = 1; a <= k; ++a) {
    const auto& la = layers[a - 1];
    for (size_t e = 0; e < la.elems.size(); ++e)
      if (owners.at(la.elems[e]).size() == 1) r.layer_private[a].push_back((int)e);
  }
  for (int a = 1; a <= k; ++a)
    for (int b = a + 1; b <= k; ++b) {
      const auto& la = layers[a - 1];
      std::vector<int> shared;  // element indices in layer a
      for (size_t e = 0; e < la.elems.size(); ++e) {
        const auto& who = owners.at(la.elems[e]);
        if (who.size() == 2 && who[0] == a && who[1] == b) shared.push_back((int)e);
      }
      if (shared.empty()) continue;
      RPoset::Block blk;
      blk.alpha = a;
      blk.beta = b;
      blk.order.m = (int)shared.size();
      blk.order.leq.assign(blk.order.m, std::vector<bool>(blk.order.m, false));
      for (int i = 0; i < blk.order.m; ++i) {
        blk.sets.push_back(la.elems[shared[i]]);
        for (int j = 0; j < blk.order.m; ++j) blk.order.leq[i][j] = la.leq[shared[i]][shared[j]];
      }
      r.blocks.push_back(std::move(blk));
    }
  return r;
}

// Labeling image of an R-ideal: per block, the chosen part labels alpha and
// the complement labels beta, on top of the private elements and the minimal
// cut bases.
inline KVector maximal_minimizer_of(const RPoset& r, int n, int k,
                                    const std::vector<std::vector<bool>>& choice) {
  KVector x(n, k);
  if (r.whole_graph_choice) {
    // the choices are symmetric; the lowest eligible label stands in
    for (int v : r.whole_graph) x.set(v, r.whole_graph_labels.front());
    return x;
  }
  for (int a = 1; a <= k; ++a) {
    for (int v : r.layers[a - 1].base) x.set(v, a);
    for (int e : r.layer_private[a])
      for (int v : r.layers[a - 1].elems[e]) x.set(v, a);
  }
  for (size_t b = 0; b < r.blocks.size(); ++b) {
    const auto& blk = r.blocks[b];
    for (int i = 0; i < blk.order.m; ++i) {
      int lab = choice[b][i] ? blk.alpha : blk.beta;
      for (int v : blk.sets[i]) x.set(v, lab);
    }
  }
  return x;
}

// Streams every maximal minimizer exactly once as the blocks' ideal choices
// run through their product.
inline bool for_each_maximal_minimizer(const RPoset& r, int n, int k,
                                       const std::function<bool(const KVector&)>& visit) {
  if (r.whole_graph_choice) {
    for (int lab : r.whole_graph_labels) {
      KVector x(n, k);
      for (int v : r.whole_graph) x.set(v, lab);
      if (!visit(x)) return false;
    }
    return true;
  }
  std::vector<std::vector<bool>> choice;
  for (const auto& blk : r.blocks) choice.emplace_back(blk.order.m, false);
  std::function<bool(size_t)> rec = [&](size_t b) -> bool {
    if (b == r.blocks.size()) return visit(maximal_minimizer_of(r, n, k, choice));
    return for_each_poset_ideal(r.blocks[b].order, [&](const std::vector<bool>& ideal) {
      choice[b] = ideal;
      return rec(b + 1);
    });
  };
  return rec(0);
}

struct FactoredCount {
  BigUint total{1};
  std::vector<std::pair<BigUint, int>> factors;  // (component count, multiplicity)

  std::string str() const {
    if (factors.empty()) return "1";
    std::string s;
    for (size_t i = 0; i < factors.size(); ++i) {
      if (i) s += " * ";
      s += factors[i].first.str();
      if (factors[i].second > 1) s += "^" + std::to_string(factors[i].second);
    }
    return s;
  }
};

// Number of maximal minimizers: the product over connected components of the
// R-poset of their ideal counts.
inline FactoredCount count_maximal_minimizers(const RPoset& r) {
  std::map<std::string, std::pair<BigUint, int>> grouped;
  std::vector<BigUint> counts;
  if (r.whole_graph_choice) {
    FactoredCount out;
    out.total = BigUint((unsigned long long)r.whole_graph_labels.size());
    out.factors = {{out.total, 1}};
    return out;
  }
  for (const auto& blk : r.blocks) {
    for (const auto& comp : poset_components(blk.order)) {
      SmallPoset sub;
      sub.m = (int)comp.size();
      sub.leq.assign(sub.m, std::vector<bool>(sub.m, false));
      for (int i = 0; i < sub.m; ++i)
        for (int j = 0; j < sub.m; ++j) sub.leq[i][j] = blk.order.leq[comp[i]][comp[j]];
      counts.push_back(count_poset_ideals(sub));
    }
  }
  FactoredCount out;
  for (const auto& c : counts) {
    out.total = out.total * c;
    auto& slot = grouped[c.str()];
    slot.first = c;
    slot.second += 1;
  }
  std::vector<std::pair<BigUint, int>> factors;
  for (auto& [key, val] : grouped) factors.push_back(val);
  std::sort(factors.begin(), factors.end(), [](const auto& a, const auto& b) {
    const std::string sa = a.first.str(), sb = b.first.str();
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    return sa < sb;
  });
  out.factors = std::move(factors);
  return out;
}

}  // namespace kpip
