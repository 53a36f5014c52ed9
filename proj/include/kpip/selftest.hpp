#pragma once

#include <atomic>
#include <ostream>
#include <random>
#include <thread>
#include <vector>

#include "kpip/birkhoff.hpp"
#include "kpip/enumerate.hpp"
#include "kpip/multiflow.hpp"
#include "kpip/netrep.hpp"
#include "kpip/oracle_builder.hpp"
#include "kpip/potts.hpp"

namespace kpip {

// ---- seeded instance generators (shared by selftest and the test suites) ---

// Connected graph on n vertices: a random tree plus a few extra edges.
inline std::vector<PottsInstance::Edge> random_connected_edges(std::mt19937_64& rng, int n,
                                                               long long lambda_max = 3) {
  std::vector<PottsInstance::Edge> edges;
  std::set<std::pair<int, int>> seen;
  auto lam = [&]() { return Rat(1 + (long long)(rng() % lambda_max)); };
  for (int v = 1; v < n; ++v) {
    int u = (int)(rng() % v);
    edges.push_back({u, v, lam()});
    seen.insert({u, v});
  }
  int extra = n >= 3 ? (int)(rng() % n) : 0;
  for (int i = 0; i < extra; ++i) {
    int u = (int)(rng() % n), v = (int)(rng() % n);
    if (u == v) continue;
    auto key = std::minmax(u, v);
    if (seen.count({key.first, key.second})) continue;
    seen.insert({key.first, key.second});
    edges.push_back({key.first, key.second, lam()});
  }
  return edges;
}

// Unary tables that are k-submodular on their own: values for labels 1..k are
// free, g(0) is at most the best pair average. Small value ranges plus
// injected label ties keep minimizer sets rich in structure.
inline std::vector<std::vector<Rat>> random_unary_tables(std::mt19937_64& rng, int n, int k,
                                                         long long value_max = 5) {
  std::vector<std::vector<Rat>> unary(n, std::vector<Rat>(k + 1, Rat(0)));
  for (int i = 0; i < n; ++i) {
    if (rng() % 4 == 0) {
      // a flat vertex: every label ties, including the unassigned one
      Rat v((long long)(rng() % (value_max + 1)));
      for (int a = 0; a <= k; ++a) unary[i][a] = v;
      continue;
    }
    for (int a = 1; a <= k; ++a) unary[i][a] = Rat((long long)(rng() % (value_max + 1)));
    if (k >= 2 && rng() % 2 == 0) {
      int a = 1 + (int)(rng() % k), b = 1 + (int)(rng() % k);
      unary[i][b] = unary[i][a];  // tie two labels
    }
    Rat best;
    bool first = true;
    if (k == 1) {
      // single label: any g(0) is fine
      best = unary[i][1] + Rat((long long)(rng() % 3));
    } else {
      for (int a = 1; a <= k; ++a)
        for (int b = a + 1; b <= k; ++b) {
          Rat cand = (unary[i][a] + unary[i][b]) / Rat(2);
          if (first || cand < best) best = cand;
          first = false;
        }
    }
    // mostly sit exactly on the pair-average boundary, where ties live
    long long slack = rng() % 3 == 0 ? (long long)(1 + rng() % 2) : 0;
    unary[i][0] = best - Rat(slack, 2);
  }
  return unary;
}

inline PottsInstance random_potts_instance(std::mt19937_64& rng, int n_max, int k_max,
                                           bool grid_shape = false) {
  int n = 2 + (int)(rng() % std::max(1, n_max - 1));
  int k = 2 + (int)(rng() % std::max(1, k_max - 1));
  PottsInstance inst;
  inst.k = k;
  if (grid_shape && n >= 4) {
    int w = 2 + (int)(rng() % 2);
    int h = std::max(2, n / w);
    n = w * h;
    inst.n = n;
    auto id = [&](int x, int y) { return y * w + x; };
    auto lam = [&]() { return Rat(1 + (long long)(rng() % 5)); };
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (x + 1 < w) inst.edges.push_back({id(x, y), id(x + 1, y), lam()});
        if (y + 1 < h) inst.edges.push_back({id(x, y), id(x, y + 1), lam()});
      }
  } else {
    inst.n = n;
    inst.edges = random_connected_edges(rng, n);
  }
  inst.unary = random_unary_tables(rng, inst.n, k);
  inst.check();
  return inst;
}

// Potts-form tables plus independent k-submodular unary terms; k-submodular
// by construction (sums of k-submodular functions are k-submodular).
inline TableFunction random_ksubmodular_table(std::mt19937_64& rng, int n_max, int k_max) {
  PottsInstance inst = random_potts_instance(rng, n_max, k_max);
  return inst.table();
}

// Rejection-sampled small tables: random integer values until the exhaustive
// inequality check passes.
inline TableFunction random_ksubmodular_table_rejection(std::mt19937_64& rng, int k) {
  while (true) {
    TableFunction f(2, k);
    for (long long i = 0; i < f.size(); ++i) f.set(i, ExtVal(Rat((long long)(rng() % 4))));
    if (!is_k_submodular(f)) return f;
  }
}

// Lattice distance to a target set: per coordinate 0 when equal, 1 across a
// zero, 2 between distinct nonzero labels. For a (meet,join)-closed target the
// table is k-submodular with exactly that argmin; handy for building
// functions with a prescribed minimizer set.
inline TableFunction distance_to_set_table(const std::vector<KVector>& m) {
  int n = m.front().n(), k = m.front().k();
  TableFunction f(n, k);
  for (long long idx = 0; idx < f.size(); ++idx) {
    KVector x = KVector::from_index(idx, n, k);
    long long best = -1;
    for (const auto& target : m) {
      long long d = 0;
      for (int i = 0; i < n; ++i) {
        if (x[i] == target[i]) continue;
        d += (x[i] != 0 && target[i] != 0) ? 2 : 1;
      }
      if (best < 0 || d < best) best = d;
    }
    f.set(idx, ExtVal(Rat(best)));
  }
  return f;
}

// Closure of random seed points under meet and join.
inline std::vector<KVector> random_closed_set(std::mt19937_64& rng, int n, int k,
                                              int seeds = 4) {
  std::set<KVector> m;
  long long space = TableFunction::size_of(n, k);
  for (int i = 0; i < seeds; ++i)
    m.insert(KVector::from_index((long long)(rng() % space), n, k));
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<KVector> cur(m.begin(), m.end());
    for (const auto& x : cur)
      for (const auto& y : cur) {
        if (m.insert(sq_meet(x, y)).second) grew = true;
        if (m.insert(sq_join(x, y)).second) grew = true;
      }
  }
  return {m.begin(), m.end()};
}

// Grouped-network gadgets: per-variable unary gadgets (arcs s -> v_i^a and
// v_i^a -> t) plus pairwise same-label arcs both ways, the standard Potts
// pattern. Returns the network together with the table it represents.
struct GadgetNetwork {
  GroupedNetwork gn;
  TableFunction table;
};

inline GadgetNetwork random_gadget_network(std::mt19937_64& rng, int n, int k) {
  GadgetNetwork out{GroupedNetwork{}, TableFunction(n, k)};
  GroupedNetwork& gn = out.gn;
  gn.net.s = gn.net.add_vertex("s");
  gn.net.t = gn.net.add_vertex("t");
  gn.groups.assign(n, {});
  for (int i = 0; i < n; ++i)
    for (int a = 1; a <= k; ++a)
      gn.groups[i].push_back(gn.net.add_vertex("v" + std::to_string(i) + "_" + std::to_string(a)));
  // unary gadgets: f_i(a) - f_i(0) = u_a - s_a with u_a + u_b >= s_a + s_b
  std::vector<std::vector<long long>> in_cap(n, std::vector<long long>(k, 0));
  std::vector<std::vector<long long>> out_cap(n, std::vector<long long>(k, 0));
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < k; ++a) {
      in_cap[i][a] = (long long)(rng() % 4);
      out_cap[i][a] = (long long)(rng() % 5);
    }
    // the escape arcs must dominate pairwise: out_a + out_b >= in_a + in_b.
    // Keep the largest deficit as is and cap every other one against it.
    if (k >= 2) {
      auto deficit = [&](int a) { return in_cap[i][a] - out_cap[i][a]; };
      int top = 0;
      for (int a = 1; a < k; ++a)
        if (deficit(a) > deficit(top)) top = a;
      long long dtop = deficit(top);
      if (dtop > 0)
        for (int a = 0; a < k; ++a) {
          if (a == top) continue;
          long long excess = deficit(a) + dtop;
          if (excess > 0) out_cap[i][a] += excess;
        }
    }
    for (int a = 0; a < k; ++a) {
      if (in_cap[i][a] > 0) gn.net.add_arc(gn.net.s, gn.groups[i][a], in_cap[i][a]);
      if (out_cap[i][a] > 0) gn.net.add_arc(gn.groups[i][a], gn.net.t, out_cap[i][a]);
    }
  }
  // pairwise Potts gadgets on a random connected graph
  auto edges = random_connected_edges(rng, n, 3);
  std::vector<std::vector<long long>> pair_lambda;
  for (const auto& e : edges) {
    long long lam = e.lambda.num();
    for (int a = 0; a < k; ++a) {
      gn.net.add_arc(gn.groups[e.u][a], gn.groups[e.v][a], lam);
      gn.net.add_arc(gn.groups[e.v][a], gn.groups[e.u][a], lam);
    }
  }
  // the represented function, from the gadget parameters
  for (long long idx = 0; idx < out.table.size(); ++idx) {
    KVector x = KVector::from_index(idx, n, k);
    long long val = 0;
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < k; ++a)
        if (x[i] != a + 1) val += in_cap[i][a];  // s->v arcs crossing
      if (x[i] != 0) val += out_cap[i][x[i] - 1];
    }
    for (const auto& e : edges) {
      long long lam = e.lambda.num();
      Rat d = potts_d(x[e.u], x[e.v]);
      Rat add = Rat(2 * lam) * d;
      val += add.num();  // 2*lam*d is an integer for d in {0, 1/2, 1}
    }
    out.table.set(idx, ExtVal(Rat(val)));
  }
  gn.offset = Rat(0);
  gn.check();
  return out;
}

// ---- cross checks -----------------------------------------------------------

namespace selfcheck {

inline bool closed_set_roundtrip(std::mt19937_64& rng) {
  int n = 2 + (int)(rng() % 3);
  int k = 1 + (int)(rng() % 3);
  auto m = random_closed_set(rng, n, k);
  auto rep = pip_from_closed_set(m);
  if (!rep.pip.check_elementary().ok) return false;
  std::set<KVector> rebuilt;
  bool order_ok = true;
  std::vector<std::pair<std::vector<bool>, KVector>> images;
  rep.pip.for_each_consistent_ideal([&](const std::vector<bool>& ideal) {
    KVector x = join_of_ideal(rep.pip, ideal, rep.minimum);
    rebuilt.insert(x);
    images.emplace_back(ideal, x);
    return true;
  });
  std::set<KVector> orig(m.begin(), m.end());
  if (rebuilt != orig || images.size() != m.size()) return false;
  for (const auto& [ia, xa] : images)
    for (const auto& [ib, xb] : images) {
      bool subset = true;
      for (size_t e = 0; e < ia.size(); ++e)
        if (ia[e] && !ib[e]) subset = false;
      if (subset != partial_leq(xa, xb)) order_ok = false;
    }
  return order_ok;
}

inline bool oracle_route(std::mt19937_64& rng) {
  TableFunction f = rng() % 4 == 0 ? random_ksubmodular_table_rejection(rng, 1 + (int)(rng() % 3))
                                   : random_ksubmodular_table(rng, 4, 3);
  TableOracle oracle(f);
  auto rep = build_pip_via_oracle(oracle);
  auto direct = pip_from_closed_set(brute_minimizer_set(f));
  if (rep.pip.canonical() != direct.pip.canonical()) return false;
  long long bound = 3LL * f.k() * f.n() * f.n();
  return rep.oracle_calls <= bound;
}

inline bool pq_families(std::mt19937_64& rng) {
  FlowNetwork net;
  int n = 4 + (int)(rng() % 7);
  for (int v = 0; v < n; ++v) net.add_vertex();
  net.s = 0;
  net.t = 1;
  int arcs = n + (int)(rng() % (2 * n));
  for (int i = 0; i < arcs; ++i) {
    int u = (int)(rng() % n), v = (int)(rng() % n);
    if (u == v) continue;
    net.add_arc(u, v, 1 + (long long)(rng() % 4));
  }
  auto pq = pq_poset(net);
  auto fam = pq.all_min_cuts();
  auto brute = brute_min_cut_family(net);
  return fam == brute;
}

inline bool potts_route(std::mt19937_64& rng) {
  PottsInstance inst = random_potts_instance(rng, 5, 3);
  PottsBuild build = build_pip_potts(inst);
  auto mins = build.glued.all_minimizers(build.network);
  auto brute = brute_minimizer_set(inst.table());
  std::sort(brute.begin(), brute.end());
  return mins == brute;
}

inline bool locking_route(std::mt19937_64& rng) {
  PottsInstance inst = random_potts_instance(rng, 5, 4);
  PottsNetwork pn = build_potts_network(inst);
  Multiflow f = locking_multiflow(pn);
  auto layers = sigma_from_locking(pn, f);
  for (int a = 1; a <= inst.k; ++a) {
    auto direct = alpha_mincut(pn, a);
    if (direct.cut_value != layers[a - 1].cut_value) return false;
    if (direct.elems != layers[a - 1].elems) return false;
    if (direct.leq != layers[a - 1].leq) return false;
    if (direct.base != layers[a - 1].base) return false;
  }
  return true;
}

inline bool maximal_enumeration(std::mt19937_64& rng) {
  PottsInstance inst = random_potts_instance(rng, 5, 3);
  PottsBuild build = build_pip_potts(inst);
  RPoset r = build_r_poset(build.glued.layers);
  std::set<KVector> via_r;
  for_each_maximal_minimizer(r, inst.n, inst.k, [&](const KVector& x) {
    via_r.insert(x);
    return true;
  });
  auto brute = brute_minimizer_set(inst.table());
  std::set<KVector> mins(brute.begin(), brute.end());
  std::set<KVector> maximal;
  for (const auto& x : mins) {
    bool is_max = true;
    for (const auto& y : mins)
      if (y != x && partial_leq(x, y)) is_max = false;
    if (is_max) maximal.insert(x);
  }
  if (via_r != maximal) return false;
  FactoredCount fc = count_maximal_minimizers(r);
  return fc.total == BigUint((unsigned long long)maximal.size());
}

inline bool network_route(std::mt19937_64& rng) {
  int n = 2 + (int)(rng() % 2);
  int k = 2 + (int)(rng() % 2);
  GadgetNetwork gadget = random_gadget_network(rng, n, k);
  auto check = verify_representation(gadget.gn, gadget.table);
  if (!check.ok) return false;
  auto np = pip_from_network(gadget.gn);
  auto mins = np.minimizers(gadget.gn);
  auto brute = brute_minimizer_set(gadget.table);
  std::sort(brute.begin(), brute.end());
  return mins == brute;
}

}  // namespace selfcheck

inline bool selftest(unsigned long long seed, int rounds, int jobs, std::ostream& os) {
  struct Entry {
    const char* name;
    bool (*fn)(std::mt19937_64&);
  };
  const Entry entries[] = {
      {"closed-set/pip round trip", selfcheck::closed_set_roundtrip},
      {"oracle route vs brute force", selfcheck::oracle_route},
      {"minimum-cut posets vs enumeration", selfcheck::pq_families},
      {"network route vs brute force", selfcheck::network_route},
      {"potts route vs brute force", selfcheck::potts_route},
      {"locking multiflow vs direct flows", selfcheck::locking_route},
      {"maximal-minimizer enumeration", selfcheck::maximal_enumeration},
  };
  bool all_ok = true;
  for (const auto& entry : entries) {
    std::atomic<int> failures{0};
    std::atomic<int> next{0};
    auto worker = [&]() {
      while (true) {
        int i = next.fetch_add(1);
        if (i >= rounds) break;
        std::mt19937_64 rng(seed * 1000003ULL + (unsigned long long)i);
        bool ok = false;
        try {
          ok = entry.fn(rng);
        } catch (const std::exception&) {
          ok = false;
        }
        if (!ok) failures.fetch_add(1);
      }
    };
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    bool ok = failures.load() == 0;
    all_ok = all_ok && ok;
    os << (ok ? "ok   " : "FAIL ") << entry.name << " (" << rounds << " instances)\n";
  }
  return all_ok;
}

}  // namespace kpip
