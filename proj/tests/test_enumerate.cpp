#include <catch2/catch.hpp>

#include "kpip/enumerate.hpp"
#include "kpip/selftest.hpp"

using namespace kpip;

namespace {

// Three minimally inconsistent pairs {x,x'}, {y,y'}, {z,z'} with
// y' < x, y' < z, z' < y, z' < x, x' < z, x' < y; the elementary PIP on
// which the pivot-pair selection property is unsatisfiable.
// Elements: x=0, x'=1, y=2, y'=3, z=4, z'=5.
Pip pivot_parity_pip() {
  Pip p(6);
  p.add_min_inconsistent(0, 1);
  p.add_min_inconsistent(2, 3);
  p.add_min_inconsistent(4, 5);
  p.add_order(3, 0);
  p.add_order(3, 4);
  p.add_order(5, 2);
  p.add_order(5, 0);
  p.add_order(1, 4);
  p.add_order(1, 2);
  if (!p.finalize()) throw std::runtime_error("unexpected cycle");
  return p;
}

SmallPoset antichain(int t) {
  SmallPoset p;
  p.m = t;
  p.leq.assign(t, std::vector<bool>(t, false));
  for (int i = 0; i < t; ++i) p.leq[i][i] = true;
  return p;
}

SmallPoset chain(int t) {
  SmallPoset p = antichain(t);
  for (int i = 0; i < t; ++i)
    for (int j = i; j < t; ++j) p.leq[i][j] = true;
  return p;
}

}  // namespace

TEST_CASE("poset ideal enumeration on basic shapes") {
  long long cnt = 0;
  for_each_poset_ideal(antichain(0), [&](const std::vector<bool>&) {
    ++cnt;
    return true;
  });
  REQUIRE(cnt == 1);  // only the empty ideal
  cnt = 0;
  for_each_poset_ideal(antichain(5), [&](const std::vector<bool>&) {
    ++cnt;
    return true;
  });
  REQUIRE(cnt == 32);
  cnt = 0;
  for_each_poset_ideal(chain(4), [&](const std::vector<bool>&) {
    ++cnt;
    return true;
  });
  REQUIRE(cnt == 5);
}

TEST_CASE("poset ideal enumeration matches the subset filter") {
  std::mt19937_64 rng(85);
  for (int round = 0; round < 40; ++round) {
    int m = 1 + (int)(rng() % 10);
    SmallPoset p = antichain(m);
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        if (rng() % 3 == 0)
          for (int c = 0; c < m; ++c)
            if (p.leq[c][a])
              for (int d = 0; d < m; ++d)
                if (p.leq[b][d]) p.leq[c][d] = true;
    long long expect = 0;
    for (long long mask = 0; mask < (1LL << m); ++mask) {
      bool ok = true;
      for (int a = 0; a < m && ok; ++a)
        for (int b = 0; b < m && ok; ++b)
          if (p.lt(a, b) && (mask >> b & 1) && !(mask >> a & 1)) ok = false;
      if (ok) ++expect;
    }
    long long got = 0;
    std::set<std::vector<bool>> seen;
    for_each_poset_ideal(p, [&](const std::vector<bool>& ideal) {
      ++got;
      REQUIRE(seen.insert(ideal).second);  // exactly once
      return true;
    });
    REQUIRE(got == expect);
    REQUIRE(count_poset_ideals(p) == BigUint((unsigned long long)expect));
  }
}

TEST_CASE("consistent ideal streams of pips") {
  // empty pip: exactly the empty ideal
  Pip empty(0);
  empty.finalize();
  REQUIRE(empty.count_consistent_ideals() == 1);
  // an antichain of mutually consistent elements
  Pip anti(4);
  anti.finalize();
  REQUIRE(anti.count_consistent_ideals() == 16);
}

TEST_CASE("maximal consistent ideals of simple pips") {
  Pip empty(0);
  empty.finalize();
  long long cnt = 0;
  for_each_maximal_consistent_ideal(empty, [&](const std::vector<bool>&) {
    ++cnt;
    return true;
  });
  REQUIRE(cnt == 1);

  Pip pair(2);
  pair.add_min_inconsistent(0, 1);
  pair.finalize();
  std::set<std::vector<bool>> got;
  for_each_maximal_consistent_ideal(pair, [&](const std::vector<bool>& ideal) {
    got.insert(ideal);
    return true;
  });
  REQUIRE(got == std::set<std::vector<bool>>{{true, false}, {false, true}});
}

TEST_CASE("maximal consistent ideals match the brute-force filter") {
  std::mt19937_64 rng(87);
  for (int round = 0; round < 40; ++round) {
    auto m = random_closed_set(rng, 2 + (int)(rng() % 3), 1 + (int)(rng() % 3));
    auto rep = pip_from_closed_set(m);
    // brute force: all consistent ideals, keep the inclusion-maximal ones
    std::vector<std::vector<bool>> all;
    rep.pip.for_each_consistent_ideal([&](const std::vector<bool>& ideal) {
      all.push_back(ideal);
      return true;
    });
    std::set<std::vector<bool>> expect;
    for (const auto& a : all) {
      bool maximal = true;
      for (const auto& b : all) {
        if (a == b) continue;
        bool subset = true;
        for (size_t e = 0; e < a.size(); ++e)
          if (a[e] && !b[e]) subset = false;
        if (subset) maximal = false;
      }
      if (maximal) expect.insert(a);
    }
    std::set<std::vector<bool>> got;
    for_each_maximal_consistent_ideal(rep.pip, [&](const std::vector<bool>& ideal) {
      REQUIRE(got.insert(ideal).second);
      return true;
    });
    REQUIRE(got == expect);
  }
}

TEST_CASE("pivot-parity pip: structure and maximal ideals") {
  Pip p = pivot_parity_pip();
  REQUIRE_FALSE(p.validate().has_value());
  REQUIRE(p.check_elementary().ok);

  std::set<std::vector<bool>> got;
  for_each_maximal_consistent_ideal(p, [&](const std::vector<bool>& ideal) {
    got.insert(ideal);
    return true;
  });
  // brute force over all subsets
  std::set<std::vector<bool>> all;
  for (int mask = 0; mask < 64; ++mask) {
    std::vector<bool> in(6);
    for (int e = 0; e < 6; ++e) in[e] = mask >> e & 1;
    if (p.is_consistent_ideal(in)) all.insert(in);
  }
  std::set<std::vector<bool>> expect;
  for (const auto& a : all) {
    bool maximal = true;
    for (const auto& b : all) {
      if (a == b) continue;
      bool subset = true;
      for (size_t e = 0; e < a.size(); ++e)
        if (a[e] && !b[e]) subset = false;
      if (subset) maximal = false;
    }
    if (maximal) expect.insert(a);
  }
  REQUIRE(got == expect);
  REQUIRE(got.size() == 4);

  // the compact-representation property fails: no maximal consistent ideal
  // picks exactly one of the two distinguished bottom elements for every
  // comparable part pair (the pairs {x',y'}, {y',z'}, {x',z'})
  const std::vector<std::pair<int, int>> pivot_pairs = {{1, 3}, {3, 5}, {1, 5}};
  for (const auto& ideal : got) {
    bool property = true;
    for (auto [a, b] : pivot_pairs)
      if ((int)ideal[a] + (int)ideal[b] != 1) property = false;
    REQUIRE_FALSE(property);
  }
}

TEST_CASE("r-poset blocks and the maximal-minimizer bijection") {
  std::mt19937_64 rng(89);
  for (int round = 0; round < 40; ++round) REQUIRE(selfcheck::maximal_enumeration(rng));
}

TEST_CASE("r-poset of disjoint layers is empty") {
  std::mt19937_64 rng(91);
  PottsInstance inst;
  inst.n = 2;
  inst.k = 2;
  inst.edges = {{0, 1, Rat(1)}};
  inst.unary = {{Rat(2), Rat(0), Rat(4)}, {Rat(2), Rat(0), Rat(4)}};
  inst.check();
  auto build = build_pip_potts(inst);
  RPoset r = build_r_poset(build.glued.layers);
  REQUIRE(r.blocks.empty());
  // exactly one maximal minimizer
  long long cnt = 0;
  for_each_maximal_minimizer(r, inst.n, inst.k, [&](const KVector&) {
    ++cnt;
    return true;
  });
  REQUIRE(cnt == 1);
  REQUIRE(count_maximal_minimizers(r).total == BigUint(1));
}

TEST_CASE("counting: independent tied regions multiply as powers of two") {
  // five regions anchor1 - tie - anchor2, chained; each tie vertex is free
  // between the two labels in every maximal minimizer
  const int regions = 5;
  PottsInstance inst;
  inst.n = 3 * regions;
  inst.k = 2;
  inst.unary.assign(inst.n, {});
  for (int r2 = 0; r2 < regions; ++r2) {
    int a1 = 3 * r2, tie = 3 * r2 + 1, a2 = 3 * r2 + 2;
    inst.unary[a1] = {Rat(5), Rat(0), Rat(10)};
    inst.unary[tie] = {Rat(0), Rat(0), Rat(0)};
    inst.unary[a2] = {Rat(5), Rat(10), Rat(0)};
    inst.edges.push_back({a1, tie, Rat(1)});
    inst.edges.push_back({tie, a2, Rat(1)});
    if (r2 + 1 < regions) inst.edges.push_back({a2, 3 * (r2 + 1), Rat(1)});
  }
  inst.check();
  auto build = build_pip_potts(inst);
  RPoset r = build_r_poset(build.glued.layers);
  FactoredCount fc = count_maximal_minimizers(r);
  std::set<KVector> via;
  for_each_maximal_minimizer(r, inst.n, inst.k, [&](const KVector& x) {
    via.insert(x);
    return true;
  });
  REQUIRE(fc.total == BigUint((unsigned long long)via.size()));
  REQUIRE(fc.total == BigUint(1ULL << regions));
  REQUIRE(fc.str() == "2^5");
}

TEST_CASE("big integer counts stay exact") {
  BigUint two(2), big(1);
  for (int i = 0; i < 66; ++i) big = big * two;
  REQUIRE(big.str() == "73786976294838206464");
  REQUIRE((big + BigUint(1)).str() == "73786976294838206465");
}

TEST_CASE("factored counts group repeated components") {
  SmallPoset single = SmallPoset{1, {{true}}};
  RPoset r;
  for (int i = 0; i < 3; ++i) {
    RPoset::Block b;
    b.alpha = 1;
    b.beta = 2;
    b.order = single;
    b.sets = {{i}};
    r.blocks.push_back(b);
  }
  FactoredCount fc = count_maximal_minimizers(r);
  REQUIRE(fc.total == BigUint(8));
  REQUIRE(fc.str() == "2^3");
}

TEST_CASE("instances without terminal edges: the whole graph is one choice") {
  // flat unaries: minimizers are the zero vector and every constant labeling
  PottsInstance flat;
  flat.n = 3;
  flat.k = 3;
  flat.edges = {{0, 1, Rat(1)}, {1, 2, Rat(2)}};
  flat.unary.assign(3, std::vector<Rat>(4, Rat(2)));
  flat.check();
  auto build = build_pip_potts(flat);
  auto mins = build.glued.all_minimizers(build.network);
  auto brute = brute_minimizer_set(flat.table());
  std::sort(brute.begin(), brute.end());
  REQUIRE(mins == brute);
  REQUIRE(brute.size() == 4);  // zero plus three constant labelings
  RPoset r = build_r_poset(build.glued.layers);
  REQUIRE(r.whole_graph_choice);
  std::set<KVector> via;
  for_each_maximal_minimizer(r, flat.n, flat.k, [&](const KVector& x) {
    via.insert(x);
    return true;
  });
  REQUIRE(via.size() == 3);
  REQUIRE(count_maximal_minimizers(r).total == BigUint(3));

  // with two fringe-free labels the ordinary pair block takes over
  PottsInstance fringed = flat;
  fringed.unary[0][1] = Rat(3);  // sigma for label 1 at vertex 0
  fringed.check();
  auto build2 = build_pip_potts(fringed);
  auto mins2 = build2.glued.all_minimizers(build2.network);
  auto brute2 = brute_minimizer_set(fringed.table());
  std::sort(brute2.begin(), brute2.end());
  REQUIRE(mins2 == brute2);
  RPoset r2 = build_r_poset(build2.glued.layers);
  REQUIRE_FALSE(r2.whole_graph_choice);
  REQUIRE(r2.blocks.size() == 1);
  std::set<KVector> via2;
  for_each_maximal_minimizer(r2, fringed.n, fringed.k, [&](const KVector& x) {
    via2.insert(x);
    return true;
  });
  REQUIRE(via2 == std::set<KVector>{KVector({2, 2, 2}, 3), KVector({3, 3, 3}, 3)});

  // three fringe-free labels out of four: the degenerate choice persists
  PottsInstance wide;
  wide.n = 2;
  wide.k = 4;
  wide.edges = {{0, 1, Rat(1)}};
  wide.unary.assign(2, std::vector<Rat>(5, Rat(2)));
  wide.unary[0][1] = Rat(3);
  wide.check();
  auto build3 = build_pip_potts(wide);
  auto mins3 = build3.glued.all_minimizers(build3.network);
  auto brute3 = brute_minimizer_set(wide.table());
  std::sort(brute3.begin(), brute3.end());
  REQUIRE(mins3 == brute3);
  RPoset r3 = build_r_poset(build3.glued.layers);
  REQUIRE(r3.whole_graph_choice);
  REQUIRE(r3.whole_graph_labels == std::vector<int>{2, 3, 4});
  std::set<KVector> via3;
  for_each_maximal_minimizer(r3, wide.n, wide.k, [&](const KVector& x) {
    via3.insert(x);
    return true;
  });
  REQUIRE(via3 == std::set<KVector>{KVector({2, 2}, 4), KVector({3, 3}, 4),
                                    KVector({4, 4}, 4)});
  REQUIRE(count_maximal_minimizers(r3).total == BigUint(3));
}
