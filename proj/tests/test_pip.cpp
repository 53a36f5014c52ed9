#include <catch2/catch.hpp>

#include "kpip/birkhoff.hpp"
#include "kpip/io_json.hpp"
#include "kpip/pip.hpp"
#include "kpip/selftest.hpp"

using namespace kpip;

namespace {

KVector kv(std::vector<int> labels, int k) { return KVector(std::move(labels), k); }

// The 11-element closed set of the running example on S_3^5.
std::vector<KVector> example_closed_set() {
  std::vector<std::vector<int>> pts = {
      {0, 0, 0, 0, 2}, {1, 3, 0, 0, 2}, {0, 0, 0, 1, 2}, {1, 3, 1, 0, 2},
      {1, 3, 0, 1, 2}, {1, 3, 2, 0, 2}, {0, 0, 3, 1, 2}, {1, 3, 1, 1, 2},
      {1, 3, 2, 1, 2}, {1, 3, 3, 1, 2}, {2, 2, 3, 1, 2}};
  std::vector<KVector> m;
  for (auto& p : pts) m.push_back(kv(p, 3));
  return m;
}

Pip chain_with_side(int len) {
  Pip p(len);
  for (int i = 0; i + 1 < len; ++i) p.add_order(i, i + 1);
  p.finalize();
  return p;
}

}  // namespace

TEST_CASE("pip axioms: valid structures pass") {
  // a <= c <= f, b <= c, d <= e; minimal pair {c, e}
  Pip p(6);
  p.add_order(0, 2);
  p.add_order(1, 2);
  p.add_order(3, 4);
  p.add_order(2, 5);
  p.add_min_inconsistent(2, 4);
  REQUIRE(p.finalize());
  REQUIRE_FALSE(p.validate().has_value());
  // the closure lifts {c, e} to {f, e}
  auto closure = p.inconsistency_closure();
  REQUIRE(closure == std::vector<std::pair<int, int>>{{2, 4}, {4, 5}});
}

TEST_CASE("pip axioms: a common upper bound violates MIC1") {
  // g above both c and e, with c minimally inconsistent to e
  Pip p(7);
  p.add_order(0, 2);
  p.add_order(1, 2);
  p.add_order(3, 4);
  p.add_order(2, 5);
  p.add_order(2, 6);
  p.add_order(4, 6);
  p.add_min_inconsistent(2, 4);
  REQUIRE(p.finalize());
  auto bad = p.validate();
  REQUIRE(bad.has_value());
  REQUIRE(bad->find("MIC1") == 0);
}

TEST_CASE("pip axioms: a dominated cross pair violates MIC2") {
  // pairs {b, d} and {c, e} with b <= c and d <= e
  Pip p(6);
  p.add_order(1, 2);
  p.add_order(3, 4);
  p.add_min_inconsistent(1, 3);
  p.add_min_inconsistent(2, 4);
  REQUIRE(p.finalize());
  auto bad = p.validate();
  REQUIRE(bad.has_value());
  REQUIRE(bad->find("MIC2") == 0);
}

TEST_CASE("pip rejects cyclic orders") {
  Pip p(2);
  p.add_order(0, 1);
  p.add_order(1, 0);
  REQUIRE_FALSE(p.finalize());
  REQUIRE(p.validate().has_value());
}

TEST_CASE("inconsistency closure on a chain") {
  // a < b, plus c with a minimally inconsistent to c
  Pip p(3);
  p.add_order(0, 1);
  p.add_min_inconsistent(0, 2);
  p.finalize();
  auto closure = p.inconsistency_closure();
  REQUIRE(closure == std::vector<std::pair<int, int>>{{0, 2}, {1, 2}});
}

TEST_CASE("consistent ideals") {
  Pip p(3);
  p.add_order(0, 1);
  p.add_min_inconsistent(1, 2);
  p.finalize();
  REQUIRE(p.is_consistent_ideal({false, false, false}));
  REQUIRE(p.is_consistent_ideal({true, true, false}));
  REQUIRE_FALSE(p.is_consistent_ideal({false, true, false}));  // not downward closed
  REQUIRE_FALSE(p.is_consistent_ideal({true, true, true}));    // inconsistent pair
  REQUIRE(p.count_consistent_ideals() == 5);                   // {}, a, ab, c, ac
}

TEST_CASE("ideal enumeration matches the subset filter") {
  std::mt19937_64 rng(41);
  for (int round = 0; round < 30; ++round) {
    int m = 1 + (int)(rng() % 6);
    Pip p(m);
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        if (rng() % 3 == 0) p.add_order(a, b);
    if (!p.finalize()) continue;
    // sprinkle minimal pairs that keep the axioms
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) {
        if (rng() % 4 != 0) continue;
        Pip q = p;
        q.add_min_inconsistent(a, b);
        q.finalize();
        if (!q.validate()) p = q;
      }
    p.finalize();
    long long direct = 0;
    for (long long mask = 0; mask < (1LL << m); ++mask) {
      std::vector<bool> in(m);
      for (int e = 0; e < m; ++e) in[e] = mask >> e & 1;
      if (p.is_consistent_ideal(in)) ++direct;
    }
    REQUIRE(p.count_consistent_ideals() == direct);
  }
}

TEST_CASE("join irreducibles of the running example") {
  auto m = example_closed_set();
  REQUIRE(is_closed_set(m));
  auto irr = join_irreducibles(m);
  std::vector<KVector> expected = {kv({0, 0, 0, 1, 2}, 3), kv({0, 0, 3, 1, 2}, 3),
                                   kv({1, 3, 0, 0, 2}, 3), kv({1, 3, 1, 0, 2}, 3),
                                   kv({1, 3, 2, 0, 2}, 3), kv({2, 2, 3, 1, 2}, 3)};
  std::sort(expected.begin(), expected.end());
  REQUIRE(irr == expected);
}

TEST_CASE("join irreducibles of a chain") {
  std::vector<KVector> chain;
  for (int t = 0; t <= 3; ++t) {
    KVector x(3, 3);
    for (int i = 0; i < t; ++i) x.set(i, 2);
    chain.push_back(x);
  }
  REQUIRE(join_irreducibles(chain).size() == 3);
}

TEST_CASE("irreducibles are the unique-cover elements on random closed sets") {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 40; ++round) {
    auto m = random_closed_set(rng, 2 + (int)(rng() % 3), 1 + (int)(rng() % 3));
    auto irr = join_irreducibles(m);
    KVector bottom = closed_set_minimum(m);
    for (const auto& x : m) {
      bool expect = x != bottom && lower_covers(x, m).size() == 1;
      bool got = std::binary_search(irr.begin(), irr.end(), x);
      REQUIRE(expect == got);
    }
    REQUIRE((int)irr.size() <= m.front().n() * m.front().k());  // Proposition 1
  }
}

TEST_CASE("differentials of the simple example") {
  // the S_3^4 example: drop the frozen last coordinate of the running example
  std::vector<std::vector<int>> pts = {{0, 0, 0, 0}, {1, 3, 0, 0}, {0, 0, 0, 1}, {1, 3, 1, 0},
                                       {1, 3, 0, 1}, {1, 3, 2, 0}, {0, 0, 3, 1}, {1, 3, 1, 1},
                                       {1, 3, 2, 1}, {1, 3, 3, 1}, {2, 2, 3, 1}};
  std::vector<KVector> m;
  for (auto& p : pts) m.push_back(kv(p, 3));
  REQUIRE(is_closed_set(m));
  REQUIRE(differential(kv({2, 2, 3, 1}, 3), m) == kv({2, 2, 0, 0}, 3));
  REQUIRE(differential(kv({1, 3, 1, 0}, 3), m) == kv({0, 0, 1, 0}, 3));
  // an atom's differential is itself
  REQUIRE(differential(kv({1, 3, 0, 0}, 3), m) == kv({1, 3, 0, 0}, 3));
  REQUIRE_THROWS_AS(differential(kv({1, 3, 1, 1}, 3), m), domain_error);  // two covers

  SECTION("normalization contracts the {0,1} class") {
    auto nz = normalize(m);
    REQUIRE(nz.n_tilde == 3);
    REQUIRE(nz.k_tilde == 3);
    REQUIRE(nz.normalized.size() == m.size());
    REQUIRE(nz.map(kv({2, 2, 3, 1}, 3)) == kv({2, 3, 1}, 3));
    REQUIRE(nz.map(kv({1, 3, 0, 0}, 3)) == kv({1, 0, 0}, 3));
    // order and inconsistency preserved
    for (const auto& x : m)
      for (const auto& y : m) {
        REQUIRE(partial_leq(x, y) == partial_leq(nz.map(x), nz.map(y)));
        REQUIRE(join_exists(x, y) == join_exists(nz.map(x), nz.map(y)));
      }
    // every differential of the image has singleton support
    for (const auto& x : join_irreducibles(nz.normalized))
      REQUIRE(differential(x, nz.normalized).support_size() == 1);
  }
}

TEST_CASE("normalize rejects non-simple sets") {
  auto m = example_closed_set();  // minimum is 00002
  REQUIRE_THROWS_AS(normalize(m), domain_error);
}

TEST_CASE("normalized output on random closed sets") {
  std::mt19937_64 rng(29);
  int done = 0;
  while (done < 25) {
    auto m = random_closed_set(rng, 2 + (int)(rng() % 3), 1 + (int)(rng() % 3));
    if (!closed_set_minimum(m).is_zero()) continue;
    ++done;
    auto nz = normalize(m);
    for (const auto& x : join_irreducibles(nz.normalized))
      REQUIRE(differential(x, nz.normalized).support_size() == 1);
  }
}

TEST_CASE("the running example PIP") {
  auto rep = pip_from_closed_set(example_closed_set());
  const Pip& p = rep.pip;
  REQUIRE(p.size() == 6);
  REQUIRE(p.covers().size() == 4);
  REQUIRE(p.min_inconsistent().size() == 4);
  REQUIRE_FALSE(p.validate().has_value());
  REQUIRE(p.check_elementary().ok);

  auto find = [&](std::vector<int> labels) {
    auto want = payload_of(kv(std::move(labels), 3));
    for (int e = 0; e < p.size(); ++e)
      if (p.payload(e) == want) return e;
    FAIL("payload not found");
    return -1;
  };
  int e13002 = find({1, 3, 0, 0, 2});
  int e00012 = find({0, 0, 0, 1, 2});
  int e13102 = find({1, 3, 1, 0, 2});
  int e13202 = find({1, 3, 2, 0, 2});
  int e00312 = find({0, 0, 3, 1, 2});
  int e22312 = find({2, 2, 3, 1, 2});
  // covers as drawn
  auto covers = p.covers();
  auto has_cover = [&](int lo, int hi) {
    return std::find(covers.begin(), covers.end(), std::make_pair(lo, hi)) != covers.end();
  };
  REQUIRE(has_cover(e13002, e13102));
  REQUIRE(has_cover(e13002, e13202));
  REQUIRE(has_cover(e00012, e00312));
  REQUIRE(has_cover(e00312, e22312));
  // minimal inconsistent pairs as drawn
  auto minc = p.min_inconsistent();
  auto has_pair = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    return std::find(minc.begin(), minc.end(), std::make_pair(a, b)) != minc.end();
  };
  REQUIRE(has_pair(e13102, e13202));
  REQUIRE(has_pair(e13202, e00312));
  REQUIRE(has_pair(e13102, e00312));
  REQUIRE(has_pair(e13002, e22312));
  // parts: {13002, 22312} | {13102, 13202, 00312} | {00012}
  REQUIRE(p.part(e13002) == p.part(e22312));
  REQUIRE(p.part(e13102) == p.part(e13202));
  REQUIRE(p.part(e13202) == p.part(e00312));
  REQUIRE(p.part(e13002) != p.part(e13102));
  REQUIRE(p.part(e00012) != p.part(e13002));
  REQUIRE(p.part(e00012) != p.part(e13102));

  SECTION("consistent ideal family is isomorphic to the set") {
    REQUIRE(p.count_consistent_ideals() == 11);
    std::set<KVector> rebuilt;
    p.for_each_consistent_ideal([&](const std::vector<bool>& ideal) {
      rebuilt.insert(join_of_ideal(p, ideal, rep.minimum));
      return true;
    });
    auto m = example_closed_set();
    REQUIRE(rebuilt == std::set<KVector>(m.begin(), m.end()));
  }
}

TEST_CASE("pip of a chain is a total order without inconsistency") {
  std::vector<KVector> chain;
  for (int t = 0; t <= 4; ++t) {
    KVector x(5, 2);
    for (int i = 0; i < t; ++i) x.set(i, 1);
    chain.push_back(x);
  }
  auto rep = pip_from_closed_set(chain);
  REQUIRE(rep.pip.size() == 4);
  REQUIRE(rep.pip.min_inconsistent().empty());
  REQUIRE(rep.pip.covers().size() == 3);
}

TEST_CASE("minimal inconsistent pairs equal the minimal pairs of the closure") {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 40; ++round) {
    auto m = random_closed_set(rng, 2 + (int)(rng() % 3), 1 + (int)(rng() % 3));
    auto rep = pip_from_closed_set(m);
    const auto& irr = rep.irreducibles;
    // oracle: inconsistent pairs are join-nonexistence; minimal by domination
    std::vector<std::pair<int, int>> incons;
    for (size_t a = 0; a < irr.size(); ++a)
      for (size_t b = a + 1; b < irr.size(); ++b)
        if (!join_exists(irr[a], irr[b])) incons.emplace_back((int)a, (int)b);
    std::vector<std::pair<int, int>> minimal;
    for (auto [a, b] : incons) {
      bool dominated = false;
      for (auto [c, d] : incons) {
        if (c == a && d == b) continue;
        bool below = (partial_leq(irr[c], irr[a]) && partial_leq(irr[d], irr[b])) ||
                     (partial_leq(irr[d], irr[a]) && partial_leq(irr[c], irr[b]));
        if (below) dominated = true;
      }
      if (!dominated) minimal.emplace_back(a, b);
    }
    std::sort(minimal.begin(), minimal.end());
    REQUIRE(rep.pip.min_inconsistent() == minimal);
  }
}

TEST_CASE("elementary axioms on the four reference shapes") {
  // (a) a three-element part with a singleton above one member: EP1 fails
  {
    Pip p(4);
    p.add_min_inconsistent(0, 1);
    p.add_min_inconsistent(1, 2);
    p.add_min_inconsistent(0, 2);
    p.add_order(0, 3);
    p.finalize();
    auto ec = p.check_elementary();
    REQUIRE_FALSE(ec.ok);
    REQUIRE(ec.violation.find("EP1") == 0);
  }
  // (b) the singleton below the part instead: elementary
  {
    Pip p(4);
    p.add_min_inconsistent(0, 1);
    p.add_min_inconsistent(1, 2);
    p.add_min_inconsistent(0, 2);
    p.add_order(3, 0);
    p.finalize();
    REQUIRE(p.check_elementary().ok);
  }
  // (c) two large parts, memberwise comparable: EP2 fails
  {
    Pip p(6);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        p.add_min_inconsistent(i, j);
        p.add_min_inconsistent(3 + i, 3 + j);
      }
    for (int i = 0; i < 3; ++i) p.add_order(3 + i, i);
    p.finalize();
    auto ec = p.check_elementary();
    REQUIRE_FALSE(ec.ok);
    REQUIRE(ec.violation.find("EP2") == 0);
  }
  // (d) two large parts with pivot elements: elementary
  {
    Pip p(6);  // part A = {0,1,2} with pivot 0, part B = {3,4,5} with pivot 3
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        p.add_min_inconsistent(i, j);
        p.add_min_inconsistent(3 + i, 3 + j);
      }
    p.add_order(0, 4);
    p.add_order(0, 5);
    p.add_order(3, 1);
    p.add_order(3, 2);
    p.finalize();
    REQUIRE_FALSE(p.validate().has_value());
    REQUIRE(p.check_elementary().ok);
  }
}

TEST_CASE("closed set from an elementary pip") {
  // one-element PIP realizes a two-element chain
  {
    Pip p(1);
    p.finalize();
    auto m = closed_set_from_pip(p);
    REQUIRE(m.size() == 2);
    REQUIRE(m == std::vector<KVector>{kv({0}, 1), kv({1}, 1)});
  }
  // the running example round-trips up to isomorphism
  {
    auto rep = pip_from_closed_set(example_closed_set());
    auto m2 = closed_set_from_pip(rep.pip);
    REQUIRE(m2.size() == 11);
    auto rep2 = pip_from_closed_set(m2);
    REQUIRE(rep2.pip.size() == 6);
    REQUIRE(rep2.pip.min_inconsistent().size() == 4);
    REQUIRE(rep2.pip.covers().size() == 4);
  }
}

TEST_CASE("round trip and elementary output on random closed sets") {
  std::mt19937_64 rng(37);
  for (int round = 0; round < 60; ++round) {
    REQUIRE(selfcheck::closed_set_roundtrip(rng));
  }
}

TEST_CASE("median semilattice properties of closed sets") {
  std::mt19937_64 rng(43);
  for (int round = 0; round < 20; ++round) {
    auto m = random_closed_set(rng, 2 + (int)(rng() % 2), 1 + (int)(rng() % 3));
    std::set<KVector> in(m.begin(), m.end());
    // pairwise-joinable triples are jointly joinable within the set
    for (const auto& x : m)
      for (const auto& y : m)
        for (const auto& z : m) {
          bool xy = join_exists(x, y), yz = join_exists(y, z), zx = join_exists(z, x);
          if (xy && yz && zx) {
            KVector j = sq_join(sq_join(x, y), z);
            REQUIRE(join_exists(sq_join(x, y), z));
            REQUIRE(in.count(j) == 1);
          }
        }
  }
}

TEST_CASE("pip json round trip") {
  auto rep = pip_from_closed_set(example_closed_set());
  json j = pip_to_json(rep.pip);
  Pip q = pip_from_json(j);
  for (int e = 0; e < q.size(); ++e) q.set_part(e, rep.pip.part(e));
  REQUIRE(q.canonical() == rep.pip.canonical());
  std::string dot = pip_to_dot(rep.pip);
  REQUIRE(dot.find("style=dashed") != std::string::npos);
}

TEST_CASE("non-simple closed sets translate through frozen coordinates") {
  auto m = example_closed_set();  // coordinate 5 frozen at 2
  auto rep = pip_from_closed_set(m);
  REQUIRE(rep.minimum == kv({0, 0, 0, 0, 2}, 3));
  for (const auto& x : rep.irreducibles) REQUIRE(x[4] == 2);
}
