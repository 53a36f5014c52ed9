#include <catch2/catch.hpp>

#include "kpip/oracle_builder.hpp"
#include "kpip/selftest.hpp"

using namespace kpip;

TEST_CASE("minimum minimizer of a constant function is zero") {
  TableFunction f(3, 2, ExtVal(Rat(4)));
  TableOracle oracle(f);
  REQUIRE(get_minimum_minimizer(oracle) == KVector(3, 2));
  REQUIRE(oracle.minimize_calls() <= 4);  // n + 1
}

TEST_CASE("minimum minimizer of a unique-minimizer function") {
  TableFunction f(3, 2, ExtVal(Rat(5)));
  KVector target({2, 0, 1}, 2);
  f.set(target, ExtVal(Rat(1)));
  TableOracle oracle(f);
  REQUIRE(get_minimum_minimizer(oracle) == target);
}

TEST_CASE("minimum minimizer equals the brute-force minimum") {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 60; ++round) {
    TableFunction f = rng() % 3 == 0 ? random_ksubmodular_table_rejection(rng, 1 + (int)(rng() % 3))
                                     : random_ksubmodular_table(rng, 4, 3);
    TableOracle oracle(f);
    KVector got = get_minimum_minimizer(oracle);
    auto mins = brute_minimizer_set(f);
    KVector expect = mins.front();
    for (const auto& x : mins) expect = sq_meet(expect, x);
    REQUIRE(got == expect);
    REQUIRE(oracle.minimize_calls() <= f.n() + 1);
  }
}

TEST_CASE("join-irreducible minimizers: trivial cases") {
  // unique minimizer at the origin: no irreducibles
  TableFunction f(2, 2, ExtVal(Rat(2)));
  f.set(KVector(2, 2), ExtVal(Rat(0)));
  TableOracle oracle(f);
  auto scan = get_join_irreducible_minimizers(oracle);
  REQUIRE(scan.minimum == KVector(2, 2));
  REQUIRE(scan.irreducibles.empty());
}

TEST_CASE("join-irreducible minimizers of the running example table") {
  // distance table whose argmin is exactly the 11 listed elements of S_3^5
  std::vector<std::vector<int>> pts = {
      {0, 0, 0, 0, 2}, {1, 3, 0, 0, 2}, {0, 0, 0, 1, 2}, {1, 3, 1, 0, 2},
      {1, 3, 0, 1, 2}, {1, 3, 2, 0, 2}, {0, 0, 3, 1, 2}, {1, 3, 1, 1, 2},
      {1, 3, 2, 1, 2}, {1, 3, 3, 1, 2}, {2, 2, 3, 1, 2}};
  std::vector<KVector> m;
  for (auto& p : pts) m.push_back(KVector(p, 3));
  TableFunction f = distance_to_set_table(m);
  REQUIRE_FALSE(is_k_submodular(f).has_value());
  {
    auto mins = brute_minimizer_set(f);
    std::set<KVector> got(mins.begin(), mins.end());
    REQUIRE(got == std::set<KVector>(m.begin(), m.end()));
  }
  TableOracle oracle(f);
  auto scan = get_join_irreducible_minimizers(oracle);
  std::vector<KVector> expected = {KVector({0, 0, 0, 1, 2}, 3), KVector({0, 0, 3, 1, 2}, 3),
                                   KVector({1, 3, 0, 0, 2}, 3), KVector({1, 3, 1, 0, 2}, 3),
                                   KVector({1, 3, 2, 0, 2}, 3), KVector({2, 2, 3, 1, 2}, 3)};
  std::sort(expected.begin(), expected.end());
  std::vector<KVector> got = scan.irreducibles;
  std::sort(got.begin(), got.end());
  REQUIRE(got == expected);
}

TEST_CASE("oracle route equals the direct construction") {
  std::mt19937_64 rng(9);
  for (int round = 0; round < 80; ++round) REQUIRE(selfcheck::oracle_route(rng));
}

TEST_CASE("oracle build report invariants") {
  std::mt19937_64 rng(15);
  for (int round = 0; round < 30; ++round) {
    TableFunction f = random_ksubmodular_table(rng, 4, 3);
    TableOracle oracle(f);
    auto rep = build_pip_via_oracle(oracle);
    REQUIRE(rep.pip.check_elementary().ok);
    REQUIRE((int)rep.irreducibles.size() <= f.k() * f.n());
    long long loose = (f.n() + 1) + (1LL * f.k() * f.n() + 1) * (f.n() + 1) + f.n() + 1;
    REQUIRE(rep.oracle_calls <= loose);
    REQUIRE(rep.oracle_calls <= 3LL * f.k() * f.n() * f.n());
    // rebuilding from brute force gives the same canonical pip
    auto direct = pip_from_closed_set(brute_minimizer_set(f));
    REQUIRE(rep.pip.canonical() == direct.pip.canonical());
    REQUIRE(rep.min_value == f.min_value());
  }
}

TEST_CASE("differentials recovered by the scan match the definition") {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 30; ++round) {
    TableFunction f = random_ksubmodular_table(rng, 4, 2);
    TableOracle oracle(f);
    auto scan = get_join_irreducible_minimizers(oracle);
    auto m = brute_minimizer_set(f);
    for (size_t i = 0; i < scan.irreducibles.size(); ++i)
      REQUIRE(scan.differentials[i] == differential(scan.irreducibles[i], m));
  }
}

namespace {

// Same table, opposite tie-breaking: returns the highest-index minimizer.
class HighTieOracle : public MinimizingOracle {
 public:
  explicit HighTieOracle(TableFunction f) : f_(std::move(f)) {}
  int n() const override { return f_.n(); }
  int k() const override { return f_.k(); }
  ExtVal evaluate(const KVector& x) override { return f_(x); }
  KVector minimize(const Fixing& fix) override {
    ++calls_;
    std::vector<long long> pow(f_.n(), 1);
    for (int j = 1; j < f_.n(); ++j) pow[j] = pow[j - 1] * (f_.k() + 1);
    ExtVal best = ExtVal::infinity();
    long long best_idx = -1;
    for (long long i = f_.size() - 1; i >= 0; --i) {
      bool ok = true;
      for (int j = 0; j < f_.n() && ok; ++j)
        if (fix[j] >= 0 && (i / pow[j]) % (f_.k() + 1) != fix[j]) ok = false;
      if (!ok) continue;
      if (best_idx < 0 || f_.at(i) < best) {
        best = f_.at(i);
        best_idx = i;
      }
    }
    if (best_idx < 0) throw domain_error("fixing admits no point");
    return KVector::from_index(best_idx, f_.n(), f_.k());
  }

 private:
  TableFunction f_;
};

}  // namespace

TEST_CASE("the build is independent of the oracle's tie breaking") {
  std::mt19937_64 rng(25);
  for (int round = 0; round < 40; ++round) {
    TableFunction f = random_ksubmodular_table(rng, 4, 3);
    TableOracle low(f);
    HighTieOracle high(f);
    auto rep_low = build_pip_via_oracle(low);
    auto rep_high = build_pip_via_oracle(high);
    REQUIRE(rep_low.pip.canonical() == rep_high.pip.canonical());
    REQUIRE(rep_low.minimum_minimizer == rep_high.minimum_minimizer);
    std::vector<KVector> a = rep_low.irreducibles, b = rep_high.irreducibles;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    REQUIRE(a == b);
  }
}
