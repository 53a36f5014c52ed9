#pragma once

#include <map>
#include <vector>

#include "kpip/birkhoff.hpp"
#include "kpip/kvector.hpp"
#include "kpip/pip.hpp"

namespace kpip {

// Minimum minimizer among the points consistent with `fix`: zero out every
// free coordinate whose zeroing keeps the restricted minimum. The checks are
// independent because the restricted minimizer set is (meet,join)-closed.
inline KVector get_minimum_minimizer(MinimizingOracle& f, Fixing fix) {
  KVector x = f.minimize(fix);
  ExtVal fmin = f.evaluate(x);
  for (int i = 0; i < f.n(); ++i) {
    if (x[i] == 0 || fix[i] >= 0) continue;
    Fixing sub = fix;
    sub[i] = 0;
    KVector y = f.minimize(sub);
    if (f.evaluate(y) == fmin) x.set(i, 0);
  }
  return x;
}

inline KVector get_minimum_minimizer(MinimizingOracle& f) {
  return get_minimum_minimizer(f, Fixing(f.n(), -1));
}

struct IrreducibleScan {
  KVector minimum;                 // minimum minimizer of f
  ExtVal min_value = ExtVal(0);
  std::vector<KVector> irreducibles;
  std::vector<KVector> differentials;  // aligned with irreducibles
};

// Collects all join-irreducible minimizers by probing every fixing (i, alpha)
// outside the support of the minimum minimizer. The accepted probes also
// reveal each differential: irreducible z gets z_bar[i] = alpha exactly for
// the probes that returned z.
inline IrreducibleScan get_join_irreducible_minimizers(MinimizingOracle& f) {
  IrreducibleScan scan;
  scan.minimum = get_minimum_minimizer(f);
  scan.min_value = f.evaluate(scan.minimum);
  Fixing base(f.n(), -1);
  for (int i = 0; i < f.n(); ++i)
    if (scan.minimum[i] != 0) base[i] = scan.minimum[i];
  std::map<KVector, KVector> diff;  // irreducible -> assembled differential
  for (int i = 0; i < f.n(); ++i) {
    if (scan.minimum[i] != 0) continue;
    for (int alpha = 1; alpha <= f.k(); ++alpha) {
      Fixing fx = base;
      fx[i] = alpha;
      KVector probe = f.minimize(fx);
      if (f.evaluate(probe) != scan.min_value) continue;
      KVector z = get_minimum_minimizer(f, fx);
      auto it = diff.find(z);
      if (it == diff.end()) it = diff.emplace(z, KVector(f.n(), f.k())).first;
      it->second.set(i, alpha);
    }
  }
  for (auto& [z, d] : diff) {
    scan.irreducibles.push_back(z);
    scan.differentials.push_back(d);
  }
  return scan;
}

struct OracleBuildReport {
  Pip pip;
  KVector minimum_minimizer;
  ExtVal min_value = ExtVal(0);
  long long oracle_calls = 0;
  std::vector<KVector> irreducibles;
};

// Builds the elementary PIP of the minimizer set straight from the scan:
// order by the product order, minimal inconsistent pairs within each
// differential-support class, parts equal to those classes.
inline OracleBuildReport build_pip_via_oracle(MinimizingOracle& f) {
  f.reset_calls();
  OracleBuildReport rep;
  IrreducibleScan scan = get_join_irreducible_minimizers(f);
  rep.minimum_minimizer = scan.minimum;
  rep.min_value = scan.min_value;
  rep.irreducibles = scan.irreducibles;

  const auto& irr = scan.irreducibles;
  Pip p((int)irr.size());
  std::map<std::vector<int>, int> class_of_support;
  for (size_t e = 0; e < irr.size(); ++e) {
    p.set_payload((int)e, payload_of(irr[e]));
    auto supp = scan.differentials[e].support();
    auto it = class_of_support.find(supp);
    if (it == class_of_support.end())
      it = class_of_support.emplace(supp, (int)class_of_support.size()).first;
    p.set_part((int)e, it->second);
  }
  for (size_t a = 0; a < irr.size(); ++a)
    for (size_t b = 0; b < irr.size(); ++b)
      if (a != b && partial_leq(irr[a], irr[b])) p.add_order((int)a, (int)b);
  for (size_t a = 0; a < irr.size(); ++a)
    for (size_t b = a + 1; b < irr.size(); ++b)
      if (p.part((int)a) == p.part((int)b)) p.add_min_inconsistent((int)a, (int)b);
  if (!p.finalize()) throw domain_error("oracle scan produced a cyclic order");
  rep.pip = std::move(p);
  rep.oracle_calls = f.minimize_calls();
  return rep;
}

}  // namespace kpip
