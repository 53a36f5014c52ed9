#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kpip/kvector.hpp"
#include "kpip/pip.hpp"

namespace kpip {

inline KVector closed_set_minimum(const std::vector<KVector>& m) {
  if (m.empty()) throw domain_error("empty set has no minimum");
  KVector acc = m.front();
  for (const auto& x : m) acc = sq_meet(acc, x);
  return acc;
}

inline std::vector<KVector> lower_covers(const KVector& x, const std::vector<KVector>& m) {
  std::vector<KVector> below;
  for (const auto& y : m)
    if (y != x && partial_leq(y, x)) below.push_back(y);
  std::vector<KVector> covers;
  for (const auto& y : below) {
    bool maximal = true;
    for (const auto& z : below)
      if (z != y && partial_leq(y, z)) maximal = false;
    if (maximal) covers.push_back(y);
  }
  return covers;
}

// Elements of a (meet,join)-closed set that are not the minimum and have a
// unique lower cover; equivalently not a join of strictly smaller elements.
inline std::vector<KVector> join_irreducibles(const std::vector<KVector>& m) {
  KVector bottom = closed_set_minimum(m);
  std::vector<KVector> irr;
  for (const auto& x : m) {
    if (x == bottom) continue;
    if (lower_covers(x, m).size() == 1) irr.push_back(x);
  }
  std::sort(irr.begin(), irr.end());
  return irr;
}

// Componentwise difference pattern between a join-irreducible element and its
// unique lower cover. Coordinates frozen across the whole set come out zero.
inline KVector differential(const KVector& x, const std::vector<KVector>& m) {
  auto covers = lower_covers(x, m);
  if (covers.size() != 1) throw domain_error("differential requires a join-irreducible element");
  const KVector& y = covers.front();
  KVector d(x.n(), x.k());
  for (int i = 0; i < x.n(); ++i) {
    if (x[i] == y[i]) continue;
    if (y[i] != 0) throw domain_error("cover relation broken: lower cover not dominated");
    d.set(i, x[i]);
  }
  return d;
}

struct Normalization {
  std::vector<KVector> normalized;         // image set in S_kt^nt
  std::vector<std::vector<int>> classes;   // contracted index classes, ordered by min index
  std::vector<std::vector<KVector>> reps;  // per class: irreducibles x^{j,1..k_j}
  int n_tilde = 0;
  int k_tilde = 1;

  KVector map(const KVector& x) const {
    KVector out(n_tilde, k_tilde);
    for (int j = 0; j < n_tilde; ++j) {
      bool zero = true;
      for (int i : classes[j])
        if (x[i] != 0) zero = false;
      if (zero) continue;
      int found = 0;
      for (int a = 0; a < (int)reps[j].size(); ++a) {
        bool match = true;
        for (int i : classes[j])
          if (x[i] != reps[j][a][i]) match = false;
        if (match) {
          out.set(j, a + 1);
          found = 1;
          break;
        }
      }
      if (!found) throw domain_error("point does not factor through the contraction classes");
    }
    return out;
  }
};

// Contracts differential-support classes so every differential becomes a
// singleton; the image is order- and inconsistency-isomorphic to the input.
inline Normalization normalize(const std::vector<KVector>& m) {
  KVector bottom = closed_set_minimum(m);
  if (!bottom.is_zero()) throw domain_error("normalize requires a simple closed set");
  Normalization nz;
  auto irr = join_irreducibles(m);
  std::map<std::vector<int>, std::vector<KVector>> by_support;
  for (const auto& x : irr) by_support[differential(x, m).support()].push_back(x);
  for (auto& [supp, xs] : by_support) {
    // rank representatives by their values on the class coordinates, so an
    // already-normalized set maps onto itself
    const auto& cls = supp;
    std::sort(xs.begin(), xs.end(), [&](const KVector& a, const KVector& b) {
      for (int i : cls)
        if (a[i] != b[i]) return a[i] < b[i];
      return false;
    });
    nz.classes.push_back(supp);
    nz.reps.push_back(xs);
  }
  // deterministic class order by smallest member index
  std::vector<int> idx(nz.classes.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = (int)i;
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return nz.classes[a].front() < nz.classes[b].front(); });
  std::vector<std::vector<int>> cls;
  std::vector<std::vector<KVector>> reps;
  for (int i : idx) {
    cls.push_back(nz.classes[i]);
    reps.push_back(nz.reps[i]);
  }
  nz.classes = cls;
  nz.reps = reps;
  nz.n_tilde = (int)nz.classes.size();
  nz.k_tilde = 1;
  for (const auto& r : nz.reps) nz.k_tilde = std::max(nz.k_tilde, (int)r.size());
  std::set<KVector> out;
  for (const auto& x : m) out.insert(nz.map(x));
  nz.normalized.assign(out.begin(), out.end());
  if (nz.normalized.size() != m.size())
    throw domain_error("contraction collapsed distinct elements");  // cannot happen on closed sets
  return nz;
}

inline std::vector<long long> payload_of(const KVector& x) {
  std::vector<long long> p(x.labels().begin(), x.labels().end());
  return p;
}

struct ClosedSetPip {
  Pip pip;
  std::vector<KVector> irreducibles;  // payload order matches pip elements
  KVector minimum;
};

// Birkhoff-type representation: elements are the join-irreducibles ordered by
// the restriction of the product order; minimal inconsistent pairs are the
// pairs within one differential-support class; parts follow those classes.
inline ClosedSetPip pip_from_closed_set(const std::vector<KVector>& m) {
  if (!is_closed_set(m)) throw domain_error("input is not (meet,join)-closed");
  ClosedSetPip out;
  out.minimum = closed_set_minimum(m);
  out.irreducibles = join_irreducibles(m);
  const auto& irr = out.irreducibles;
  Pip p((int)irr.size());
  std::map<std::vector<int>, int> class_of_support;
  for (size_t e = 0; e < irr.size(); ++e) {
    p.set_payload((int)e, payload_of(irr[e]));
    auto supp = differential(irr[e], m).support();
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
  if (!p.finalize()) throw domain_error("order restriction is cyclic");
  out.pip = std::move(p);
  return out;
}

// Joins the payload vectors of an ideal; the empty ideal maps to `bottom`.
inline KVector join_of_ideal(const Pip& p, const std::vector<bool>& ideal, const KVector& bottom) {
  KVector acc = bottom;
  for (int e = 0; e < p.size(); ++e) {
    if (!ideal[e]) continue;
    std::vector<int> labels(p.payload(e).begin(), p.payload(e).end());
    acc = sq_join(acc, KVector(labels, bottom.k()));
  }
  return acc;
}

// Realizes an elementary PIP as a closed set on S_k^n, n = number of parts,
// k = largest part. Element ranks within a part follow element order.
inline std::vector<KVector> closed_set_from_pip(const Pip& p) {
  auto ec = p.check_elementary();
  if (!ec.ok) throw domain_error("closed_set_from_pip needs an elementary PIP: " + ec.violation);
  int np = 0;
  for (int e = 0; e < p.size(); ++e) np = std::max(np, ec.parts[e] + 1);
  std::vector<std::vector<int>> members(np);
  for (int e = 0; e < p.size(); ++e) members[ec.parts[e]].push_back(e);
  int k = 1;
  for (const auto& mem : members) k = std::max(k, (int)mem.size());
  std::vector<int> rank(p.size(), 0);
  for (const auto& mem : members)
    for (size_t a = 0; a < mem.size(); ++a) rank[mem[a]] = (int)a + 1;
  std::vector<KVector> out;
  p.for_each_consistent_ideal([&](const std::vector<bool>& ideal) {
    KVector x(np, k);
    for (int e = 0; e < p.size(); ++e)
      if (ideal[e]) x.set(ec.parts[e], rank[e]);
    out.push_back(x);
    return true;
  });
  std::sort(out.begin(), out.end());
  if (!is_closed_set(out)) throw domain_error("consistent ideals did not yield a closed set");
  return out;
}

}  // namespace kpip
