#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "kpip/flownet.hpp"
#include "kpip/kvector.hpp"
#include "kpip/netrep.hpp"
#include "kpip/pip.hpp"

namespace kpip {

using json = nlohmann::json;

inline json value_to_json(const ExtVal& v) {
  if (v.is_inf()) return "inf";
  if (v.finite().is_integer()) return v.finite().num();
  return v.finite().str();
}

inline ExtVal value_from_json(const json& j) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return ExtVal::infinity();
    return ExtVal(Rat::parse(s));
  }
  if (j.is_number_integer()) return ExtVal(Rat(j.get<long long>()));
  throw domain_error("values must be integers, \"p/q\" strings or \"inf\"");
}

// { "n":, "k":, "default":, "entries":[ {"x":[...], "value":...} ] }
inline TableFunction table_from_json(const json& j) {
  int n = j.at("n").get<int>();
  int k = j.at("k").get<int>();
  ExtVal fill = j.contains("default") ? value_from_json(j.at("default")) : ExtVal(Rat(0));
  TableFunction f(n, k, fill);
  if (j.contains("entries"))
    for (const auto& e : j.at("entries")) {
      std::vector<int> labels = e.at("x").get<std::vector<int>>();
      f.set(KVector(labels, k), value_from_json(e.at("value")));
    }
  return f;
}

inline json table_to_json(const TableFunction& f) {
  json entries = json::array();
  for (long long i = 0; i < f.size(); ++i) {
    json e;
    e["x"] = KVector::from_index(i, f.n(), f.k()).labels();
    e["value"] = value_to_json(f.at(i));
    entries.push_back(e);
  }
  return json{{"n", f.n()}, {"k", f.k()}, {"default", 0}, {"entries", entries}};
}

// { "vertices":[names], "s":name, "t":name, "arcs":[{"from","to","cap"}] }
inline FlowNetwork network_from_json(const json& j) {
  FlowNetwork net;
  std::map<std::string, int> idx;
  for (const auto& v : j.at("vertices")) {
    std::string name = v.get<std::string>();
    if (idx.count(name)) throw domain_error("duplicate vertex name");
    idx[name] = net.add_vertex(name);
  }
  net.s = idx.at(j.at("s").get<std::string>());
  net.t = idx.at(j.at("t").get<std::string>());
  for (const auto& a : j.at("arcs"))
    net.add_arc(idx.at(a.at("from").get<std::string>()), idx.at(a.at("to").get<std::string>()),
                a.at("cap").get<long long>());
  return net;
}

inline json network_to_json(const FlowNetwork& net) {
  json arcs = json::array();
  for (const auto& a : net.arcs)
    arcs.push_back(json{{"from", net.names[a.from]}, {"to", net.names[a.to]}, {"cap", a.cap}});
  return json{{"vertices", net.names}, {"s", net.names[net.s]}, {"t", net.names[net.t]}, {"arcs", arcs}};
}

// network JSON + { "groups": {"1":[names], ...}, "K": number }
inline GroupedNetwork grouped_from_json(const json& j) {
  GroupedNetwork gn;
  gn.net = network_from_json(j);
  std::map<std::string, int> idx;
  for (int v = 0; v < gn.net.nv; ++v) idx[gn.net.names[v]] = v;
  const auto& groups = j.at("groups");
  gn.groups.resize(groups.size());
  for (auto it = groups.begin(); it != groups.end(); ++it) {
    int i = std::stoi(it.key()) - 1;
    if (i < 0 || i >= (int)gn.groups.size()) throw domain_error("group keys must be 1..n");
    for (const auto& v : it.value()) gn.groups[i].push_back(idx.at(v.get<std::string>()));
  }
  if (j.contains("K")) {
    const auto& kj = j.at("K");
    gn.offset = kj.is_string() ? Rat::parse(kj.get<std::string>()) : Rat(kj.get<long long>());
  }
  gn.check();
  return gn;
}

// { "elements":[{"id","part","payload"}], "covers":[[lo,hi]], "min_inconsistent":[[a,b]] }
inline json pip_to_json(const Pip& p) {
  json elements = json::array();
  for (int e = 0; e < p.size(); ++e) {
    json el;
    el["id"] = e;
    el["part"] = p.part(e);
    if (p.payload(e).empty())
      el["payload"] = nullptr;
    else
      el["payload"] = p.payload(e);
    elements.push_back(el);
  }
  json covers = json::array();
  for (auto [lo, hi] : p.covers()) covers.push_back(json::array({lo, hi}));
  json minc = json::array();
  for (auto [a, b] : p.min_inconsistent()) minc.push_back(json::array({a, b}));
  return json{{"elements", elements}, {"covers", covers}, {"min_inconsistent", minc}};
}

inline Pip pip_from_json(const json& j) {
  const auto& elements = j.at("elements");
  Pip p((int)elements.size());
  for (const auto& el : elements) {
    int id = el.at("id").get<int>();
    if (el.contains("part") && !el.at("part").is_null()) p.set_part(id, el.at("part").get<int>());
    if (el.contains("payload") && !el.at("payload").is_null())
      p.set_payload(id, el.at("payload").get<std::vector<long long>>());
  }
  for (const auto& c : j.at("covers")) p.add_order(c.at(0).get<int>(), c.at(1).get<int>());
  if (j.contains("min_inconsistent"))
    for (const auto& c : j.at("min_inconsistent"))
      p.add_min_inconsistent(c.at(0).get<int>(), c.at(1).get<int>());
  if (!p.finalize()) throw domain_error("pip order is cyclic");
  return p;
}

// Solid arrows from higher elements to lower ones, dashed for minimal
// inconsistent pairs.
inline std::string pip_to_dot(const Pip& p) {
  std::ostringstream os;
  os << "digraph pip {\n";
  for (int e = 0; e < p.size(); ++e) {
    os << "  e" << e << " [label=\"";
    if (p.payload(e).empty())
      os << e;
    else
      for (size_t i = 0; i < p.payload(e).size(); ++i) os << (i ? "," : "") << p.payload(e)[i];
    os << "\"];\n";
  }
  for (auto [lo, hi] : p.covers()) os << "  e" << hi << " -> e" << lo << ";\n";
  for (auto [a, b] : p.min_inconsistent())
    os << "  e" << a << " -> e" << b << " [style=dashed, dir=none];\n";
  os << "}\n";
  return os.str();
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw domain_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

inline void save_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw domain_error("cannot write " + path);
  out << text;
}

}  // namespace kpip
