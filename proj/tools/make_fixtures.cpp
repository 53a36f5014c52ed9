// Regenerates the grouped-network fixture corpus under data/networks/.
// Each fixture is a network json plus the table it represents; the test
// suites re-verify the pair before using it.

#include <filesystem>
#include <iostream>

#include "kpip/io_json.hpp"
#include "kpip/selftest.hpp"

using namespace kpip;

namespace {

json grouped_to_json(const GroupedNetwork& gn) {
  json j = network_to_json(gn.net);
  json groups;
  for (size_t i = 0; i < gn.groups.size(); ++i) {
    json names = json::array();
    for (int v : gn.groups[i]) names.push_back(gn.net.names[v]);
    groups[std::to_string(i + 1)] = names;
  }
  j["groups"] = groups;
  j["K"] = gn.offset.is_integer() ? json(gn.offset.num()) : json(gn.offset.str());
  return j;
}

void write_fixture(const std::string& dir, int index, const GroupedNetwork& gn,
                   const TableFunction& table) {
  auto check = verify_representation(gn, table);
  if (!check.ok) throw domain_error("fixture " + std::to_string(index) + ": " + check.reason);
  char name[64];
  std::snprintf(name, sizeof(name), "grouped_%02d", index);
  save_text_file(dir + "/" + name + ".json", grouped_to_json(gn).dump(2) + "\n");
  save_text_file(dir + "/" + name + "_table.json", table_to_json(table).dump(2) + "\n");
  std::cout << name << ": n=" << gn.n() << " k=" << gn.k() << " arcs=" << gn.net.arcs.size()
            << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "data/networks";
  std::filesystem::create_directories(dir);
  int index = 1;

  // a single variable with two tied labels
  {
    GroupedNetwork gn;
    gn.net.s = gn.net.add_vertex("s");
    gn.net.t = gn.net.add_vertex("t");
    gn.groups = {{gn.net.add_vertex("v1_1"), gn.net.add_vertex("v1_2")}};
    gn.net.add_arc(gn.net.s, gn.groups[0][0], 1);
    gn.net.add_arc(gn.net.s, gn.groups[0][1], 1);
    gn.net.add_arc(gn.groups[0][0], gn.net.t, 1);
    gn.net.add_arc(gn.groups[0][1], gn.net.t, 1);
    TableFunction f(1, 2, ExtVal(Rat(2)));
    write_fixture(dir, index++, gn, f);
  }
  // a unique minimizer with a nonzero offset
  {
    GroupedNetwork gn;
    gn.net.s = gn.net.add_vertex("s");
    gn.net.t = gn.net.add_vertex("t");
    gn.groups = {{gn.net.add_vertex("v1_1"), gn.net.add_vertex("v1_2")}};
    gn.net.add_arc(gn.net.s, gn.groups[0][0], 3);
    gn.net.add_arc(gn.net.s, gn.groups[0][1], 1);
    gn.net.add_arc(gn.groups[0][1], gn.net.t, 4);
    gn.offset = Rat(5);
    TableFunction f(1, 2);
    f.set(KVector({0}, 2), ExtVal(Rat(9)));
    f.set(KVector({1}, 2), ExtVal(Rat(6)));
    f.set(KVector({2}, 2), ExtVal(Rat(12)));
    write_fixture(dir, index++, gn, f);
  }
  // an arcless network representing a constant
  {
    GroupedNetwork gn;
    gn.net.s = gn.net.add_vertex("s");
    gn.net.t = gn.net.add_vertex("t");
    gn.groups = {{gn.net.add_vertex("v1_1"), gn.net.add_vertex("v1_2"),
                  gn.net.add_vertex("v1_3")}};
    gn.offset = Rat(7);
    TableFunction f(1, 3, ExtVal(Rat(7)));
    write_fixture(dir, index++, gn, f);
  }
  // seeded gadget combinations across sizes
  const std::pair<int, int> sizes[] = {{2, 2}, {2, 3}, {3, 2}, {2, 2}, {3, 3},
                                       {3, 2}, {2, 3}, {4, 2}, {3, 3}};
  unsigned long long seed = 20240;
  for (auto [n, k] : sizes) {
    std::mt19937_64 rng(seed++);
    GadgetNetwork g = random_gadget_network(rng, n, k);
    write_fixture(dir, index++, g.gn, g.table);
  }
  std::cout << "wrote " << index - 1 << " fixtures to " << dir << "\n";
  return 0;
}
