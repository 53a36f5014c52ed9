// kpip: minimizer-set PIPs for k-submodular functions.
//
// Subcommands: check, build-pip, enumerate, stereo, export, selftest.
// Exit codes: 0 ok, 2 usage/parse error, 3 validation failure, 4 internal
// assertion failure.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kpip/birkhoff.hpp"
#include "kpip/enumerate.hpp"
#include "kpip/io_json.hpp"
#include "kpip/labeling.hpp"
#include "kpip/multiflow.hpp"
#include "kpip/netrep.hpp"
#include "kpip/oracle_builder.hpp"
#include "kpip/potts.hpp"
#include "kpip/selftest.hpp"

namespace {

int log_level() {
  const char* v = std::getenv("KPIP_LOG");
  return v ? std::atoi(v) : 0;
}

void log_line(const std::string& s) {
  if (log_level() > 0) std::cerr << "[kpip] " << s << "\n";
}

kpip::json pct_json(const kpip::Rat& r) {
  if (r.is_integer()) return r.num();
  return r.str();
}

kpip::PottsInstance potts_from_json(const kpip::json& j) {
  using namespace kpip;
  int n = j.at("n").get<int>();
  int k = j.at("k").get<int>();
  std::vector<PottsInstance::Edge> edges;
  for (const auto& e : j.at("edges")) {
    Rat lam = e.at("lambda").is_string() ? Rat::parse(e.at("lambda").get<std::string>())
                                         : Rat(e.at("lambda").get<long long>());
    edges.push_back({e.at("u").get<int>(), e.at("v").get<int>(), lam});
  }
  auto parse_tables = [&](const json& arr, int width) {
    std::vector<std::vector<Rat>> tabs;
    for (const auto& row : arr) {
      std::vector<Rat> t;
      for (const auto& v : row)
        t.push_back(v.is_string() ? Rat::parse(v.get<std::string>()) : Rat(v.get<long long>()));
      if ((int)t.size() != width) throw domain_error("unary table has wrong width");
      tabs.push_back(std::move(t));
    }
    return tabs;
  };
  if (j.contains("unary")) {
    PottsInstance inst;
    inst.n = n;
    inst.k = k;
    inst.edges = edges;
    inst.unary = parse_tables(j.at("unary"), k + 1);
    inst.check();
    return inst;
  }
  auto raw = parse_tables(j.at("unary_raw"), k);
  std::string mode = j.contains("relaxation") ? j.at("relaxation").get<std::string>() : "average";
  kpip::Relaxation rel =
      mode == "kovtun" ? kpip::Relaxation::kKovtun : kpip::Relaxation::kAverage;
  return relax_potts(n, k, edges, raw, rel);
}

kpip::Pip pip_for_input(const kpip::json& j, const std::string& oracle_path,
                        const std::string& network_path, const std::string& potts_path,
                        bool locking, int jobs, kpip::json& extra) {
  using namespace kpip;
  if (!oracle_path.empty()) {
    TableFunction f = table_from_json(j);
    if (auto bad = is_k_submodular(f)) {
      throw domain_error("table is not k-submodular; violating pair x=" + bad->x.str() +
                         " y=" + bad->y.str());
    }
    TableOracle oracle(f);
    auto rep = build_pip_via_oracle(oracle);
    extra["oracle_calls"] = rep.oracle_calls;
    extra["min_value"] = value_to_json(rep.min_value);
    extra["minimum_minimizer"] = rep.minimum_minimizer.labels();
    return rep.pip.canonical();
  }
  if (!network_path.empty()) {
    GroupedNetwork gn = grouped_from_json(j);
    auto np = pip_from_network(gn);
    extra["min_cut"] = np.min_cut_value;
    extra["minimum_minimizer"] = np.minimum_minimizer.labels();
    // relabel with minimizer payloads so all routes emit identical canonical PIPs
    Pip p = np.pip;
    for (int e = 0; e < p.size(); ++e) {
      std::vector<bool> ideal(p.size(), false);
      for (int d = 0; d < p.size(); ++d)
        if (p.leq(d, e)) ideal[d] = true;
      std::vector<int> cut = np.sigma.base;
      for (int d = 0; d < p.size(); ++d)
        if (ideal[d]) cut.insert(cut.end(), np.sigma.elems[d].begin(), np.sigma.elems[d].end());
      std::sort(cut.begin(), cut.end());
      auto x = psi_inverse(gn, cut);
      if (!x) throw domain_error("network violates NR1/NR2");
      p.set_payload(e, payload_of(*x));
    }
    return p.canonical();
  }
  PottsInstance inst = potts_from_json(j);
  PottsBuild build = build_pip_potts(inst, jobs);
  if (locking) {
    Multiflow mf = locking_multiflow(build.network);
    auto layers = sigma_from_locking(build.network, mf);
    GluedPip glued = glue_pip(layers);
    extra["locking_terminal_values"] = [&] {
      json arr = json::array();
      for (int a = 1; a <= inst.k; ++a) arr.push_back(layers[a - 1].cut_value);
      return arr;
    }();
    build.glued = glued;
  }
  extra["min_value2"] = build.min_value2;
  extra["scale"] = build.network.scale;
  extra["minimum_minimizer"] = build.minimum_minimizer.labels();
  // relabel with minimizer payloads, as above
  Pip p = build.glued.pip;
  for (int e = 0; e < p.size(); ++e) {
    std::vector<bool> ideal(p.size(), false);
    for (int d = 0; d < p.size(); ++d)
      if (p.leq(d, e)) ideal[d] = true;
    p.set_payload(e, payload_of(build.glued.minimizer_of(build.network, ideal)));
  }
  return p.canonical();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PIP representations for minimizers of k-submodular functions"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned long long seed = 12345;
  int jobs = 1;
  app.add_option("--seed", seed, "seed for randomized subcommands");
  app.add_option("--jobs", jobs, "worker threads for parallel suites");

  std::string in_path, out_path, left_path, right_path;

  auto* check = app.add_subcommand("check", "check a table function for k-submodularity");
  check->add_option("table", in_path, "table json")->required();

  auto* build = app.add_subcommand("build-pip", "build the minimizer-set PIP");
  std::string oracle_path, network_path, potts_path;
  bool locking = false;
  build->add_option("--oracle", oracle_path, "table json, solved by the brute-force oracle");
  build->add_option("--network", network_path, "grouped network json");
  build->add_option("--potts", potts_path, "potts instance json");
  build->add_flag("--locking", locking, "use the locking-multiflow route for potts inputs");
  build->add_option("-o,--output", out_path, "write the PIP json here");

  auto* enumer = app.add_subcommand("enumerate", "enumerate minimizers of a PIP or potts input");
  bool en_all = false, en_max = false, en_count = false;
  std::string en_input;
  enumer->add_flag("--all", en_all, "all minimizers");
  enumer->add_flag("--maximal", en_max, "maximal minimizers only");
  enumer->add_flag("--count", en_count, "count maximal minimizers (factored)");
  enumer->add_option("input", en_input, "pip json or potts json")->required();

  auto* stereo = app.add_subcommand("stereo", "persistency report for a stereo pair");
  int st_k = 4;
  std::string lambda_str = "1";
  std::string relaxation = "average";
  bool no_round = false, synthetic = false;
  int syn_w = 32, syn_h = 24;
  stereo->add_option("--left", left_path, "left image (ppm/pgm)");
  stereo->add_option("--right", right_path, "right image (ppm/pgm)");
  stereo->add_flag("--synthetic", synthetic, "use a generated pair instead of files");
  stereo->add_option("--width", syn_w, "synthetic pair width");
  stereo->add_option("--height", syn_h, "synthetic pair height");
  stereo->add_option("--k", st_k, "number of disparity labels");
  stereo->add_option("--lambda", lambda_str, "smoothness weight");
  stereo->add_option("--relaxation", relaxation, "average | kovtun");
  stereo->add_flag("--no-round", no_round, "keep rational SSD costs");
  stereo->add_option("-o,--output", out_path, "write the label map ppm here");

  auto* expo = app.add_subcommand("export", "export a PIP as graphviz dot");
  bool dot = false;
  expo->add_flag("--dot", dot, "dot format");
  expo->add_option("input", in_path, "pip json")->required();
  expo->add_option("-o,--output", out_path, "output path");

  auto* self = app.add_subcommand("selftest", "run the randomized cross-check harness");
  int self_rounds = 25;
  self->add_option("--rounds", self_rounds, "instances per cross-check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  using namespace kpip;
  try {
    if (check->parsed()) {
      TableFunction f = table_from_json(load_json_file(in_path));
      auto bad = is_k_submodular(f);
      json out;
      out["k_submodular"] = !bad.has_value();
      if (bad) {
        out["violating_pair"] = json::array({bad->x.labels(), bad->y.labels()});
        std::cout << out.dump(2) << "\n";
        return 3;
      }
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (build->parsed()) {
      int sources = !oracle_path.empty() + !network_path.empty() + !potts_path.empty();
      if (sources != 1) {
        std::cerr << "build-pip needs exactly one of --oracle/--network/--potts\n";
        return 2;
      }
      std::string path = !oracle_path.empty() ? oracle_path
                         : !network_path.empty() ? network_path
                                                 : potts_path;
      json extra;
      Pip p = pip_for_input(load_json_file(path), oracle_path, network_path, potts_path, locking,
                            jobs, extra);
      json out = pip_to_json(p);
      out["report"] = extra;
      std::string text = out.dump(2) + "\n";
      if (out_path.empty())
        std::cout << text;
      else
        save_text_file(out_path, text);
      return 0;
    }
    if (enumer->parsed()) {
      if (en_all + en_max + en_count != 1) {
        std::cerr << "enumerate needs exactly one of --all/--maximal/--count\n";
        return 2;
      }
      json j = load_json_file(en_input);
      if (j.contains("elements")) {
        Pip p = pip_from_json(j);
        if (auto bad = p.validate()) throw domain_error("invalid pip: " + *bad);
        KVector bottom(0, 1);
        bool payloads = true;
        for (int e = 0; e < p.size() && payloads; ++e) payloads = !p.payload(e).empty();
        if (en_count) {
          long long cnt = 0;
          for_each_maximal_consistent_ideal(p, [&](const std::vector<bool>&) {
            ++cnt;
            return true;
          });
          std::cout << cnt << "\n";
          return 0;
        }
        auto emit = [&](const std::vector<bool>& ideal) {
          json arr = json::array();
          for (int e = 0; e < p.size(); ++e)
            if (ideal[e]) arr.push_back(e);
          std::cout << arr.dump() << "\n";
          return true;
        };
        if (en_all)
          p.for_each_consistent_ideal(emit);
        else
          for_each_maximal_consistent_ideal(p, emit);
        return 0;
      }
      PottsInstance inst = potts_from_json(j);
      PottsBuild pb = build_pip_potts(inst);
      RPoset r = build_r_poset(pb.glued.layers);
      if (en_count) {
        FactoredCount fc = count_maximal_minimizers(r);
        json out;
        out["count"] = fc.total.str();
        out["factored"] = fc.str();
        std::cout << out.dump(2) << "\n";
        return 0;
      }
      if (en_max) {
        for_each_maximal_minimizer(r, inst.n, inst.k, [&](const KVector& x) {
          std::cout << json(x.labels()).dump() << "\n";
          return true;
        });
        return 0;
      }
      pb.glued.pip.for_each_consistent_ideal([&](const std::vector<bool>& ideal) {
        std::cout << json(pb.glued.minimizer_of(pb.network, ideal).labels()).dump() << "\n";
        return true;
      });
      return 0;
    }
    if (stereo->parsed()) {
      Image left, right;
      if (synthetic) {
        auto pair = synthetic_stereo_pair(syn_w, syn_h, st_k, seed);
        left = pair.first;
        right = pair.second;
      } else {
        if (left_path.empty() || right_path.empty()) {
          std::cerr << "stereo needs --left and --right (or --synthetic)\n";
          return 2;
        }
        left = load_pnm(left_path);
        right = load_pnm(right_path);
      }
      log_line("images loaded: " + std::to_string(left.width) + "x" +
               std::to_string(left.height));
      auto raw = ssd_data_term(left, right, st_k, 9, !no_round);
      Rat lambda = Rat::parse(lambda_str);
      kpip::Relaxation rel =
          relaxation == "kovtun" ? Relaxation::kKovtun : Relaxation::kAverage;
      PottsInstance inst =
          relax_potts(left.width * left.height, st_k, grid8_edges(left.width, left.height, lambda),
                      raw, rel);
      LabelReport rep = persistent_report(inst, jobs);
      json out;
      out["gray_pct"] = pct_json(rep.gray_pct());
      out["red_pct"] = pct_json(rep.red_pct());
      out["blue_pct"] = pct_json(rep.blue_pct());
      out["max_count"] = rep.maximal_count.total.str();
      out["max_count_factored"] = rep.maximal_count.str();
      std::cout << out.dump(2) << "\n";
      if (!out_path.empty())
        save_pnm(label_map_image(left.width, left.height, st_k, rep), out_path);
      return 0;
    }
    if (expo->parsed()) {
      if (!dot) {
        std::cerr << "export currently supports --dot only\n";
        return 2;
      }
      Pip p = pip_from_json(load_json_file(in_path));
      std::string text = pip_to_dot(p);
      if (out_path.empty())
        std::cout << text;
      else
        save_text_file(out_path, text);
      return 0;
    }
    if (self->parsed()) {
      bool ok = kpip::selftest(seed, self_rounds, jobs, std::cout);
      return ok ? 0 : 3;
    }
  } catch (const kpip::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
