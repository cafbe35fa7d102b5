// basisnet: non-blockingness verification of bounded Petri nets on a
// conflict-increase basis reachability graph.
//
//   basisnet verify <net> [--partition auto|<file>] [--explicit t1,t2] [--report out.json]
//   basisnet brg    <net> [--dot out.dot] [--json out.json]
//   basisnet bench  <net> [--scale p1=1,2 ...] [--k 4,7] [--oracle on|off]
//   basisnet rg     <net>
//
// Exit codes: 0 non-blocking, 1 blocking, 2 error.

#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "basisnet/basisnet.hpp"

namespace {

using namespace basisnet;

constexpr int kNonblocking = 0;
constexpr int kBlocking = 1;
constexpr int kError = 2;

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw error("cannot write '" + path + "'");
  f << text;
}

TransitionSet transition_list(const PetriNet& net, const std::string& csv) {
  TransitionSet out;
  for (const auto& id : detail::split(csv, ','))
    if (!id.empty()) out.push_back(net.transition(id));
  detail::normalize(out);
  return out;
}

std::string marking_text(const PetriNet& net, const Marking& m) {
  std::string s;
  for (index_t p = 0; p < net.num_places(); ++p) {
    if (!m[p]) continue;
    if (!s.empty()) s += " + ";
    if (m[p] != 1) s += std::to_string(m[p]);
    s += net.place_name(p);
  }
  return s.empty() ? "0" : s;
}

struct VerifyOptions {
  std::string file;
  std::string partition = "auto";
  std::string explicit_list;
  std::string report;
  std::string caps;
  bool no_timings = false;
};

int run_verify(const VerifyOptions& o) {
  Caps caps = parse_caps(o.caps, caps_from_env());
  NetFile nf = load_net(o.file);
  const Plant& plant = nf.plant;
  TransitionSet forced = nf.forced_explicit;
  auto extra = transition_list(plant.net, o.explicit_list);
  forced.insert(forced.end(), extra.begin(), extra.end());
  detail::normalize(forced);

  std::optional<BasisPartition> pi;
  if (o.partition != "auto")
    pi = make_partition(plant.net, plant.final, parse_partition(plant.net, read_file(o.partition)));
  VerifyResult r = verify_plant(plant, pi, caps, forced);

  const auto& v = r.verdict;
  // Keep stdout clean for the JSON when the report goes there.
  std::ostream& out = o.report == "-" ? std::cerr : std::cout;
  out << "T_E = {";
  for (std::size_t i = 0; i < r.partition.explicit_set.size(); ++i)
    out << (i ? ", " : "") << plant.net.transition_name(r.partition.explicit_set[i]);
  out << "}\n";
  out << "basis markings: " << v.stats.states << ", edges: " << v.stats.edges
      << ", final basis: " << v.stats.final_basis << ", dead ends: " << v.dead_end_states.size() << "\n";
  if (v.nonblocking) {
    out << "G is non-blocking\n";
  } else {
    out << "G is blocking; witness M_b" << *v.blocking_witness << " = "
        << marking_text(plant.net, r.brg.states[*v.blocking_witness]) << "\n";
  }
  if (!o.report.empty()) write_file(o.report, make_report(plant, r, !o.no_timings).dump(2) + "\n");
  return v.nonblocking ? kNonblocking : kBlocking;
}

struct BrgOptions {
  std::string file;
  std::string explicit_list;
  std::string dot;
  std::string json_out;
  std::string caps;
};

int run_brg(const BrgOptions& o) {
  Caps caps = parse_caps(o.caps, caps_from_env());
  NetFile nf = load_net(o.file);
  const Plant& plant = nf.plant;
  TransitionSet forced = nf.forced_explicit;
  auto extra = transition_list(plant.net, o.explicit_list);
  forced.insert(forced.end(), extra.begin(), extra.end());
  auto pi = derive_ci_partition(plant.net, plant.final, forced);
  CiBrg g = build_brg(plant, pi, caps);
  std::cout << "basis markings: " << g.num_states() << ", edges: " << g.num_edges() << "\n";
  if (!o.dot.empty()) {
    DotAnnotations marks;
    marks.final.assign(g.num_states(), false);
    marks.final_reach.assign(g.num_states(), false);
    marks.dead.assign(g.num_states(), false);
    for (std::size_t s = 0; s < g.num_states(); ++s) marks.final[s] = is_final(plant.final, g.states[s]);
    for (std::size_t s : final_basis_set(g, plant, caps)) marks.final_reach[s] = true;
    for (std::size_t s : dead_basis_markings(g)) marks.dead[s] = true;
    write_file(o.dot, export_dot(plant.net, g, marks));
  }
  if (!o.json_out.empty()) write_file(o.json_out, brg_to_json(plant.net, g).dump(1) + "\n");
  return 0;
}

struct BenchOptions {
  std::string file;
  std::vector<std::string> scales;
  std::string ks;
  std::string oracle = "off";
  std::string json_out;
  std::string caps;
};

int run_bench(const BenchOptions& o) {
  Caps caps = parse_caps(o.caps, caps_from_env());
  NetFile nf = load_net(o.file);

  // Each axis is (name, values); rows are the cartesian product.
  std::vector<std::pair<std::string, std::vector<token_t>>> axes;
  for (const auto& s : o.scales) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw error("--scale expects place=v1,v2,...");
    std::vector<token_t> values;
    for (const auto& v : detail::split(s.substr(eq + 1), ',')) values.push_back(detail::parse_int(v, 0, "scale value"));
    axes.emplace_back(s.substr(0, eq), values);
  }
  if (!o.ks.empty()) {
    std::vector<token_t> values;
    for (const auto& v : detail::split(o.ks, ',')) values.push_back(detail::parse_int(v, 0, "k"));
    axes.emplace_back("k", values);
  }
  const bool with_oracle = o.oracle == "on";

  std::vector<std::size_t> pos(axes.size(), 0);
  json rows = json::array();
  bool any_error = false;
  std::cout << std::left;
  for (const auto& [name, vals] : axes) std::cout << std::setw(8) << name;
  std::cout << std::setw(10) << "|R|" << std::setw(10) << "t_R(s)" << std::setw(10) << "|M_B|"
            << std::setw(10) << "t_B(s)" << std::setw(14) << "non-blocking" << "|M_B|/|R|\n";
  for (;;) {
    json row;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      row[axes[a].first] = axes[a].second[pos[a]];
      std::cout << std::setw(8) << axes[a].second[pos[a]];
    }
    try {
      std::vector<token_t> m0 = nf.plant.m0.tokens();
      FinalSpec final = nf.plant.final;
      for (std::size_t a = 0; a < axes.size(); ++a) {
        const auto& [name, vals] = axes[a];
        if (name == "k") {
          for (auto& g : final.gmecs) g.k = vals[pos[a]];
        } else {
          auto p = nf.plant.net.find_place(name);
          if (!p) throw error("unknown place '" + name + "'");
          m0[*p] = vals[pos[a]];
        }
      }
      Plant plant(nf.plant.net, Marking(m0), final);
      VerifyResult r;
      double t_brg = detail::timed([&] { r = verify_plant(plant, std::nullopt, caps, nf.forced_explicit); });
      row["basis_markings"] = r.brg.num_states();
      row["brg_seconds"] = t_brg;
      row["nonblocking"] = r.verdict.nonblocking;
      std::string rs = "-", trs = "-", ratio = "-";
      if (with_oracle) {
        oracle::ReachGraph rg;
        double t_rg = 0;
        bool built = true;
        try {
          t_rg = detail::timed([&] { rg = oracle::build_rg(plant, caps.rg_states); });
        } catch (const cap_exceeded& e) {
          // The BRG result stands; only the comparison is unavailable.
          built = false;
          row["oracle_error"] = e.what();
          rs = trs = ratio = "cap";
        }
        if (built) {
          auto rv = oracle::rg_nonblocking(rg, plant.final);
          row["reachable"] = rg.states.size();
          row["rg_seconds"] = t_rg;
          row["oracle_agrees"] = rv.nonblocking == r.verdict.nonblocking;
          rs = std::to_string(rg.states.size());
          std::ostringstream a, b;
          a << std::fixed << std::setprecision(2) << t_rg;
          b << std::fixed << std::setprecision(1)
            << 100.0 * double(r.brg.num_states()) / double(rg.states.size()) << "%";
          trs = a.str();
          ratio = b.str();
        }
      }
      std::ostringstream tb;
      tb << std::fixed << std::setprecision(2) << t_brg;
      std::cout << std::setw(10) << rs << std::setw(10) << trs << std::setw(10) << r.brg.num_states()
                << std::setw(10) << tb.str() << std::setw(14) << (r.verdict.nonblocking ? "Yes" : "No")
                << ratio << "\n";
    } catch (const std::exception& e) {
      any_error = true;
      row["error"] = e.what();
      std::cout << "error: " << e.what() << "\n";
    }
    rows.push_back(row);

    std::size_t a = 0;
    for (; a < axes.size(); ++a) {
      if (++pos[a] < axes[a].second.size()) break;
      pos[a] = 0;
    }
    if (a == axes.size()) break;
  }
  if (!o.json_out.empty()) write_file(o.json_out, rows.dump(2) + "\n");
  return any_error ? kError : 0;
}

int run_rg(const std::string& file, const std::string& caps_text) {
  Caps caps = parse_caps(caps_text, caps_from_env());
  NetFile nf = load_net(file);
  auto rg = oracle::build_rg(nf.plant, caps.rg_states);
  auto v = oracle::rg_nonblocking(rg, nf.plant.final);
  std::cout << "reachable markings: " << rg.states.size() << ", edges: " << rg.edges.size()
            << ", dead: " << rg.dead.size() << "\n";
  if (v.nonblocking) {
    std::cout << "G is non-blocking\n";
    return kNonblocking;
  }
  std::cout << "G is blocking; witness " << marking_text(nf.plant.net, rg.states[*v.witness]) << "\n";
  return kBlocking;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-blockingness verification of bounded Petri nets"};
  app.require_subcommand(1);

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "decide non-blockingness on a CI-BRG");
  verify->add_option("file", vo.file, "net file")->required();
  verify->add_option("--partition", vo.partition, "auto, or a file of 'explicit' lines giving T_E");
  verify->add_option("--explicit", vo.explicit_list, "extra transitions forced into T_E");
  verify->add_option("--report", vo.report, "write the JSON report here ('-' for stdout)");
  verify->add_option("--caps", vo.caps, "caps, e.g. states=1e6,saturation=1e6");
  verify->add_flag("--no-timings", vo.no_timings, "omit wall-clock timings from the report");

  BrgOptions bo;
  auto* brg = app.add_subcommand("brg", "build the CI-BRG only");
  brg->add_option("file", bo.file, "net file")->required();
  brg->add_option("--explicit", bo.explicit_list, "extra transitions forced into T_E");
  brg->add_option("--dot", bo.dot, "write Graphviz DOT here");
  brg->add_option("--json", bo.json_out, "write a JSON dump here");
  brg->add_option("--caps", bo.caps, "caps");

  BenchOptions be;
  auto* bench = app.add_subcommand("bench", "scaling runs over initial tokens and k");
  bench->add_option("file", be.file, "net file")->required();
  bench->add_option("--scale", be.scales, "place=v1,v2,... (repeatable)");
  bench->add_option("--k", be.ks, "GMEC bounds k1,k2,...");
  bench->add_option("--oracle", be.oracle, "also build the reachability graph")
      ->check(CLI::IsMember({"on", "off"}));
  bench->add_option("--json", be.json_out, "write rows as JSON here");
  bench->add_option("--caps", be.caps, "caps");

  std::string rg_file, rg_caps;
  auto* rg = app.add_subcommand("rg", "exhaustive reachability graph and direct blocking check");
  rg->add_option("file", rg_file, "net file")->required();
  rg->add_option("--caps", rg_caps, "caps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kError;
  }

  try {
    if (*verify) return run_verify(vo);
    if (*brg) return run_brg(bo);
    if (*bench) return run_bench(be);
    if (*rg) return run_rg(rg_file, rg_caps);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
