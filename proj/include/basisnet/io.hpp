#pragma once

// Text net format, JSON reports and JSON BRG dumps.
//
// Net files are line oriented; '#' starts a comment.
//
//   place <id> [tokens=<n>]
//   trans <id>
//   arc <place> -> <trans> [w=<n>]        input arc (Pre)
//   arc <trans> -> <place> [w=<n>]        output arc (Post)
//   gmec <k> : <c>*<place> [+ <c>*<place> ...]
//   final and|or
//   explicit <id>[,<id>...]               force transitions into T_E
//
// Declarations may appear in any order; every identifier must be declared
// exactly once.

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "basisnet/verify.hpp"
#include "json.hpp"

namespace basisnet {

class parse_error : public error {
 public:
  parse_error(std::size_t line, const std::string& msg)
      : error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct NetFile {
  Plant plant;
  TransitionSet forced_explicit;
};

namespace detail {

inline std::string trim(std::string s) {
  const char* ws = " \t\r\n";
  s.erase(0, s.find_first_not_of(ws));
  auto end = s.find_last_not_of(ws);
  s.erase(end == std::string::npos ? 0 : end + 1);
  return s;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

inline token_t parse_int(const std::string& s, std::size_t line, const std::string& what) {
  if (s.empty()) throw parse_error(line, "missing " + what);
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw parse_error(line, "invalid " + what + " '" + s + "'");
  }
  if (used != s.size()) throw parse_error(line, "invalid " + what + " '" + s + "'");
  return v;
}

inline bool valid_id(const std::string& id) {
  if (id.empty()) return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.' || c == '\'';
  });
}

}  // namespace detail

inline NetFile parse_net(const std::string& text) {
  struct Arc {
    std::string from, to;
    token_t w;
    std::size_t line;
  };
  struct GmecLine {
    token_t k;
    std::vector<std::pair<token_t, std::string>> terms;
    std::size_t line;
  };
  std::vector<std::pair<std::string, token_t>> places;
  std::vector<std::string> transitions;
  std::vector<Arc> arcs;
  std::vector<GmecLine> gmecs;
  std::optional<Combinator> combinator;
  std::vector<std::pair<std::string, std::size_t>> forced;
  std::unordered_map<std::string, std::size_t> declared;

  auto declare = [&](const std::string& id, std::size_t line) {
    if (!detail::valid_id(id)) throw parse_error(line, "invalid identifier '" + id + "'");
    if (!declared.emplace(id, line).second)
      throw parse_error(line, "duplicate definition of '" + id + "'");
  };

  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = detail::trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    std::istringstream words(line);
    std::string kw;
    words >> kw;
    std::vector<std::string> rest;
    for (std::string w; words >> w;) rest.push_back(w);

    if (kw == "place") {
      if (rest.empty() || rest.size() > 2) throw parse_error(lineno, "expected: place <id> [tokens=<n>]");
      token_t tokens = 0;
      if (rest.size() == 2) {
        if (rest[1].rfind("tokens=", 0) != 0) throw parse_error(lineno, "expected tokens=<n>");
        tokens = detail::parse_int(rest[1].substr(7), lineno, "token count");
        if (tokens < 0) throw parse_error(lineno, "negative token count");
      }
      declare(rest[0], lineno);
      places.emplace_back(rest[0], tokens);
    } else if (kw == "trans") {
      if (rest.size() != 1) throw parse_error(lineno, "expected: trans <id>");
      declare(rest[0], lineno);
      transitions.push_back(rest[0]);
    } else if (kw == "arc") {
      if ((rest.size() != 3 && rest.size() != 4) || rest[1] != "->")
        throw parse_error(lineno, "expected: arc <from> -> <to> [w=<n>]");
      token_t w = 1;
      if (rest.size() == 4) {
        if (rest[3].rfind("w=", 0) != 0) throw parse_error(lineno, "expected w=<n>");
        w = detail::parse_int(rest[3].substr(2), lineno, "arc weight");
        if (w <= 0) throw parse_error(lineno, "arc weight must be positive");
      }
      arcs.push_back({rest[0], rest[2], w, lineno});
    } else if (kw == "gmec") {
      auto colon = line.find(':');
      if (colon == std::string::npos) throw parse_error(lineno, "expected: gmec <k> : <c>*<place> + ...");
      GmecLine g{detail::parse_int(detail::trim(line.substr(4, colon - 4)), lineno, "GMEC bound"), {}, lineno};
      std::string expr;
      for (char c : line.substr(colon + 1))
        if (!std::isspace(static_cast<unsigned char>(c))) expr += c;
      if (expr.empty()) throw parse_error(lineno, "empty GMEC");
      // Split into signed terms.
      std::size_t i = 0;
      while (i < expr.size()) {
        token_t sign = 1;
        if (expr[i] == '+' || expr[i] == '-') {
          if (expr[i] == '-') sign = -1;
          ++i;
        } else if (i != 0) {
          throw parse_error(lineno, "malformed GMEC expression");
        }
        auto j = expr.find_first_of("+-", i);
        std::string term = expr.substr(i, j == std::string::npos ? std::string::npos : j - i);
        if (term.empty()) throw parse_error(lineno, "malformed GMEC expression");
        token_t c = 1;
        std::string id = term;
        if (auto star = term.find('*'); star != std::string::npos) {
          c = detail::parse_int(term.substr(0, star), lineno, "GMEC coefficient");
          id = term.substr(star + 1);
        }
        g.terms.emplace_back(sign * c, id);
        i = j == std::string::npos ? expr.size() : j;
      }
      gmecs.push_back(std::move(g));
    } else if (kw == "final") {
      if (rest.size() != 1 || (rest[0] != "and" && rest[0] != "or"))
        throw parse_error(lineno, "expected: final and|or");
      if (combinator) throw parse_error(lineno, "duplicate final directive");
      combinator = rest[0] == "and" ? Combinator::all_of : Combinator::any_of;
    } else if (kw == "explicit") {
      std::string ids;
      for (const auto& w : rest) ids += w;
      for (const auto& id : detail::split(ids, ','))
        if (!id.empty()) forced.emplace_back(id, lineno);
    } else {
      throw parse_error(lineno, "unknown directive '" + kw + "'");
    }
  }

  std::vector<std::string> pnames;
  std::vector<token_t> m0;
  for (auto& [id, tok] : places) {
    pnames.push_back(id);
    m0.push_back(tok);
  }
  std::unordered_map<std::string, index_t> pidx, tidx;
  for (index_t i = 0; i < pnames.size(); ++i) pidx[pnames[i]] = i;
  for (index_t i = 0; i < transitions.size(); ++i) tidx[transitions[i]] = i;

  PetriNet::Matrix pre(pnames.size(), std::vector<token_t>(transitions.size(), 0));
  PetriNet::Matrix post = pre;
  for (const auto& a : arcs) {
    auto pf = pidx.find(a.from), tt = tidx.find(a.to);
    auto tf = tidx.find(a.from), pt = pidx.find(a.to);
    token_t* slot = nullptr;
    if (pf != pidx.end() && tt != tidx.end()) {
      slot = &pre[pf->second][tt->second];
    } else if (tf != tidx.end() && pt != pidx.end()) {
      slot = &post[pt->second][tf->second];
    } else {
      for (const auto& id : {a.from, a.to})
        if (!pidx.count(id) && !tidx.count(id)) throw parse_error(a.line, "unknown identifier '" + id + "'");
      throw parse_error(a.line, "arc must connect a place and a transition");
    }
    if (*slot != 0) throw parse_error(a.line, "duplicate arc " + a.from + " -> " + a.to);
    *slot = a.w;
  }

  FinalSpec final;
  if (gmecs.empty()) throw parse_error(0, "no gmec defined");
  for (const auto& g : gmecs) {
    Gmec out{std::vector<token_t>(pnames.size(), 0), g.k};
    for (const auto& [c, id] : g.terms) {
      auto it = pidx.find(id);
      if (it == pidx.end()) throw parse_error(g.line, "unknown place '" + id + "'");
      out.w[it->second] += c;
    }
    final.gmecs.push_back(std::move(out));
  }
  final.combinator = combinator.value_or(gmecs.size() == 1 ? Combinator::single : Combinator::all_of);

  NetFile nf;
  nf.plant = Plant(PetriNet(pnames, transitions, std::move(pre), std::move(post)),
                   Marking(std::move(m0)), std::move(final));
  for (const auto& [id, line] : forced) {
    auto it = tidx.find(id);
    if (it == tidx.end()) throw parse_error(line, "unknown transition '" + id + "'");
    nf.forced_explicit.push_back(it->second);
  }
  detail::normalize(nf.forced_explicit);
  return nf;
}

inline NetFile load_net(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_net(ss.str());
}

inline std::string serialize_net(const NetFile& nf) {
  const PetriNet& net = nf.plant.net;
  std::ostringstream out;
  for (index_t p = 0; p < net.num_places(); ++p) {
    out << "place " << net.place_name(p);
    if (nf.plant.m0[p]) out << " tokens=" << nf.plant.m0[p];
    out << "\n";
  }
  for (index_t t = 0; t < net.num_transitions(); ++t) out << "trans " << net.transition_name(t) << "\n";
  for (index_t t = 0; t < net.num_transitions(); ++t) {
    for (index_t p = 0; p < net.num_places(); ++p)
      if (net.pre(p, t)) {
        out << "arc " << net.place_name(p) << " -> " << net.transition_name(t);
        if (net.pre(p, t) != 1) out << " w=" << net.pre(p, t);
        out << "\n";
      }
    for (index_t p = 0; p < net.num_places(); ++p)
      if (net.post(p, t)) {
        out << "arc " << net.transition_name(t) << " -> " << net.place_name(p);
        if (net.post(p, t) != 1) out << " w=" << net.post(p, t);
        out << "\n";
      }
  }
  for (const auto& g : nf.plant.final.gmecs) {
    out << "gmec " << g.k << " :";
    bool first = true;
    for (index_t p = 0; p < g.w.size(); ++p) {
      if (!g.w[p]) continue;
      if (first) out << " " << g.w[p];
      else out << (g.w[p] < 0 ? " - " : " + ") << (g.w[p] < 0 ? -g.w[p] : g.w[p]);
      out << "*" << net.place_name(p);
      first = false;
    }
    if (first) out << " 0*" << net.place_name(0);
    out << "\n";
  }
  if (nf.plant.final.combinator == Combinator::all_of) out << "final and\n";
  if (nf.plant.final.combinator == Combinator::any_of) out << "final or\n";
  if (!nf.forced_explicit.empty()) {
    out << "explicit ";
    for (std::size_t i = 0; i < nf.forced_explicit.size(); ++i)
      out << (i ? "," : "") << net.transition_name(nf.forced_explicit[i]);
    out << "\n";
  }
  return out.str();
}

/// Reads `explicit` lines from a partition file and returns the exact T_E.
inline TransitionSet parse_partition(const PetriNet& net, const std::string& text) {
  TransitionSet out;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = detail::trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.rfind("explicit", 0) != 0) throw parse_error(lineno, "expected: explicit <id>[,<id>...]");
    std::string ids;
    for (char c : line.substr(8))
      if (!std::isspace(static_cast<unsigned char>(c))) ids += c;
    for (const auto& id : detail::split(ids, ',')) {
      if (id.empty()) continue;
      auto t = net.find_transition(id);
      if (!t) throw parse_error(lineno, "unknown transition '" + id + "'");
      out.push_back(*t);
    }
  }
  detail::normalize(out);
  return out;
}

// ---------------------------------------------------------------------------
// JSON

using json = nlohmann::ordered_json;

inline json names_json(const PetriNet& net, const TransitionSet& ts) {
  json a = json::array();
  for (index_t t : ts) a.push_back(net.transition_name(t));
  return a;
}

/// Verification report. Schema:
///   {verdict, partition:{explicit[],implicit[]},
///    brg:{states, edges, final_basis, dead_ends[]}, witness?, timings{}}
inline json make_report(const Plant& plant, const VerifyResult& r, bool with_timings = true) {
  const auto& v = r.verdict;
  json j;
  j["verdict"] = v.nonblocking ? "nonblocking" : "blocking";
  j["partition"] = {{"explicit", names_json(plant.net, r.partition.explicit_set)},
                    {"implicit", names_json(plant.net, r.partition.implicit)}};
  json dead = json::array();
  for (std::size_t s : v.dead_end_states)
    dead.push_back({{"state", s}, {"marking", r.brg.states[s].tokens()}});
  j["brg"] = {{"states", v.stats.states},
              {"edges", v.stats.edges},
              {"final_basis", v.stats.final_basis},
              {"dead_ends", dead}};
  if (v.blocking_witness)
    j["witness"] = {{"state", *v.blocking_witness},
                    {"marking", r.brg.states[*v.blocking_witness].tokens()}};
  if (with_timings)
    j["timings"] = {{"partition", v.stats.partition_seconds},
                    {"build", v.stats.build_seconds},
                    {"final_basis", v.stats.final_seconds},
                    {"coreachability", v.stats.coreach_seconds}};
  else
    j["timings"] = json::object();
  return j;
}

inline json brg_to_json(const PetriNet& net, const CiBrg& g) {
  json j;
  j["places"] = net.places();
  j["transitions"] = net.transitions();
  j["partition"] = {{"explicit", names_json(net, g.partition.explicit_set)},
                    {"implicit", names_json(net, g.partition.implicit)}};
  json states = json::array();
  for (const auto& m : g.states) states.push_back(m.tokens());
  j["states"] = states;
  json edges = json::array();
  for (const auto& e : g.edges)
    edges.push_back({{"source", e.source},
                     {"transition", net.transition_name(e.event.transition)},
                     {"y", e.event.explanation},
                     {"target", e.target}});
  j["edges"] = edges;
  return j;
}

inline CiBrg brg_from_json(const PetriNet& net, const FinalSpec& final, const json& j) {
  if (j.at("places").get<std::vector<std::string>>() != net.places() ||
      j.at("transitions").get<std::vector<std::string>>() != net.transitions())
    throw error("BRG dump does not belong to this net");
  TransitionSet explicit_set;
  for (const auto& id : j.at("partition").at("explicit")) explicit_set.push_back(net.transition(id.get<std::string>()));
  CiBrg g;
  g.partition = make_partition(net, final, explicit_set);
  for (const auto& s : j.at("states")) {
    Marking m(s.get<std::vector<token_t>>());
    net.check_marking(m);
    g.states.push_back(std::move(m));
  }
  for (const auto& e : j.at("edges"))
    g.edges.push_back({e.at("source").get<std::size_t>(),
                       {net.transition(e.at("transition").get<std::string>()),
                        e.at("y").get<ImplicitVector>()},
                       e.at("target").get<std::size_t>()});
  index_edges(g);
  return g;
}

/// Caps from a "key=value,..." string (keys: states, rg, saturation,
/// explanation, reach). Unknown keys are an error.
inline Caps parse_caps(const std::string& spec, Caps caps = {}) {
  for (const auto& item : detail::split(spec, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw error("cap '" + item + "' must be key=value");
    std::string key = detail::trim(item.substr(0, eq));
    double value = 0;
    try {
      value = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw error("cap '" + item + "' has a non-numeric value");
    }
    if (value < 1) throw error("cap '" + item + "' must be positive");
    auto v = static_cast<std::size_t>(value);
    if (key == "states") caps.brg_states = v;
    else if (key == "rg") caps.rg_states = v;
    else if (key == "saturation") caps.saturation = v;
    else if (key == "explanation") caps.explanation = v;
    else if (key == "reach") caps.implicit_reach = v;
    else throw error("unknown cap '" + key + "'");
  }
  return caps;
}

inline Caps caps_from_env(Caps caps = {}) {
  if (const char* env = std::getenv("BASISNET_CAPS")) return parse_caps(env, caps);
  return caps;
}

}  // namespace basisnet
