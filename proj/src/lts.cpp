#include "ccss/lts.hpp"

#include <cstdlib>
#include <deque>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "ccss/error.hpp"
#include "ccss/parser.hpp"

namespace ccss {

std::optional<std::size_t> Lts::find(Term t) const {
  if (auto it = index_.find(t); it != index_.end()) return it->second;
  return std::nullopt;
}

std::size_t Lts::addState(Term t, SignalSet signals) {
  const std::size_t id = states.size();
  states.push_back(t);
  stateSignals.push_back(std::move(signals));
  outgoing.emplace_back();
  index_.emplace(t, id);
  return id;
}

void Lts::addTransition(LtsTransition t) {
  outgoing.at(t.from).push_back(transitions.size());
  transitions.push_back(std::move(t));
}

std::size_t defaultMaxStates() {
  if (const char* v = std::getenv("CCSS_MAX_STATES")) {
    char* end = nullptr;
    unsigned long long n = std::strtoull(v, &end, 10);
    if (end != v && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
  }
  return 1'000'000;
}

Term Canonicalizer::operator()(Term t) {
  if (auto it = memo_.find(t); it != memo_.end()) return it->second;
  Term out = t;
  switch (t.kind()) {
    case TermKind::Ident: {
      Term cur = t;
      Term body = env_.resolve(cur.name());
      std::unordered_set<Term> seen{cur};
      while (body.kind() == TermKind::Ident && seen.insert(body).second) {
        cur = body;
        body = env_.resolve(cur.name());
      }
      out = hasStaticPar(body) ? (*this)(body) : cur;
      break;
    }
    case TermKind::Par: out = par((*this)(t.left()), (*this)(t.right())); break;
    case TermKind::Restrict:
      out = restrict((*this)(t.body()), {t.restriction().begin(), t.restriction().end()});
      break;
    case TermKind::Relabel: out = relabel((*this)(t.body()), t.relabelling()); break;
    case TermKind::Signal: out = signalling((*this)(t.body()), t.name()); break;
    default: break;
  }
  memo_.emplace(t, out);
  return out;
}

Lts explore(const Environment& env, Term root, ExploreOptions options) {
  const std::size_t maxStates = options.maxStates ? options.maxStates : defaultMaxStates();
  SosEngine sos(env);
  Canonicalizer canon(env);
  Lts lts;
  Term init = canon(root);
  lts.initial = lts.addState(init, sos.signals(init));
  std::vector<std::size_t> depth{0};
  for (std::size_t s = 0; s < lts.states.size(); ++s) {
    const auto& ds = sos.transitions(lts.states[s]);
    if (depth[s] >= options.maxDepth) {
      if (!ds.empty()) lts.truncated = true;
      continue;
    }
    for (const auto& d : ds) {
      Term target = canon(d.target);
      std::optional<std::size_t> to = lts.find(target);
      if (!to) {
        if (lts.states.size() >= maxStates) {
          lts.truncated = true;
          continue;
        }
        to = lts.addState(target, sos.signals(target));
        depth.push_back(depth[s] + 1);
      }
      lts.addTransition({s, d.label, *to, d.participants, d.signalPartner});
    }
  }
  return lts;
}

namespace {

std::string dotEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string exportDot(const Lts& lts) {
  std::ostringstream os;
  os << "digraph lts {\n";
  for (std::size_t i = 0; i < lts.states.size(); ++i) {
    os << "  s" << i << " [label=\"" << i << ": " << dotEscape(print(lts.states[i])) << '"';
    if (!lts.stateSignals[i].empty()) {
      os << ", xlabel=\"" << dotEscape(toString(lts.stateSignals[i])) << '"';
    }
    if (i == lts.initial) os << ", peripheries=2";
    os << "];\n";
  }
  for (const auto& t : lts.transitions) {
    os << "  s" << t.from << " -> s" << t.to << " [label=\"" << dotEscape(t.label.str()) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

std::string exportJson(const Lts& lts) {
  using json = nlohmann::ordered_json;
  json states = json::array();
  for (std::size_t i = 0; i < lts.states.size(); ++i) {
    json sigs = json::array();
    for (Name s : lts.stateSignals[i]) sigs.push_back(s.str());
    states.push_back({{"id", i}, {"term", print(lts.states[i])}, {"signals", sigs}});
  }
  json trans = json::array();
  for (const auto& t : lts.transitions) {
    json parts = json::array();
    for (const auto& p : t.participants) parts.push_back(toString(p));
    json j = {{"from", t.from}, {"label", t.label.str()}, {"to", t.to}, {"participants", parts}};
    if (t.signalPartner) j["signalPartner"] = toString(*t.signalPartner);
    trans.push_back(std::move(j));
  }
  json doc = {{"initial", lts.initial},
              {"truncated", lts.truncated},
              {"states", states},
              {"transitions", trans}};
  return doc.dump(2) + "\n";
}

Lts importJson(std::string_view text, const Environment& env) {
  using json = nlohmann::json;
  Lts lts;
  try {
    json doc = json::parse(text);
    for (const auto& s : doc.at("states")) {
      if (s.at("id").get<std::size_t>() != lts.states.size()) throw Error("state ids must be 0..n-1 in order");
      SignalSet sigs;
      for (const auto& n : s.at("signals")) sigs.insert(parseGroundName(n.get<std::string>()));
      lts.addState(parseTerm(s.at("term").get<std::string>(), env), std::move(sigs));
    }
    lts.initial = doc.value("initial", std::size_t{0});
    lts.truncated = doc.value("truncated", false);
    for (const auto& t : doc.at("transitions")) {
      LtsTransition tr;
      tr.from = t.at("from").get<std::size_t>();
      tr.to = t.at("to").get<std::size_t>();
      if (tr.from >= lts.states.size() || tr.to >= lts.states.size()) {
        throw Error("transition refers to an unknown state");
      }
      const std::string label = t.at("label").get<std::string>();
      if (label == "tau") {
        tr.label = Action::tau();
      } else if (!label.empty() && label[0] == '\'') {
        tr.label = Action::coname(parseGroundName(label.substr(1)));
      } else {
        Name n = parseGroundName(label);
        tr.label = env.isSignal(n.base()) ? Action::signal(n) : Action::handshake(n);
      }
      for (const auto& p : t.at("participants")) tr.participants.push_back(parsePath(p.get<std::string>()));
      if (t.contains("signalPartner")) tr.signalPartner = parsePath(t["signalPartner"].get<std::string>());
      lts.addTransition(std::move(tr));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed LTS JSON: ") + e.what());
  }
  return lts;
}

}  // namespace ccss
