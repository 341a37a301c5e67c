#include "ccss/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ccss/bisimulation.hpp"
#include "ccss/error.hpp"
#include "ccss/justness.hpp"
#include "ccss/parser.hpp"
#include "ccss/protocols.hpp"
#include "ccss/verifier.hpp"

namespace ccss::cli {

namespace {

struct UsageError : Error {
  using Error::Error;
};

std::string readFile(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::size_t> indexList(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw UsageError("bad transition index '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// "stem;cycle", each a comma-separated list of transition indices.
Lasso parseLasso(const std::string& spec) {
  const auto semi = spec.find(';');
  if (semi == std::string::npos) throw UsageError("lasso must have the form 'stem;cycle'");
  return {indexList(spec.substr(0, semi)), indexList(spec.substr(semi + 1))};
}

struct ModelFlags {
  std::string file;
  std::string model;
  std::string flavor = "ccss";
  int n = 0;
  int ticketBound = 0;
};

void addModelFlags(CLI::App* sub, ModelFlags& f) {
  sub->add_option("--model", f.model, "example1|example2|peterson2|filter|bakery");
  sub->add_option("--flavor", f.flavor, "ccs|ccss");
  sub->add_option("--n", f.n, "number of processes (filter, bakery)");
  sub->add_option("--ticket-bound", f.ticketBound, "largest ticket (bakery)");
}

std::string stem(const std::string& path) {
  auto slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = base.rfind('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

ProtocolModel buildModel(const ModelFlags& f) {
  if (!f.file.empty() && !f.model.empty()) throw UsageError("give either FILE or --model, not both");
  if (!f.file.empty()) return modelFromSource(stem(f.file), readFile(f.file));
  Flavor flavor;
  try {
    flavor = parseFlavor(f.flavor);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (f.model == "example1") return example1();
  if (f.model == "example2") return example2();
  if (f.model == "peterson2") return peterson2(flavor);
  if (f.model == "filter") return filterLock(f.n ? f.n : 3, flavor);
  if (f.model == "bakery") return bakery(f.n ? f.n : 2, f.ticketBound ? f.ticketBound : 4, flavor);
  if (f.model.empty()) throw UsageError("a FILE or --model is required");
  throw UsageError("unknown model '" + f.model + "'");
}

ExploreOptions exploreOptions(std::size_t maxStates) {
  ExploreOptions o;
  o.maxStates = maxStates;
  return o;
}

Lts exploreFile(const std::string& path, std::size_t maxStates, Environment& env) {
  env = loadSpec(readFile(path));
  return explore(env, env.root(), exploreOptions(maxStates));
}

std::string evidenceText(const BisimEvidence& ev) {
  std::string s = "after ";
  if (ev.trace.empty()) s += "no steps";
  for (std::size_t i = 0; i < ev.trace.size(); ++i) s += (i ? " . " : "") + ev.trace[i].str();
  return s + ": " + ev.reason;
}

std::string participantsText(const std::vector<ComponentPath>& ps, const std::optional<ComponentPath>& sig) {
  std::string s;
  for (const auto& p : ps) s += (s.empty() ? "" : ", ") + toString(p);
  if (sig) s += "; signal from " + toString(*sig);
  return s;
}

int stepRepl(const Environment& env, std::istream& in, std::ostream& out) {
  SosEngine sos(env);
  Canonicalizer canon(env);
  std::vector<Term> history{canon(env.root())};
  for (;;) {
    const Term cur = history.back();
    const auto& ds = sos.transitions(cur);
    out << "state: " << print(cur) << "\n";
    out << "signals: " << toString(sos.signals(cur)) << "\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
      out << "  [" << i << "] " << ds[i].label.str() << "  ("
          << participantsText(ds[i].participants, ds[i].signalPartner) << ")\n";
    }
    if (ds.empty()) out << "  (no transitions)\n";
    out << toString(sos.signals(cur)) << "> " << std::flush;
    std::string line;
    if (!std::getline(in, line)) {
      out << "\n";
      return Holds;
    }
    line.erase(0, line.find_first_not_of(" \t"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (line == "quit" || line == "q") return Holds;
    if (line == "undo") {
      if (history.size() > 1) history.pop_back();
      else out << "nothing to undo\n";
      continue;
    }
    if (line == "signals") {
      out << toString(sos.signals(cur)) << "\n";
      continue;
    }
    if (line.empty()) continue;
    std::size_t used = 0;
    std::size_t k = ds.size();
    try {
      k = std::stoul(line, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != line.size() || k >= ds.size()) {
      out << "enter a derivation index, 'undo', 'signals' or 'quit'\n";
      continue;
    }
    history.push_back(canon(ds[k].target));
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Toolkit for CCS with signals: LTS generation, bisimulation, justness and protocol verification",
               "ccss"};
  app.require_subcommand(1);
  std::size_t maxStates = 0;

  std::string parseFile;
  auto* parseCmd = app.add_subcommand("parse", "validate and pretty-print a .ccss file");
  parseCmd->add_option("FILE", parseFile)->required();

  std::string ltsFile;
  bool dot = false, json = false;
  auto* ltsCmd = app.add_subcommand("lts", "explore the reachable transition system");
  ltsCmd->add_option("FILE", ltsFile)->required();
  auto* dotFlag = ltsCmd->add_flag("--dot", dot, "Graphviz output");
  ltsCmd->add_flag("--json", json, "JSON output")->excludes(dotFlag);
  ltsCmd->add_option("--max-states", maxStates, "state limit");

  std::string bisimA, bisimB;
  auto* bisimCmd = app.add_subcommand("bisim", "strong bisimilarity of two systems");
  bisimCmd->add_option("FILE1", bisimA)->required();
  bisimCmd->add_option("FILE2", bisimB)->required();
  bisimCmd->add_option("--max-states", maxStates, "state limit");

  std::string justFile, lassoSpec, rules = "signals";
  auto* justCmd = app.add_subcommand("just", "justness verdict for a lasso of the system's LTS");
  justCmd->add_option("FILE", justFile)->required();
  justCmd->add_option("--lasso", lassoSpec, "stem;cycle transition indices, e.g. '0,3;5,6'")->required();
  justCmd->add_option("--rules", rules, "ccs|signals")->check(CLI::IsMember({"ccs", "signals"}));
  justCmd->add_option("--max-states", maxStates, "state limit");

  ModelFlags verifyFlags;
  bool safety = false, liveness = false;
  std::size_t maxCandidates = LivenessBudget{}.maxCandidates;
  auto* verifyCmd = app.add_subcommand("verify", "check mutual exclusion or starvation freedom");
  verifyCmd->add_option("FILE", verifyFlags.file);
  auto* safetyFlag = verifyCmd->add_flag("--safety", safety);
  verifyCmd->add_flag("--liveness", liveness)->excludes(safetyFlag);
  addModelFlags(verifyCmd, verifyFlags);
  verifyCmd->add_option("--max-states", maxStates, "state limit");
  verifyCmd->add_option("--max-candidates", maxCandidates, "liveness search budget");

  ModelFlags genFlags;
  std::string genOut;
  auto* genCmd = app.add_subcommand("gen", "write a protocol model as .ccss");
  addModelFlags(genCmd, genFlags);
  genCmd->add_option("-o,--output", genOut, "output file (default: stdout)");

  std::string stepFile;
  auto* stepCmd = app.add_subcommand("step", "interactive stepping through derivations");
  stepCmd->add_option("FILE", stepFile)->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? Holds : Usage;
  }

  try {
    if (parseCmd->parsed()) {
      const std::string text = readFile(parseFile);
      const syntax::SpecFile spec = parseSpec(text);
      const Environment env = Environment::fromSpec(spec);
      out << print(spec);
      const ValidationReport rep = validate(env, env.root());
      for (const auto& v : rep.violations) err << "violation: " << v.message << "\n";
      return rep.ok() ? Holds : Violated;
    }
    if (ltsCmd->parsed()) {
      if (!dot && !json) throw UsageError("lts needs --dot or --json");
      Environment env;
      const Lts lts = exploreFile(ltsFile, maxStates, env);
      out << (dot ? exportDot(lts) : exportJson(lts));
      if (lts.truncated) err << "warning: exploration truncated at " << lts.stateCount() << " states\n";
      return lts.truncated ? Unknown : Holds;
    }
    if (bisimCmd->parsed()) {
      Environment ea, eb;
      const Lts a = exploreFile(bisimA, maxStates, ea);
      const Lts b = exploreFile(bisimB, maxStates, eb);
      if (a.truncated || b.truncated) {
        err << "exploration truncated; no verdict\n";
        return Unknown;
      }
      const BisimResult r = strongBisimilar(a, b);
      if (r.bisimilar) {
        out << "bisimilar\n";
        return Holds;
      }
      out << "not bisimilar\n" << evidenceText(*r.evidence) << "\n";
      return Violated;
    }
    if (justCmd->parsed()) {
      Environment env;
      const Lts lts = exploreFile(justFile, maxStates, env);
      const Lasso lasso = parseLasso(lassoSpec);
      const JustnessVerdict v =
          isJust(lts, lasso, env, rules == "ccs" ? JustnessRules::Ccs : JustnessRules::Signals);
      out << toJson(v);
      out << "complete: " << (isComplete(lts, lasso, env) ? "true" : "false") << "\n";
      return v.just ? Holds : Violated;
    }
    if (verifyCmd->parsed()) {
      if (safety == liveness) throw UsageError("verify needs exactly one of --safety, --liveness");
      const ProtocolModel model = buildModel(verifyFlags);
      const Lts lts = explore(model.env, model.root, exploreOptions(maxStates));
      if (safety) {
        const SafetyVerdict v = checkSafety(model, lts);
        out << toJson(v, lts);
        if (!v.holds) return Violated;
        return v.exhaustive ? Holds : Unknown;
      }
      const LivenessVerdict v = checkLiveness(model, lts, LivenessBudget{maxCandidates});
      out << toJson(v, lts);
      switch (v.status) {
        case LivenessStatus::Holds: return Holds;
        case LivenessStatus::Violated: return Violated;
        case LivenessStatus::Unknown: return Unknown;
      }
    }
    if (genCmd->parsed()) {
      const ProtocolModel model = buildModel(genFlags);
      if (genOut.empty()) {
        out << model.source;
      } else {
        std::ofstream f(genOut);
        if (!f) throw UsageError("cannot write " + genOut);
        f << model.source;
      }
      return Holds;
    }
    if (stepCmd->parsed()) return stepRepl(loadSpec(readFile(stepFile)), in, out);
  } catch (const SyntaxError& e) {
    err << "syntax error: " << e.what() << "\n";
    return Usage;
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << "\n";
    return Usage;
  } catch (const ParameterOutOfRange& e) {
    err << "usage: " << e.what() << "\n";
    return Usage;
  } catch (const InvalidLasso& e) {
    err << "usage: " << e.what() << "\n";
    return Usage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return Unknown;
  }
  return Usage;
}

}  // namespace ccss::cli
