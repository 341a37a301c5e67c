#include "ccss/protocols.hpp"

#include <sstream>
#include <unordered_set>

#include "ccss/error.hpp"
#include "ccss/parser.hpp"

namespace ccss {

std::string toString(Flavor f) { return f == Flavor::Ccs ? "ccs" : "ccss"; }

Flavor parseFlavor(const std::string& text) {
  if (text == "ccs") return Flavor::Ccs;
  if (text == "ccss") return Flavor::Ccss;
  throw Error("unknown flavor '" + text + "' (expected ccs or ccss)");
}

namespace {

void collectNoncrit(const Environment& env, Term root, std::set<Name>& out) {
  std::vector<Term> work{root};
  std::unordered_set<Term> seen{root};
  while (!work.empty()) {
    Term t = work.back();
    work.pop_back();
    if (t.kind() == TermKind::Prefix && t.action().kind == ActionKind::Name &&
        t.action().name.base().rfind("noncrit", 0) == 0) {
      out.insert(t.action().name);
    }
    std::vector<Term> next(t.children().begin(), t.children().end());
    if (t.kind() == TermKind::Ident) next.push_back(env.resolve(t.name()));
    for (Term c : next) {
      if (seen.insert(c).second) work.push_back(c);
    }
  }
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) {
    if (!out.empty()) out += ", ";
    out += x;
  }
  return out;
}

// Agents `var_v` for a shared variable over values lo..hi; `var` carries its
// index, e.g. "room[k]".
void variable(std::ostringstream& os, Flavor flavor, const std::string& var, int lo, int hi) {
  os << var << "_v = ";
  std::string writes = "sum w in " + std::to_string(lo) + ".." + std::to_string(hi) +
                       " . assign_" + var + "_w." + var + "_w";
  if (flavor == Flavor::Ccss) {
    os << "(" << writes << ")^noti_" << var << "_v\n";
  } else {
    os << "(" << writes << ") + 'noti_" << var << "_v." << var << "_v\n";
  }
}

}  // namespace

ProtocolModel modelFromSource(std::string family, std::string source) {
  ProtocolModel m;
  m.family = std::move(family);
  m.env = loadSpec(source);
  m.source = std::move(source);
  m.root = m.env.root();
  std::set<Name> noncrit;
  collectNoncrit(m.env, m.root, noncrit);
  for (Name n : noncrit) {
    m.noncrit.push_back(Action::handshake(n));
    m.crit.push_back(Action::handshake(Name("crit" + n.base().substr(7), n.params())));
    m.blocking.insert(Action::handshake(n));
  }
  m.n = static_cast<int>(m.noncrit.size());
  m.flavor = m.env.declaredSignals().empty() ? Flavor::Ccs : Flavor::Ccss;
  return m;
}

ProtocolModel example1() {
  static const char* text = R"(# One shared boolean x, a reader that keeps reading true, a single writer.
blocking { assign_x_true, assign_x_false, noti_x_true, noti_x_false }

x_true = assign_x_true.x_true + assign_x_false.x_false + 'noti_x_true.x_true
x_false = assign_x_true.x_true + assign_x_false.x_false + 'noti_x_false.x_false
R = noti_x_true.R
W = 'assign_x_false.0

system = (x_true | R | W)\{assign_x_true, assign_x_false, noti_x_true, noti_x_false}
)";
  return modelFromSource("example1", text);
}

ProtocolModel example2() {
  static const char* text = R"(# As example1, but the variable emits its value as a signal.
signals { noti_x_true, noti_x_false }
blocking { assign_x_true, assign_x_false, noti_x_true, noti_x_false }

x_true = (assign_x_true.x_true + assign_x_false.x_false)^noti_x_true
x_false = (assign_x_true.x_true + assign_x_false.x_false)^noti_x_false
R = noti_x_true.R
W = 'assign_x_false.0

system = (x_true | R | W)\{assign_x_true, assign_x_false, noti_x_true, noti_x_false}
)";
  return modelFromSource("example2", text);
}

ProtocolModel peterson2(Flavor flavor) {
  std::ostringstream os;
  os << "# Peterson's mutual exclusion for processes A and B ("
     << (flavor == Flavor::Ccss ? "variables emit signals" : "variables answer reads") << ")\n";
  std::vector<std::string> names;
  for (const char* v : {"readyA", "readyB"}) {
    for (const char* b : {"true", "false"}) {
      names.push_back(std::string("assign_") + v + "_" + b);
      names.push_back(std::string("noti_") + v + "_" + b);
    }
  }
  for (const char* p : {"A", "B"}) {
    names.push_back(std::string("assign_turn_") + p);
    names.push_back(std::string("noti_turn_") + p);
  }
  if (flavor == Flavor::Ccss) {
    os << "signals { noti_readyA_true, noti_readyA_false, noti_readyB_true, noti_readyB_false, "
          "noti_turn_A, noti_turn_B }\n";
  }
  os << "blocking { noncritA, noncritB, " << join(names) << " }\n\n";
  os << "A = noncritA.'assign_readyA_true.'assign_turn_B.(noti_readyB_false + noti_turn_A)."
        "critA.'assign_readyA_false.A\n";
  os << "B = noncritB.'assign_readyB_true.'assign_turn_A.(noti_readyA_false + noti_turn_B)."
        "critB.'assign_readyB_false.B\n\n";
  auto boolVar = [&](const std::string& agent, const std::string& var, const std::string& v,
                     const std::string& a, const std::string& b) {
    std::string writes = "assign_" + var + "_" + a + "." + agent + "_" + a + " + assign_" + var +
                         "_" + b + "." + agent + "_" + b;
    if (flavor == Flavor::Ccss) {
      os << agent << "_" << v << " = (" << writes << ")^noti_" << var << "_" << v << "\n";
    } else {
      os << agent << "_" << v << " = " << writes << " + 'noti_" << var << "_" << v << "."
         << agent << "_" << v << "\n";
    }
  };
  for (const char* r : {"A", "B"}) {
    const std::string agent = std::string("Ready") + r;
    const std::string var = std::string("ready") + r;
    boolVar(agent, var, "true", "true", "false");
    boolVar(agent, var, "false", "true", "false");
  }
  boolVar("Turn", "turn", "A", "A", "B");
  boolVar("Turn", "turn", "B", "A", "B");
  os << "\nsystem = (A | B | ReadyA_false | ReadyB_false | Turn_A)\\{" << join(names) << "}\n";
  ProtocolModel m = modelFromSource("peterson2", os.str());
  m.n = 2;
  return m;
}

ProtocolModel filterLock(int n, Flavor flavor, int maxN) {
  if (n < 2 || n > maxN) {
    throw ParameterOutOfRange("filter lock needs 2 <= N <= " + std::to_string(maxN));
  }
  const std::string N = std::to_string(n);
  std::ostringstream os;
  os << "# Filter lock (Peterson's N-process generalisation), N = " << N << "\n";
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) {
    for (int v = 0; v <= n - 1; ++v) {
      names.push_back("assign_room[" + std::to_string(i) + "]_" + std::to_string(v));
      names.push_back("noti_room[" + std::to_string(i) + "]_" + std::to_string(v));
    }
  }
  for (int j = 1; j <= n - 1; ++j) {
    for (int v = 1; v <= n; ++v) {
      names.push_back("assign_last[" + std::to_string(j) + "]_" + std::to_string(v));
      names.push_back("noti_last[" + std::to_string(j) + "]_" + std::to_string(v));
    }
  }
  if (flavor == Flavor::Ccss) os << "signals { noti_room, noti_last }\n";
  os << "blocking { noncrit, assign_room, noti_room, assign_last, noti_last }\n\n";
  os << "F[i] = noncrit[i].Enter[i]_1\n";
  os << "Enter[i]_j when j <= " << n - 1 << " = 'assign_room[i]_j.'assign_last[j]_i.Wait[i]_j_1\n";
  os << "Enter[i]_" << N << " = crit[i].'assign_room[i]_0.F[i]\n";
  os << "# await last[j] != i, or room[k] < j for every k != i (read in index order)\n";
  os << "Wait[i]_j_k when k <= " << N << " && k != i =\n"
     << "    (sum v in 1.." << N << " when v != i . noti_last[j]_v.Enter[i]_(j + 1))\n"
     << "  + (sum v in 0.." << n - 1 << " when v < j . noti_room[k]_v.Wait[i]_j_(k + 1))\n";
  os << "Wait[i]_j_k when k == i = Wait[i]_j_(k + 1)\n";
  os << "Wait[i]_j_" << n + 1 << " = Enter[i]_(j + 1)\n\n";
  variable(os, flavor, "room[k]", 0, n - 1);
  variable(os, flavor, "last[j]", 1, n);
  os << "\nsystem = (";
  for (int i = 1; i <= n; ++i) os << (i > 1 ? " | " : "") << "F[" << i << "]";
  for (int i = 1; i <= n; ++i) os << " | room[" << i << "]_0";
  for (int j = 1; j <= n - 1; ++j) os << " | last[" << j << "]_1";
  os << ")\\{" << join(names) << "}\n";
  ProtocolModel m = modelFromSource("filter", os.str());
  m.n = n;
  return m;
}

ProtocolModel bakery(int n, int k, Flavor flavor) {
  if (n < 2 || k < n) throw ParameterOutOfRange("bakery needs N >= 2 and K >= N");
  const std::string N = std::to_string(n);
  const std::string K = std::to_string(k);
  std::ostringstream os;
  os << "# Lamport's bakery, N = " << N << ", tickets truncated to 0.." << K << "\n";
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) {
    const std::string I = std::to_string(i);
    for (int v = 0; v <= 1; ++v) {
      names.push_back("assign_choosing[" + I + "]_" + std::to_string(v));
      names.push_back("noti_choosing[" + I + "]_" + std::to_string(v));
    }
    for (int v = 0; v <= k; ++v) {
      names.push_back("assign_number[" + I + "]_" + std::to_string(v));
      names.push_back("noti_number[" + I + "]_" + std::to_string(v));
    }
  }
  if (flavor == Flavor::Ccss) os << "signals { noti_choosing, noti_number }\n";
  os << "blocking { noncrit, assign_choosing, noti_choosing, assign_number, noti_number }\n\n";
  os << "P[i] = noncrit[i].'assign_choosing[i]_1.doorway[i]_0_1\n";
  os << "# doorway: m is the maximum ticket read so far, j the next process to read\n";
  os << "doorway[i]_m_j when j <= " << N << " =\n"
     << "    (sum k in 0.." << K << " when k > m . noti_number[j]_k.doorway[i]_k_(j + 1))\n"
     << "  + (sum k in 0.." << K << " when k <= m . noti_number[j]_k.doorway[i]_m_(j + 1))\n";
  os << "doorway[i]_m_" << n + 1 << " when m + 1 <= " << K
     << " = 'assign_number[i]_(m + 1).'assign_choosing[i]_0.bakery[i]_(m + 1)_1\n";
  os << "doorway[i]_m_" << n + 1 << " when m + 1 > " << K << " = Overflow[i]\n";
  os << "Overflow[i] = 0\n";
  os << "bakery[i]_m_j when j <= " << N << " = noti_choosing[j]_0.(noti_number[j]_0.bakery[i]_m_(j + 1)\n"
     << "    + sum k in 1.." << K << " when k > m || (k == m && j >= i) . "
     << "noti_number[j]_k.bakery[i]_m_(j + 1))\n";
  os << "bakery[i]_m_" << n + 1 << " = crit[i].'assign_number[i]_0.P[i]\n\n";
  variable(os, flavor, "choosing[i]", 0, 1);
  variable(os, flavor, "number[i]", 0, k);
  os << "\nsystem = (";
  for (int i = 1; i <= n; ++i) {
    const std::string I = std::to_string(i);
    os << (i > 1 ? " | " : "") << "P[" << I << "] | choosing[" << I << "]_0 | number[" << I << "]_0";
  }
  os << ")\\{" << join(names) << "}\n";
  ProtocolModel m = modelFromSource("bakery", os.str());
  m.n = n;
  m.ticketBound = k;
  return m;
}

DekkerVariable dekkerVariable(const std::string& var) {
  DekkerVariable d;
  const std::string a = "assign_" + var;
  const std::string r = "noti_" + var;
  d.equations = var + "_true = (" + a + "_false." + var + "_false)^" + r + "_true\n" + var +
                "_false = (" + a + "_true." + var + "_true)^" + r + "_false\n";
  d.writeTrue = "('" + a + "_true + " + r + "_true)";
  d.writeFalse = "('" + a + "_false + " + r + "_false)";
  d.names = {a + "_true", a + "_false", r + "_true", r + "_false"};
  return d;
}

}  // namespace ccss
