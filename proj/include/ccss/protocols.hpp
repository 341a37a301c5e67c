#pragma once

#include <string>
#include <vector>

#include "ccss/environment.hpp"
#include "ccss/term.hpp"

namespace ccss {

/// Ccs: shared variables answer reads with a co-name self-loop.
/// Ccss: shared variables emit their value as a signal.
enum class Flavor { Ccs, Ccss };

std::string toString(Flavor f);
Flavor parseFlavor(const std::string& text);

struct ProtocolModel {
  std::string family;
  int n = 0;
  int ticketBound = 0;
  Flavor flavor = Flavor::Ccss;
  std::string source;  // `.ccss` rendering the model was parsed from
  Environment env;
  Term root;
  std::vector<Action> noncrit;  // per process
  std::vector<Action> crit;
  ActionSet blocking;  // the noncrit actions
};

/// Parse `.ccss` text into a model. Processes are discovered from equation
/// bodies: every `noncritX` action is paired with `critX`.
ProtocolModel modelFromSource(std::string family, std::string source);

ProtocolModel example1();
ProtocolModel example2();
ProtocolModel peterson2(Flavor flavor);
/// Throws ParameterOutOfRange unless 2 <= n <= maxN.
ProtocolModel filterLock(int n, Flavor flavor, int maxN = 4);
/// Throws ParameterOutOfRange unless n >= 2 and k >= n.
ProtocolModel bakery(int n, int k, Flavor flavor = Flavor::Ccss);

/// Boolean variable whose only branch is the write of the other value, plus
/// the matching writer prefix that either writes or reads the current value.
struct DekkerVariable {
  std::string equations;  // x_true, x_false
  std::string writeTrue;  // "('assign_x_true + noti_x_true)"
  std::string writeFalse;
  std::vector<std::string> names;  // all action names, for restriction
};
DekkerVariable dekkerVariable(const std::string& var = "x");

}  // namespace ccss
