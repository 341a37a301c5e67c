#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ccss/name.hpp"
#include "ccss/syntax.hpp"
#include "ccss/term.hpp"

namespace ccss {

/// Defining equations, declared signals and the blocking classification.
///
/// Parameterized agents are instantiated lazily by resolve(); instances are
/// cached, so repeated lookups return the identical interned Term. Copies
/// share state and are safe to use from several threads.
class Environment {
 public:
  Environment();

  /// Throws ScopeError for undeclared ranges or non-constant declarations.
  static Environment fromSpec(syntax::SpecFile spec);

  /// Environment with signal declarations only, for closed terms built in code.
  static Environment withSignals(std::vector<std::string> signalBases);

  /// Copy of this environment extended with ground equations, which take
  /// precedence over templates with the same name.
  Environment withGroundEquations(std::vector<std::pair<Name, Term>> equations) const;

  /// Defining body of `agent` with parameters substituted and indexed sums
  /// expanded. Throws UnknownAgent, ArityMismatch or AmbiguousAgent.
  Term resolve(Name agent) const;

  /// Ground a template under the given variable bindings.
  Term ground(const syntax::Proc& proc, const syntax::Bindings& bindings = {}) const;
  Action groundAction(const syntax::ActionExpr& a, const syntax::Bindings& bindings = {}) const;

  /// Grounded `system = ...` expression (Nil when the file has none).
  Term root() const;

  bool isSignal(std::string_view base) const;
  bool isBlocking(const Action& a) const;
  const std::set<std::string, std::less<>>& declaredSignals() const;
  const syntax::SpecFile& spec() const;
  const std::vector<std::pair<Name, Term>>& groundEquations() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

struct Violation {
  enum class Kind {
    UnknownAgent,
    ArityMismatch,
    AmbiguousAgent,
    RestrictedNonBlocking,
    RelabelIntoBlocking,
    UndeclaredSignal,
    SignalCoName,
    BadRange,
  };
  Kind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks the well-formedness conditions on `root` and on every agent body
/// reachable from it through identifiers. Never throws; problems are listed.
ValidationReport validate(const Environment& env, Term root);

}  // namespace ccss
