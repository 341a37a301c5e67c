#pragma once

#include <string>
#include <string_view>

#include "ccss/environment.hpp"
#include "ccss/syntax.hpp"
#include "ccss/term.hpp"

namespace ccss {

/// Parse a whole `.ccss` file. Throws SyntaxError with line and column.
syntax::SpecFile parseSpec(std::string_view text);

/// Parse a single process expression (no declarations).
syntax::ProcPtr parseProcess(std::string_view text);

/// Parse a process expression and ground it against `env`.
Term parseTerm(std::string_view text, const Environment& env);

/// parseSpec followed by Environment::fromSpec.
Environment loadSpec(std::string_view text);
Environment loadSpecFile(const std::string& path);

std::string print(const syntax::Expr& e);
std::string print(const syntax::NameExpr& n);
std::string print(const syntax::ActionExpr& a);
std::string print(const syntax::Proc& p);
std::string print(const syntax::SpecFile& spec);
/// Minimal-parenthesis text of a ground term; parses back to the same term.
std::string print(Term t);

syntax::ProcPtr toSyntax(Term t);

}  // namespace ccss
