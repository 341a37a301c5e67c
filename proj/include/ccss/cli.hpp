#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ccss::cli {

enum ExitCode { Holds = 0, Violated = 1, Usage = 2, Unknown = 3 };

/// Runs one command. `args` excludes the program name; `in` feeds the
/// `step` REPL.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace ccss::cli
