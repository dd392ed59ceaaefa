#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace abg {

/// Exit codes: 0 pass, 1 verdict failure, 2 usage or parse error,
/// 3 numeric or regime error.
enum ExitCode { kExitPass = 0, kExitVerdict = 1, kExitUsage = 2, kExitNumeric = 3 };

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace abg
