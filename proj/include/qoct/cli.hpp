#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qoct {

/// Runs one command-line invocation; args excludes the program name.
///
/// Exit codes: 0 success, 1 usage or configuration error, 2 numerical
/// failure (non-Hermitian operator, invalid state, non-finite result).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qoct
