#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace witness_forge::cli {

/// Exit codes: 0 success, 1 computation failure or failed reproduction,
/// 2 usage or schema error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace witness_forge::cli
