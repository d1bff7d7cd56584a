#pragma once

// Command-line front end. Exit codes: 0 all checks passed, 1 a check failed,
// 2 usage or input error.

#include <ostream>
#include <string>
#include <vector>

namespace mfgap::cli {

/// args excludes the program name. The JSON report goes to `out` unless --out
/// names a file; diagnostics and wall-clock go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace mfgap::cli
