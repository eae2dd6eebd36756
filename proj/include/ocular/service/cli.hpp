#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ocular::cli {

/// Runs the `ocular` command line. Returns the process exit code: 0 on
/// success, 1 on runtime failure, 2 on usage errors.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

}  // namespace ocular::cli
