#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlm::cli {

/// Runs one command line (without the program name). Results go to `out`,
/// diagnostics to `err`. Returns the process exit code: 0 on success, 1 on
/// any error or failed check, 2 on usage errors.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mlm::cli
