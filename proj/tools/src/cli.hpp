#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace confound::cli {

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Returns 0 on success, 1 on I/O failure, 2 on usage or parse
/// errors and 3 on numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace confound::cli
