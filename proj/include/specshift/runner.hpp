#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace specshift::cli {

// Full command-line front end.  Returns the process exit code:
// 0 success, 2 configuration error, 3 numerical error.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace specshift::cli
