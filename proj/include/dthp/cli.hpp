#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dthp::cli {

enum ExitCode : int {
    ok = 0,
    failure = 1,
    usage = 2,
    bad_config = 3,
    io_error = 4,
    bad_data = 5,
    numerical = 6,
};

/// Entry point of the `dthp` tool. Errors are reported on `err` as one JSON
/// object {"error": {"code", "kind", "message"}}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dthp::cli
