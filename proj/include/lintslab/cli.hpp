#pragma once

#include <vector>
#include <string>

namespace lintslab {

// Full command-line entry point: parses argv (subcommands example1, example2,
// compare, verify, all), runs the requested work, writes CSVs plus a
// summary.json into --out. Returns 0 on success, 1 when a verification check
// failed, 2 on usage errors.
int dispatch(const std::vector<std::string>& argv);

}  // namespace lintslab
