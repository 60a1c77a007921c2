#pragma once

#include <string>
#include <vector>

namespace skewshed {

/// Command-line entry point, argv[0] excluded. Returns 0 on success, 1 on
/// usage errors, 2 on runtime failures.
int run_cli(std::vector<std::string> args);

}  // namespace skewshed
