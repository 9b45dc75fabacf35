#pragma once

#include "ruinkit/distributions.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ruinkit::cli {

// Runs one ruinkit command. `args` excludes the program name. Output goes to
// `out` unless --output names a file. Returns the process exit code:
// 0 success, 1 runtime error, 2 usage or config error.
// Parses the shorthand accepted by distribution flags (family:key=value...)
// or a JSON object. Throws ConfigError on malformed input.
DistributionSpec parse_distribution_spec(const std::string& text);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ruinkit::cli
