#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dicke {

// Exit codes: 0 success, 1 validation error, 2 resource or runtime error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace dicke
