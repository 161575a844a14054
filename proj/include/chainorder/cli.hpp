#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chainorder {

// Exit codes: 0 success, 1 usage or I/O failure, 2 invalid or failed-to-verify
// input document, 3 certify found the events not ordered as requested.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace chainorder
