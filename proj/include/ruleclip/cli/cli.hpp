#pragma once

#include <iosfwd>

namespace ruleclip::cli {

// Exit codes: 0 success, 1 a check failed (gradcheck), 2 usage or config
// error, 3 I/O error, 4 numerical failure. Failures print one line
//   error: kind=<kind> [key=<config key>] message="<text>"
// to err. Every artifact written is announced on out as "artifact: <path>".
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ruleclip::cli
