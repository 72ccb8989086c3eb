#ifndef FCI_CLI_HPP
#define FCI_CLI_HPP

#include <iosfwd>

namespace fci {

// Command-line front end.  Exit codes: 0 success, 2 usage or validation
// error, 3 numerical failure (singular design), 4 I/O failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fci

#endif
