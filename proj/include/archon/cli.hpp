#pragma once

#include <ostream>

namespace archon {

// Runs one command line. Reports go to `out`, diagnostics to `err`.
// Exit status: 0 all checks passed / work done, 1 verdict failure (deadlock
// or violated property), 2 usage or input error, 3 resource cap exceeded.
int cli_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace archon
