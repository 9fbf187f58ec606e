#pragma once

#include <iosfwd>

namespace mcvmd::io {

/// Entry point of the `mcvmd` command line tool. Returns the process exit
/// code: 0 on success, 2 on input errors, 3 on numerical failures.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace mcvmd::io
