#pragma once

#include <iosfwd>

namespace powrace::cli {

/// Full command-line entry point; argv[0] is the program name. Returns the
/// process exit code: 0 success, 1 runtime failure, 2 configuration error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace powrace::cli
