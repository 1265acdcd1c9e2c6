#pragma once

#include <ostream>

namespace tlr::cli {

/// Entry point of the tlr-adapt tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tlr::cli
