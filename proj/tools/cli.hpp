#pragma once

#include <iosfwd>

namespace spikelab::cli {

// Exit codes: 0 success, 1 invalid input, 2 numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spikelab::cli
