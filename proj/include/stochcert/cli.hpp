#pragma once

#include <ostream>

namespace stochcert {

/// Exit codes: 0 success or pass, 1 certificate or bound-check failure, 2 usage or config error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace stochcert
