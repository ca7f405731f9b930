#pragma once

#include <ostream>

namespace hintkit {

/// Entry point of the `hintkit` command. Log lines go to `err`.
/// Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hintkit
