#pragma once

#include <string>
#include <vector>

namespace stanceval {

// Entry point behind the `stanceval` binary; exposed so tests can drive the
// CLI in-process. Returns the process exit code (0 ok, 2 validation/usage).
int cli_main(const std::vector<std::string>& args);

}  // namespace stanceval
