#pragma once

namespace microgrid {

/// Entry point behind the mgsched binary: run / compare / validate
/// subcommands. Returns the process exit code.
int cli_main(int argc, const char* const* argv);

}  // namespace microgrid
