#pragma once

namespace gtsi {

// Entry point for the gtsi binary; also linked into the CLI tests so the full
// argument surface is exercised in-process. Returns the process exit code:
// 0 success, 2 config, 3 dimension, 4 numeric failure.
int cli_main(int argc, const char* const* argv);

}  // namespace gtsi
