#pragma once

namespace dias::io {

/// Command-line entry point (run / sweep / report). Returns a process exit
/// code; all errors are reported on stderr. The default output root is
/// $DIAS_OUT_ROOT, falling back to ./out.
int cli(int argc, const char* const* argv);

}  // namespace dias::io
