#pragma once

namespace fairlot {

// Full command-line front end: parses argv, runs one subcommand, writes
// artifacts under --out and a human-readable summary to stdout.  Returns
// the process exit code: 0 when every gating check passes, 2 when a
// verification check fails, 1 on any error (bad flags, unreadable files,
// solver defects).  Set FAIRLOT_LOG=info or =debug for progress lines on
// stderr.
int run_command(int argc, const char* const* argv);

}  // namespace fairlot
