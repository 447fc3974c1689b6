#pragma once

#include <iosfwd>

namespace lachesis {

/// Command-line driver. Subcommands: run, sweep, dump-dag, explain-event.
/// Exit codes: 0 success, 2 config/usage error, 3 dataset/parse error,
/// 4 unknown event, 1 anything else.
int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace lachesis
