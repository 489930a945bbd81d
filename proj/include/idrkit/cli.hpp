#ifndef IDRKIT_CLI_HPP
#define IDRKIT_CLI_HPP

namespace idrkit {

/// Entry point of the command-line tool (also driven directly by tests).
/// Exit codes: 0 convergence, 1 max-matvec, 2 argument errors, 3 breakdown.
int run_cli(int argc, const char* const* argv);

} // namespace idrkit

#endif
