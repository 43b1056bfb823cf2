#ifndef MELKIT_CLI_HPP
#define MELKIT_CLI_HPP

namespace melkit::cli {

/// Full command-line entry point (sub, hom, resonances, limit, persist,
/// scan, verdict).  Returns the process exit code: 0 success, 1 internal
/// failure, 2 domain/no-resonance error, 64 usage error.
int run_cli(int argc, const char* const* argv);

} // namespace melkit::cli

#endif
