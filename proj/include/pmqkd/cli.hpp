#ifndef PMQKD_CLI_HPP
#define PMQKD_CLI_HPP

namespace pmqkd::cli {

/// Entry point behind main(). Exit codes: 0 success, 2 configuration or
/// usage error, 3 degenerate data (estimation impossible on these tallies).
int run(int argc, const char* const* argv);

} // namespace pmqkd::cli

#endif
