#ifndef ALGEBROID_CLI_HPP
#define ALGEBROID_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace algebroid {

/// Dispatches one CLI invocation (argv without the program name).
/// Returns the process exit code: 0 iff all asserted checks pass.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

}  // namespace algebroid

#endif
