#ifndef ADJBLAS_TOOLS_COMMANDS_HPP
#define ADJBLAS_TOOLS_COMMANDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace adjblas::cli {

// Process exit status contract.
enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kUsageError = 2,
  kNumericalFailure = 3,
};

/// Entry point shared by the executable and the tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adjblas::cli

#endif  // ADJBLAS_TOOLS_COMMANDS_HPP
