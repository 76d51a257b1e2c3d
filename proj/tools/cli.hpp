#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ede::cli {

/// Exit codes: 0 success, 1 domain failure (non-conforming data, rejected
/// request, failed scenario), 2 usage or configuration error.
inline constexpr int kOk = 0;
inline constexpr int kDomainFailure = 1;
inline constexpr int kUsage = 2;

/// Runs one command line (args excludes the program name). Machine output
/// goes to `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ede::cli
