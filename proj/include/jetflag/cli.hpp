#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace jetflag::cli {

/// Runs one `jetflag` invocation; `args` excludes the program name. Result
/// JSON goes to `out`, errors as {"error": code, "message": text} to `err`.
/// Returns 0 on success, 1 on a domain error, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jetflag::cli
