#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace morphtag::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `morphtag` tool: train, tag, eval, xval, inspect.
/// `args` excludes the program name. Data goes to `out` or to files,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace morphtag::cli
