#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace meshpress::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitTruncated = 3;

/// Runs one `meshpress` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace meshpress::cli
