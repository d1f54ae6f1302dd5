#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace labelforge::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Runs one CLI invocation; args excludes the program name. Returns the
/// process exit code. Errors are reported as one line on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace labelforge::cli
